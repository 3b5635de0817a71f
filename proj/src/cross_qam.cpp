#include "pslink/cross_qam.hpp"

#include <stdexcept>

#include "pslink/bits.hpp"

namespace pslink {

CrossQam128::CrossQam128() {
    // quadrant points: x in {1..7} with y in {1..11}, x in {9,11} with y in {1..7}
    std::vector<std::pair<int, int>> quad;
    const int cols[6] = {1, 3, 5, 7, 9, 11};
    for (int ci = 0; ci < 6; ++ci) {
        int x = cols[ci];
        int ymax = (x <= 7) ? 11 : 7;
        std::vector<int> ys;
        for (int y = 1; y <= ymax; y += 2)
            ys.push_back(y);
        if (ci % 2 == 1)
            std::reverse(ys.begin(), ys.end()); // snake path
        for (int y : ys)
            quad.push_back({x, y});
    }
    if (quad.size() != 32)
        throw std::logic_error("cross-128 quadrant size");

    points_.reserve(kPoints);
    labels_.reserve(kPoints);
    label_to_point_.assign(kPoints, -1);
    for (int q = 0; q < 32; ++q) {
        uint32_t qlabel = binary_to_gray(static_cast<uint32_t>(q)); // 5 bits, path-adjacent differ in 1
        for (int sx = 0; sx < 2; ++sx)
            for (int sy = 0; sy < 2; ++sy) {
                double x = quad[static_cast<size_t>(q)].first * (sx ? -1.0 : 1.0);
                double y = quad[static_cast<size_t>(q)].second * (sy ? -1.0 : 1.0);
                uint32_t label = (static_cast<uint32_t>(sx) << 6) | (static_cast<uint32_t>(sy) << 5) | qlabel;
                int idx = static_cast<int>(points_.size());
                points_.push_back({x, y});
                labels_.push_back(label);
                label_to_point_[label] = idx;
            }
    }
}

std::pair<double, double> CrossQam128::map(uint32_t label) const {
    if (label >= kPoints)
        throw std::invalid_argument("label out of range");
    return points_[static_cast<size_t>(label_to_point_[label])];
}

double CrossQam128::energy_2d() const {
    double e = 0;
    for (const auto& [x, y] : points_)
        e += x * x + y * y;
    return e / kPoints;
}

} // namespace pslink
