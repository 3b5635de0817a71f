#ifndef PSLINK_CROSS_QAM_HPP
#define PSLINK_CROSS_QAM_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace pslink {

// Cross-128-QAM for the nonshaped BICM baseline: 12x12 odd-integer grid
// minus the 2x2-per-quadrant corners. 7-bit labels: bit 1 = sign(I),
// bit 2 = sign(Q), bits 3..7 a quasi-Gray label of the 32 quadrant points
// (Gray-coded indices along a boustrophedon column path; no perfect Gray
// code exists for cross constellations).
class CrossQam128 {
public:
    CrossQam128();

    static constexpr int kBits = 7;
    static constexpr int kPoints = 128;

    std::pair<double, double> map(uint32_t label) const; // 7-bit label -> (I, Q)
    uint32_t label_of(int point_index) const { return labels_[static_cast<size_t>(point_index)]; }
    std::pair<double, double> point(int point_index) const { return points_[static_cast<size_t>(point_index)]; }

    double energy_2d() const; // 82 for unit half-spacing

private:
    std::vector<std::pair<double, double>> points_; // all 128 signed points
    std::vector<uint32_t> labels_;                  // 7-bit label per point
    std::vector<int> label_to_point_;               // inverse
};

} // namespace pslink

#endif
