#include "pslink/ccdm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pslink {

long Composition::word_len() const {
    long n = 0;
    for (long c : counts)
        n += c;
    return n;
}

void Composition::validate() const {
    if (counts.empty())
        throw std::invalid_argument("empty composition");
    bool any = false;
    for (long c : counts) {
        if (c < 0)
            throw std::invalid_argument("negative class count");
        any = any || c > 0;
    }
    if (!any)
        throw std::invalid_argument("all-zero composition");
}

BigInt multinomial(const Composition& comp) {
    comp.validate();
    BigInt m = 1;
    unsigned long partial = 0;
    for (long c : comp.counts) {
        partial += static_cast<unsigned long>(c);
        BigInt b;
        mpz_bin_uiui(b.get_mpz_t(), partial, static_cast<unsigned long>(c));
        m *= b;
    }
    return m;
}

long num_input_bits(const Composition& comp) {
    return floor_log2(multinomial(comp));
}

Composition design_composition(const std::vector<double>& target, long word_len,
                               std::optional<long> min_input_bits, std::vector<double> class_energy) {
    if (word_len < 1)
        throw std::invalid_argument("word_len must be >= 1");
    if (target.empty())
        throw std::invalid_argument("empty target pmf");
    if (class_energy.empty()) {
        for (size_t i = 0; i < target.size(); ++i) {
            double a0 = 4.0 * i + 1, a1 = 4.0 * i + 3;
            class_energy.push_back((a0 * a0 + a1 * a1) / 2.0);
        }
    }
    if (class_energy.size() != target.size())
        throw std::invalid_argument("class energy size mismatch");

    size_t k = target.size();
    std::vector<long> base(k);
    long remaining = word_len;
    for (size_t i = 0; i < k; ++i) {
        base[i] = static_cast<long>(std::floor(target[i] * word_len + 1e-12));
        remaining -= base[i];
    }
    if (remaining < 0 || remaining > static_cast<long>(k))
        throw std::invalid_argument("target pmf does not sum to 1");

    // all ways of distributing the leftover +1s
    std::optional<Composition> best;
    double best_energy = 0;
    std::vector<int> pick(k, 0);
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
        if (std::popcount(mask) != static_cast<int>(remaining))
            continue;
        Composition cand;
        cand.counts = base;
        for (size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1u)
                cand.counts[i] += 1;
        if (min_input_bits && num_input_bits(cand) < *min_input_bits)
            continue;
        double e = 0;
        for (size_t i = 0; i < k; ++i)
            e += cand.counts[i] * class_energy[i];
        if (!best || e < best_energy ||
            (e == best_energy && cand.counts < best->counts)) {
            best = cand;
            best_energy = e;
        }
    }
    if (!best)
        throw std::invalid_argument("input-bit request infeasible for this target");
    return *best;
}

CcdmCodec::CcdmCodec(Composition comp, std::optional<long> input_bits) : comp_(std::move(comp)) {
    comp_.validate();
    total_ = multinomial(comp_);
    long cap = (total_ == 1) ? 0 : floor_log2(total_);
    input_bits_ = input_bits.value_or(cap);
    if (input_bits_ < 0 || input_bits_ > cap)
        throw std::invalid_argument("input bits exceed floor(log2 multinomial)");
}

std::vector<uint8_t> CcdmCodec::match_classes(const BitVec& info) const {
    if (static_cast<long>(info.size()) != input_bits_)
        throw std::invalid_argument("info length != N_u^sb");
    BigInt index = 0;
    for (uint8_t b : info) {
        index <<= 1;
        if (b)
            index |= 1;
    }
    long n = comp_.word_len();
    std::vector<long> counts = comp_.counts;
    BigInt m = total_;
    std::vector<uint8_t> out(static_cast<size_t>(n));
    for (long pos = 0; pos < n; ++pos) {
        long rem = n - pos;
        for (size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] == 0)
                continue;
            BigInt sub = m * counts[c];
            mpz_divexact_ui(sub.get_mpz_t(), sub.get_mpz_t(), static_cast<unsigned long>(rem));
            if (index < sub) {
                out[static_cast<size_t>(pos)] = static_cast<uint8_t>(c);
                counts[c] -= 1;
                m = sub;
                break;
            }
            index -= sub;
        }
    }
    return out;
}

BitVec CcdmCodec::dematch_classes(const std::vector<uint8_t>& classes) const {
    if (static_cast<long>(classes.size()) != comp_.word_len())
        throw std::invalid_argument("sequence length mismatch");
    size_t k = comp_.counts.size();
    std::vector<long> counts(k, 0);
    for (uint8_t c : classes) {
        if (c >= k)
            throw std::invalid_argument("class index out of range");
        counts[c] += 1;
    }
    Composition received{counts};
    BigInt m = multinomial(received);
    BigInt rank = 0;
    long n = comp_.word_len();
    for (long pos = 0; pos < n; ++pos) {
        long rem = n - pos;
        uint8_t sym = classes[static_cast<size_t>(pos)];
        BigInt chosen = 0;
        for (size_t c = 0; c < k; ++c) {
            if (counts[c] == 0)
                continue;
            BigInt sub = m * counts[c];
            mpz_divexact_ui(sub.get_mpz_t(), sub.get_mpz_t(), static_cast<unsigned long>(rem));
            if (c < sym)
                rank += sub;
            else if (c == sym)
                chosen = sub;
        }
        counts[sym] -= 1;
        m = chosen;
    }

    BitVec out(static_cast<size_t>(input_bits_));
    BigInt limit = BigInt(1) << static_cast<unsigned long>(input_bits_);
    if (rank >= limit) {
        std::fill(out.begin(), out.end(), uint8_t(1));
        return out;
    }
    for (long i = input_bits_ - 1; i >= 0; --i) {
        out[static_cast<size_t>(i)] = static_cast<uint8_t>(mpz_tstbit(rank.get_mpz_t(), 0));
        rank >>= 1;
    }
    return out;
}

CcdmBitCodec::CcdmBitCodec(CcdmCodec codec) : inner_(std::move(codec)) {
    size_t k = inner_.composition().counts.size();
    while ((size_t(1) << bits_per_class_) < k)
        ++bits_per_class_;
    if ((size_t(1) << bits_per_class_) != k)
        throw std::invalid_argument("class count must be a power of two for bit transport");
}

BitVec CcdmBitCodec::match(const BitVec& info) const {
    auto classes = inner_.match_classes(info);
    BitVec out(classes.size() * static_cast<size_t>(bits_per_class_));
    for (size_t i = 0; i < classes.size(); ++i)
        unpack_bits(binary_to_gray(classes[i]), bits_per_class_, out, i * bits_per_class_);
    return out;
}

BitVec CcdmBitCodec::dematch(const BitVec& shaped) const {
    if (shaped.size() != static_cast<size_t>(shaped_bits()))
        throw std::invalid_argument("shaped length mismatch");
    std::vector<uint8_t> classes(shaped.size() / static_cast<size_t>(bits_per_class_));
    for (size_t i = 0; i < classes.size(); ++i)
        classes[i] = static_cast<uint8_t>(gray_to_binary(pack_bits(shaped, i * bits_per_class_, bits_per_class_)));
    return inner_.dematch_classes(classes);
}

CcdmBitCodec paper_scale_ccdm(std::optional<long> input_bits) {
    Composition comp{{318, 208, 89, 25}};
    return CcdmBitCodec(CcdmCodec(comp, input_bits));
}

} // namespace pslink
