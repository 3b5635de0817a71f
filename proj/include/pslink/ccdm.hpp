#ifndef PSLINK_CCDM_HPP
#define PSLINK_CCDM_HPP

#include <optional>
#include <vector>

#include "pslink/dm.hpp"
#include "pslink/exact.hpp"

namespace pslink {

// Fixed per-class symbol counts of every CCDM output word.
struct Composition {
    std::vector<long> counts;

    long word_len() const;
    void validate() const;
};

// floor(log2 multinomial(word_len; counts)), exact.
long num_input_bits(const Composition& comp);
BigInt multinomial(const Composition& comp);

// Round target*word_len to integer counts summing to word_len. Among the
// floor/ceil roundings the one with the lowest mean class energy wins,
// subject to num_input_bits >= min_input_bits when given. class_energy
// defaults to adjacent-odd-pair classes: mean((4i+1)^2, (4i+3)^2).
Composition design_composition(const std::vector<double>& target, long word_len,
                               std::optional<long> min_input_bits = std::nullopt,
                               std::vector<double> class_energy = {});

// Exact multinomial ranking/unranking codec over class sequences.
class CcdmCodec {
public:
    explicit CcdmCodec(Composition comp, std::optional<long> input_bits = std::nullopt);

    const Composition& composition() const { return comp_; }
    long input_bits() const { return input_bits_; }
    const BigInt& total_words() const { return total_; }

    // info (input_bits bits, MSB first) -> class sequence with exactly the
    // codec composition, by lexicographic unranking.
    std::vector<uint8_t> match_classes(const BitVec& info) const;

    // Ranking. The remaining class budget is recomputed from the received
    // sequence itself, so corrupted sequences never abort; ranks at or above
    // 2^input_bits clamp to the all-ones output.
    BitVec dematch_classes(const std::vector<uint8_t>& classes) const;

private:
    Composition comp_;
    long input_bits_ = 0;
    BigInt total_;
};

// DmCodec adapter: classes are carried as log2(K) shaped bits per PAM symbol
// using the reflected-Gray prefix pattern (class c <-> gray(c)).
class CcdmBitCodec final : public DmCodec {
public:
    explicit CcdmBitCodec(CcdmCodec codec);

    const CcdmCodec& codec() const { return inner_; }
    long info_bits() const override { return inner_.input_bits(); }
    long shaped_bits() const override { return inner_.composition().word_len() * bits_per_class_; }
    int pam_symbols() const override { return static_cast<int>(inner_.composition().word_len()); }
    int shaped_bits_per_symbol() const override { return bits_per_class_; }
    BitVec match(const BitVec& info) const override;
    BitVec dematch(const BitVec& shaped) const override;
    std::string name() const override { return "ccdm"; }

private:
    CcdmCodec inner_;
    int bits_per_class_ = 0;
};

// Tab-IV-scale composition (318,208,89,25)/640 with the frame's 1014 input bits.
CcdmBitCodec paper_scale_ccdm(std::optional<long> input_bits = 1014);

} // namespace pslink

#endif
