#ifndef PSLINK_HIDM_HPP
#define PSLINK_HIDM_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pslink/constellation.hpp"
#include "pslink/dm.hpp"
#include "pslink/exact.hpp"

namespace pslink {

// One layer of the LUT tree. Layer 1 is the output layer; layer L the top.
// Each LUT takes v = constraint_bits + fresh_bits input bits and emits
// out_bits; fan_out LUTs of this layer hang off one LUT of the layer above
// (so u_{l+1} = fan_out_l * constraint_bits_l).
struct HidmLayerSpec {
    int out_bits = 0;        // u
    int constraint_bits = 0; // r (0 on the top layer)
    int fresh_bits = 0;      // s
    int fan_out = 1;         // t (unused on the top layer)

    int in_bits() const { return constraint_bits + fresh_bits; } // v
};

struct HidmTreeSpec {
    std::vector<HidmLayerSpec> layers; // index 0 = layer 1 (bottom)
    int labeling_bits = 0;             // amplitude pattern width (m/2 - 1)
    std::vector<int> shaped_levels;    // PAM bit levels fed by the DM, e.g. {2,3}
    uint64_t budget_dm_bits = 0;       // 0 = no declared budget
    uint64_t budget_invdm_bits = 0;

    int num_layers() const { return static_cast<int>(layers.size()); }
    std::vector<long> lut_counts() const; // T_l, index 0 = layer 1
    long n_info_bits() const;             // N_u^sb = sum T_l s_l
    long n_shaped_bits() const;           // T_1 u_1
    int shaped_bits_per_symbol() const { return static_cast<int>(shaped_levels.size()); }
    int n_pam_symbols() const;

    void validate() const; // throws std::invalid_argument naming the layer
};

struct HidmEntry {
    uint32_t word = 0;
    Rational energy; // expected 1D symbol energy of the span this word selects
};

// (dm_bits, invdm_bits) = (sum T 2^v u, sum T 2^u v)
std::pair<uint64_t, uint64_t> storage_bits(const HidmTreeSpec& spec);

class HidmCodec final : public DmCodec {
public:
    HidmTreeSpec spec;
    AmplitudeLabeling labeling;
    std::vector<std::vector<HidmEntry>> tables; // per layer, index 0 = layer 1

    long info_bits() const override { return spec.n_info_bits(); }
    long shaped_bits() const override { return spec.n_shaped_bits(); }
    int pam_symbols() const override { return spec.n_pam_symbols(); }
    int shaped_bits_per_symbol() const override { return spec.shaped_bits_per_symbol(); }
    BitVec match(const BitVec& info) const override;
    BitVec dematch(const BitVec& shaped) const override;
    std::string name() const override { return "hidm"; }

    // Exact statistics under uniform input bits.
    RationalPmf amplitude_pmf() const;
    Rational expected_energy_1d() const;

    void finalize(); // rebuild lookup acceleration after tables change

private:
    // per layer: word -> table index, -1 if absent
    std::vector<std::vector<int32_t>> inverse_;
    int lookup(int layer, uint32_t word) const; // nearest entry when invalid

    friend HidmCodec build_tree(const HidmTreeSpec&, const AmplitudeLabeling&);
};

// Construct tables by exact energy sorting. Candidate words are ordered by
// (expected energy, sorted component energies, numeric word value); the
// lowest 2^v survive. Component energies are the per-symbol expected
// energies on layer 1 and the child region energies above.
HidmCodec build_tree(const HidmTreeSpec& spec, const AmplitudeLabeling& labeling);

// Versioned text format; round-trips byte-exactly through save/load.
void save_tree(const HidmCodec& codec, std::ostream& out);
HidmCodec load_tree(std::istream& in);
void save_tree_file(const HidmCodec& codec, const std::string& path);
HidmCodec load_tree_file(const std::string& path);

// Spec-only variants (header without tables), used by the tree builder CLI.
void save_tree_spec(const HidmTreeSpec& spec, std::ostream& out);
HidmTreeSpec load_tree_spec(std::istream& in);

// The 3-layer example codec for PS-32-PAM: u=(4,6,4), r=(3,2,0), s=(1,2,3).
HidmTreeSpec fig2_tree_spec();

// The bundled 7-layer PS-16-PAM reference: 64 layer-1 LUTs of 10 output
// bits, 507 info bits onto 640 shaped bits (N_s = 320).
HidmTreeSpec reference_tree_spec();

} // namespace pslink

#endif
