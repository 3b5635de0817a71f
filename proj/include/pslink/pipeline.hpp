#ifndef PSLINK_PIPELINE_HPP
#define PSLINK_PIPELINE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "pslink/ccdm.hpp"
#include "pslink/constellation.hpp"
#include "pslink/cross_qam.hpp"
#include "pslink/dm.hpp"
#include "pslink/fec.hpp"
#include "pslink/hidm.hpp"
#include "pslink/metrics.hpp"

namespace pslink {

enum class FrameLayout { CcdmParallel, HidmSequential, BicmUniform };

struct CodeGeometry {
    int n = 0;
    int k = 0;
};

struct DmGeometry {
    long shaped_bits_per_word = 0; // m^sb N_s / 2
    int shaped_bits_per_symbol = 0; // m^sb / 2
    long info_bits_per_word = 0;    // N_u^sb
    int codewords_per_group = 0;    // 0 = smallest consistent group
};

// Deterministic positional framing between client bits, DM words, FEC
// codewords and QAM bit levels.
//
// Codeword payload order (PS layouts): unshaped amplitude levels first
// (least significant level across all rails, then the next), then the shaped
// levels (per PAM rail, level 2 first), then payload sign bits; parity
// occupies the remaining sign positions. Symbols ascend, I rail before Q.
//
// Client order: all DM info words first (word-major), then the unshaped
// payload bits codeword-major in ascending payload position.
struct FramePlan {
    FrameLayout layout = FrameLayout::BicmUniform;
    CodeGeometry code;
    int qam_bits = 0; // m
    DmGeometry dm;

    int codewords_per_group = 0;
    int dm_words_per_group = 0;

    int qam_per_codeword = 0;      // PS layouts: n/m
    long shaped_per_codeword = 0;  // PS layouts
    long unshaped_per_codeword = 0; // unshaped payload bits per codeword
    long group_symbols = 0;

    long client_bits_per_group() const;

    // --- PS layouts ---
    // full codeword bit index of (symbol, rail in {0=I,1=Q}, level 1..m/2)
    long ps_bit_index(int sym, int rail, int level) const;
    // group shaped-stream position -> (codeword, codeword bit index)
    std::pair<int, long> shaped_slot(long p) const;
    // j-th unshaped payload bit of a codeword -> codeword bit index
    long unshaped_payload_index(long j) const;

    // --- BICM ---
    // bit i (0..n-1) of codeword cw -> (group symbol, level 1..m)
    std::pair<long, int> bicm_slot(int cw, long i) const;

    // client map
    long client_of_word_bit(long word, long bit) const;
    long client_of_unshaped(int cw, long j) const;
};

FramePlan build_frame_plan(FrameLayout layout, CodeGeometry code, int qam_bits, const DmGeometry& dm = {});

// sigma^2 per dimension for Es/N0-per-2D at the given 2D symbol energy
double awgn_sigma2_per_dim(double energy_2d, double snr_db);

// Deterministic standard-normal generator (Box-Muller over mt19937_64), so
// streams are identical across platforms and thread counts.
class NormalGen {
public:
    explicit NormalGen(uint64_t seed) : rng_(seed) {}
    double operator()();
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    bool have_ = false;
    double spare_ = 0;
};

// Exact a-posteriori bit L-values of one PAM observation with PAS priors
// P(x) = P(|x|)/2; levels 1 (sign) .. m/2. Natural-log L-values, positive
// favours bit 0. noise_var is per dimension.
std::vector<double> pam_posterior_llrs(double y, const Pmf& prior, const AmplitudeLabeling& labeling,
                                       double noise_var);

// Quantized demapper: input on a 7-bit uniform grid over +-(max amplitude +
// 4 sigma), output 4-bit integer L-values clipped at +-7.
class PamDemapper {
public:
    PamDemapper(const Pmf& prior, const AmplitudeLabeling& labeling, double noise_var, int in_bits = 7,
                int out_bits = 4);

    int levels() const { return levels_; }
    int quantize(double y) const;
    double grid_value(int idx) const { return lo_ + step_ * idx; }
    float raw_llr(int grid_idx, int level) const { return raw_[static_cast<size_t>(grid_idx) * levels_ + level - 1]; }
    int q_llr(int grid_idx, int level) const { return q_[static_cast<size_t>(grid_idx) * levels_ + level - 1]; }

private:
    int levels_, grid_, clip_;
    double lo_, step_;
    std::vector<float> raw_;
    std::vector<int8_t> q_;
};

// Joint 2D demapper for the cross-128 BICM baseline (uniform priors).
class CrossQamDemapper {
public:
    CrossQamDemapper(const CrossQam128& qam, double noise_var, int in_bits = 7, int out_bits = 4);

    int quantize(double v) const;
    float raw_llr(int gx, int gy, int level) const {
        return raw_[(static_cast<size_t>(gx) * grid_ + gy) * CrossQam128::kBits + level - 1];
    }
    int q_llr(int gx, int gy, int level) const {
        return q_[(static_cast<size_t>(gx) * grid_ + gy) * CrossQam128::kBits + level - 1];
    }

private:
    int grid_, clip_;
    double lo_, step_;
    std::vector<float> raw_;
    std::vector<int8_t> q_;
};

struct SimConfig {
    FrameLayout layout = FrameLayout::CcdmParallel;
    std::shared_ptr<const DmCodec> dm; // null for BICM
    Pmf amplitude_pmf;                 // demap priors for PS layouts
    LdpcCode code;
    std::vector<double> snr_db;
    long max_codewords = 200000;
    long target_frame_errors = 100;
    std::optional<uint64_t> seed; // mandatory
    int demap_in_bits = 7;
    int demap_out_bits = 4;
    int otuc_n = 1;
    int workers = 0; // 0: PSLINK_WORKERS env var, else hardware
    int groups_per_round = 4;
    DecodeOptions decode;

    void validate() const;
};

struct SnrPoint {
    double snr_db = 0;
    long groups = 0, codewords = 0;
    long prefec_bit_errors = 0, prefec_bits = 0;
    long postfec_bit_errors = 0, payload_bits = 0;
    long frame_errors = 0;
    long postinvdm_bit_errors = 0, client_bits = 0;
    long blocks_errored = 0, blocks_total = 0;
    double asi = 0, ngmi = 0;

    double pre_fec_ber() const { return prefec_bits ? double(prefec_bit_errors) / prefec_bits : 0; }
    double post_fec_ber() const { return payload_bits ? double(postfec_bit_errors) / payload_bits : 0; }
    double post_invdm_ber() const { return client_bits ? double(postinvdm_bit_errors) / client_bits : 0; }
    double fec_fer() const { return codewords ? double(frame_errors) / codewords : 0; }
    double bber() const { return blocks_total ? double(blocks_errored) / blocks_total : 0; }
};

struct SimResult {
    FramePlan plan;
    std::vector<SnrPoint> points;
};

SimResult run_link(const SimConfig& cfg);

struct BberCount {
    long blocks_errored = 0;
    long blocks_total = 0;
    double bber() const { return blocks_total ? double(blocks_errored) / blocks_total : 0; }
};

// Blocks of 130560*otuc_n client bits; a block is errored iff it contains at
// least one errored position. Only whole blocks are counted.
BberCount count_bber(const std::vector<long>& error_positions, long total_client_bits, int otuc_n);

// Demap priors for the two DM families.
Pmf hidm_amplitude_pmf(const HidmCodec& codec);
Pmf ccdm_amplitude_pmf(const CcdmBitCodec& codec);

} // namespace pslink

#endif
