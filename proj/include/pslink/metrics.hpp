#ifndef PSLINK_METRICS_HPP
#define PSLINK_METRICS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pslink/constellation.hpp"

namespace pslink {

// Rate bookkeeping for one DM word. dm_input_bits is the per-word average
// N_u and may be fractional when the unshaped share does not divide evenly.
struct ShapingRates {
    double entropy_2d = 0;   // 2 H(X), bits per QAM symbol
    double code_rate = 1;    // R_c
    int qam_bits = 0;        // m
    double dm_input_bits = 0; // N_u
    int dm_word_pam_len = 0;  // N_s

    void validate() const;
};

// R = N_u / (N_s/2), bits per 2D channel use.
double information_rate(const ShapingRates& r);

// R_loss = 2H(X) - (1-R_c) m - N_u/(N_s/2) >= 0
double rate_loss(const ShapingRates& r);

// G = d_min^2 (2^beta - 1) / (6 E), returned in dB. beta and E are per 2D.
double constellation_gain_db(double beta_2d, double energy_2d, double d_min = 2.0);

struct LlrSample {
    uint8_t bit;   // transmitted bit
    double llr;    // a posteriori L-value, positive favours bit 0
    int bit_level; // 1..m
};

struct AirEstimate {
    double value = 0;    // bits per 2D
    double std_err = 0;
    long samples = 0;
};

struct AirConfig {
    long samples = 200000;
    uint64_t seed = 1;
};

// Monte Carlo estimate of 2H(X) - sum_i H(B_i|Y) for a PAS-mapped PAM rail
// (sign bit + Gray amplitude labeling), doubled to per-2D. snr_db is
// Es/N0 per 2D; +infinity returns the noiseless limit 2H(X) exactly.
AirEstimate air_bmd(const Pmf& pmf, const AmplitudeLabeling& labeling, double snr_db,
                    const AirConfig& cfg = {});

// GMI-based NGMI estimator from matched L-value samples:
// NGMI = 1 - (2H(X) - GMI)/m with GMI = 2H(X) - sum_i E[log2(1+exp(-La_i))].
double estimate_ngmi(std::span<const LlrSample> samples, double entropy_2d, int m);

// ASI = 1 - (1/m) sum_i H(B_i | L_i). Integer-valued (quantized) L-values use
// the exact empirical conditional entropy over the discrete L alphabet;
// otherwise 64 quantile bins per |L| with Miller-Madow bias correction.
double estimate_asi(std::span<const LlrSample> samples);

// Mergeable accumulators used by the simulation pipeline.
struct NgmiAccumulator {
    std::vector<double> sum_bits; // per level: sum of log2(1+exp(-La))
    std::vector<long> count;

    void add(int bit_level, uint8_t bit, double llr);
    void merge(const NgmiAccumulator& o);
    double ngmi(double entropy_2d, int m) const;
};

struct AsiAccumulator {
    // (level, quantized L) -> counts of bit 0 / bit 1
    std::map<std::pair<int, int>, std::array<long, 2>> counts;

    void add(int bit_level, uint8_t bit, int quantized_llr);
    void merge(const AsiAccumulator& o);
    double asi() const;
};

} // namespace pslink

#endif
