#ifndef PSLINK_CONSTELLATION_HPP
#define PSLINK_CONSTELLATION_HPP

#include <cstdint>
#include <vector>

#include "pslink/exact.hpp"

namespace pslink {

// One-sided PAM amplitude set {1, 3, ..., 2^(bits+1)-1}, spacing 2.
struct AmplitudeAlphabet {
    int bits = 0;                // amplitude bits per PAM symbol (sign excluded)
    std::vector<int> amplitudes; // ascending odd integers

    static AmplitudeAlphabet for_bits(int bits);
    // m = bits per QAM symbol (even); one rail has m/2 bits, one of them the sign
    static AmplitudeAlphabet for_qam_bits(int m) { return for_bits(m / 2 - 1); }

    int size() const { return static_cast<int>(amplitudes.size()); }
};

// Bijection bit pattern (width `bits`, MSB first) <-> amplitude.
struct AmplitudeLabeling {
    int bits = 0;
    std::vector<int> pattern_to_amp;       // [pattern] -> amplitude value
    std::vector<uint32_t> index_to_pattern; // [amplitude index] -> pattern

    int amplitude_of(uint32_t pattern) const { return pattern_to_amp[pattern]; }
    uint32_t pattern_of_index(int amp_index) const { return index_to_pattern[static_cast<size_t>(amp_index)]; }
};

// Binary-reflected Gray labeling; adjacent amplitudes differ in exactly one bit.
AmplitudeLabeling build_reflected_gray_labeling(int bits_per_amplitude);

// Probability mass function over an amplitude alphabet (ascending order).
struct Pmf {
    std::vector<double> p;
    void validate() const; // nonnegative, sums to 1 within 1e-12
};

// Exact counterpart for table-driven codecs.
struct RationalPmf {
    std::vector<Rational> p;
    Pmf to_pmf() const;
    void validate() const; // sums to exactly 1
};

// Maxwell-Boltzmann PMF: P(a) = exp(-lambda a^2) / sum_b exp(-lambda b^2)
Pmf mb_pmf(double lambda, const AmplitudeAlphabet& alphabet);

double pmf_energy_1d(const Pmf& pmf, const AmplitudeAlphabet& alphabet);
Rational pmf_energy_1d(const RationalPmf& pmf, const AmplitudeAlphabet& alphabet);
inline double pmf_energy_2d(const Pmf& pmf, const AmplitudeAlphabet& a) { return 2.0 * pmf_energy_1d(pmf, a); }

// H(|X|) in bits
double pmf_entropy(const Pmf& pmf);
// per-1D symbol entropy including the uniform sign bit: H(|X|) + 1
inline double pmf_entropy_1d_with_sign(const Pmf& pmf) { return pmf_entropy(pmf) + 1.0; }
// per-2D (QAM) entropy 2 H(X)
inline double pmf_entropy_2d(const Pmf& pmf) { return 2.0 * (pmf_entropy(pmf) + 1.0); }

// Bisection solvers for the MB parameter (tolerance 1e-10 on the target).
double solve_mb_lambda_for_entropy_2d(double target_entropy_2d, const AmplitudeAlphabet& alphabet);
double solve_mb_lambda_for_energy_1d(double target_energy_1d, const AmplitudeAlphabet& alphabet);

} // namespace pslink

#endif
