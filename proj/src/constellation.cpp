#include "pslink/constellation.hpp"

#include <cmath>
#include <stdexcept>

#include "pslink/bits.hpp"

namespace pslink {

AmplitudeAlphabet AmplitudeAlphabet::for_bits(int bits) {
    if (bits < 1 || bits > 7)
        throw std::invalid_argument("amplitude bits must be in 1..7");
    AmplitudeAlphabet a;
    a.bits = bits;
    a.amplitudes.resize(static_cast<size_t>(1) << bits);
    for (size_t i = 0; i < a.amplitudes.size(); ++i)
        a.amplitudes[i] = static_cast<int>(2 * i + 1);
    return a;
}

AmplitudeLabeling build_reflected_gray_labeling(int bits_per_amplitude) {
    if (bits_per_amplitude < 1 || bits_per_amplitude > 7)
        throw std::invalid_argument("labeling width must be in 1..7");
    AmplitudeLabeling lab;
    lab.bits = bits_per_amplitude;
    size_t n = static_cast<size_t>(1) << bits_per_amplitude;
    lab.pattern_to_amp.resize(n);
    lab.index_to_pattern.resize(n);
    for (size_t i = 0; i < n; ++i) {
        uint32_t pattern = binary_to_gray(static_cast<uint32_t>(i));
        lab.index_to_pattern[i] = pattern;
        lab.pattern_to_amp[pattern] = static_cast<int>(2 * i + 1);
    }
    return lab;
}

void Pmf::validate() const {
    double s = 0;
    for (double x : p) {
        if (!(x >= 0))
            throw std::invalid_argument("negative pmf entry");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("pmf does not sum to 1");
}

Pmf RationalPmf::to_pmf() const {
    Pmf out;
    out.p.reserve(p.size());
    for (const auto& q : p)
        out.p.push_back(q.get_d());
    return out;
}

void RationalPmf::validate() const {
    Rational s = 0;
    for (const auto& q : p) {
        if (q < 0)
            throw std::invalid_argument("negative pmf entry");
        s += q;
    }
    if (s != 1)
        throw std::invalid_argument("rational pmf does not sum to 1");
}

Pmf mb_pmf(double lambda, const AmplitudeAlphabet& alphabet) {
    if (!(lambda >= 0))
        throw std::invalid_argument("MB lambda must be >= 0");
    Pmf pmf;
    pmf.p.resize(alphabet.amplitudes.size());
    double z = 0;
    for (size_t i = 0; i < pmf.p.size(); ++i) {
        double a = alphabet.amplitudes[i];
        pmf.p[i] = std::exp(-lambda * a * a);
        z += pmf.p[i];
    }
    for (double& x : pmf.p)
        x /= z;
    return pmf;
}

double pmf_energy_1d(const Pmf& pmf, const AmplitudeAlphabet& alphabet) {
    double e = 0;
    for (size_t i = 0; i < pmf.p.size(); ++i) {
        double a = alphabet.amplitudes[i];
        e += pmf.p[i] * a * a;
    }
    return e;
}

Rational pmf_energy_1d(const RationalPmf& pmf, const AmplitudeAlphabet& alphabet) {
    Rational e = 0;
    for (size_t i = 0; i < pmf.p.size(); ++i) {
        long a = alphabet.amplitudes[i];
        e += pmf.p[i] * Rational(a * a);
    }
    return e;
}

double pmf_entropy(const Pmf& pmf) {
    double h = 0;
    for (double x : pmf.p)
        if (x > 0)
            h -= x * std::log2(x);
    return h;
}

namespace {

// Both targets are strictly decreasing in lambda.
double bisect_lambda(double target, double (*value)(double, const AmplitudeAlphabet&),
                     const AmplitudeAlphabet& alphabet) {
    double lo = 0.0, hi = 1.0;
    while (value(hi, alphabet) > target && hi < 1e6)
        hi *= 2;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (value(mid, alphabet) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15)
            break;
    }
    return 0.5 * (lo + hi);
}

double entropy2d_at(double lambda, const AmplitudeAlphabet& a) { return pmf_entropy_2d(mb_pmf(lambda, a)); }
double energy1d_at(double lambda, const AmplitudeAlphabet& a) { return pmf_energy_1d(mb_pmf(lambda, a), a); }

} // namespace

double solve_mb_lambda_for_entropy_2d(double target, const AmplitudeAlphabet& alphabet) {
    double max_h = pmf_entropy_2d(mb_pmf(0.0, alphabet));
    if (target > max_h || target < 2.0)
        throw std::invalid_argument("target entropy out of range");
    double lam = bisect_lambda(target, &entropy2d_at, alphabet);
    if (std::abs(entropy2d_at(lam, alphabet) - target) > 1e-10)
        throw std::runtime_error("MB entropy solve did not converge");
    return lam;
}

double solve_mb_lambda_for_energy_1d(double target, const AmplitudeAlphabet& alphabet) {
    double max_e = pmf_energy_1d(mb_pmf(0.0, alphabet), alphabet);
    if (target > max_e || target < 1.0)
        throw std::invalid_argument("target energy out of range");
    double lam = bisect_lambda(target, &energy1d_at, alphabet);
    if (std::abs(energy1d_at(lam, alphabet) - target) > 1e-10)
        throw std::runtime_error("MB energy solve did not converge");
    return lam;
}

} // namespace pslink
