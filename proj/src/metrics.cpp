#include "pslink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "pslink/bits.hpp"

namespace pslink {

void ShapingRates::validate() const {
    if (qam_bits <= 0 || dm_word_pam_len <= 0 || code_rate <= 0 || code_rate > 1)
        throw std::invalid_argument("bad shaping rates");
    if (dm_word_pam_len % 2 != 0)
        throw std::invalid_argument("N_s must be even");
    double payload = code_rate * qam_bits * dm_word_pam_len / 2.0;
    if (dm_input_bits > payload + 1.0)
        throw std::invalid_argument("N_u exceeds FEC payload");
}

double information_rate(const ShapingRates& r) {
    r.validate();
    double rate = r.dm_input_bits / (r.dm_word_pam_len / 2.0);
    double cap = r.entropy_2d - (1.0 - r.code_rate) * r.qam_bits;
    if (rate > cap + 1e-9)
        throw std::invalid_argument("information rate exceeds H(X) - (1-Rc) m");
    return rate;
}

double rate_loss(const ShapingRates& r) {
    r.validate();
    double loss = r.entropy_2d - (1.0 - r.code_rate) * r.qam_bits - r.dm_input_bits / (r.dm_word_pam_len / 2.0);
    if (loss < -1e-9)
        throw std::invalid_argument("negative rate loss");
    return std::max(loss, 0.0);
}

double constellation_gain_db(double beta_2d, double energy_2d, double d_min) {
    if (!(energy_2d > 0) || !(d_min > 0))
        throw std::invalid_argument("bad gain arguments");
    double g = d_min * d_min * (std::pow(2.0, beta_2d) - 1.0) / (6.0 * energy_2d);
    return 10.0 * std::log10(g);
}

namespace {

double h_binary_from_probs(double p0, double p1) {
    double s = p0 + p1;
    double h = 0;
    if (p0 > 0)
        h -= (p0 / s) * std::log2(p0 / s);
    if (p1 > 0)
        h -= (p1 / s) * std::log2(p1 / s);
    return h;
}

} // namespace

AirEstimate air_bmd(const Pmf& pmf, const AmplitudeLabeling& labeling, double snr_db, const AirConfig& cfg) {
    if (std::isnan(snr_db))
        throw std::invalid_argument("SNR is NaN");
    pmf.validate();
    if (pmf.p.size() != labeling.pattern_to_amp.size())
        throw std::invalid_argument("pmf/labeling size mismatch");

    int amp_bits = labeling.bits;
    int levels = amp_bits + 1; // sign + amplitude bits per rail
    size_t na = pmf.p.size();
    double h2d = pmf_entropy_2d(pmf);

    AirEstimate est;
    if (std::isinf(snr_db) && snr_db > 0) {
        est.value = h2d;
        est.std_err = 0;
        est.samples = 0;
        return est;
    }

    AmplitudeAlphabet alphabet = AmplitudeAlphabet::for_bits(amp_bits);
    double e1d = pmf_energy_1d(pmf, alphabet);
    double sigma2 = e1d * std::pow(10.0, -snr_db / 10.0); // per dimension (Es/N0 per 2D)
    double sigma = std::sqrt(sigma2);

    // signed constellation with PAS probabilities P(x) = P(|x|)/2
    std::vector<double> xs(2 * na), px(2 * na);
    std::vector<uint32_t> lab(2 * na); // sign bit (MSB) then amplitude pattern
    for (size_t i = 0; i < na; ++i) {
        uint32_t pat = labeling.pattern_of_index(static_cast<int>(i));
        xs[i] = alphabet.amplitudes[i];
        px[i] = pmf.p[i] / 2;
        lab[i] = pat; // sign bit 0 -> +
        xs[na + i] = -alphabet.amplitudes[i];
        px[na + i] = pmf.p[i] / 2;
        lab[na + i] = (1u << amp_bits) | pat;
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // cumulative for sampling x
    std::vector<double> cdf(px.size());
    double acc = 0;
    for (size_t i = 0; i < px.size(); ++i) {
        acc += px[i];
        cdf[i] = acc;
    }

    double sum = 0, sum2 = 0;
    std::vector<double> p0(levels), p1(levels);
    for (long s = 0; s < cfg.samples; ++s) {
        double u = unif(rng) * acc;
        size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (idx >= xs.size())
            idx = xs.size() - 1;
        double y = xs[idx] + sigma * normal(rng);

        std::fill(p0.begin(), p0.end(), 0.0);
        std::fill(p1.begin(), p1.end(), 0.0);
        double m = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < xs.size(); ++j)
            m = std::min(m, (y - xs[j]) * (y - xs[j]));
        for (size_t j = 0; j < xs.size(); ++j) {
            double w = px[j] * std::exp(-((y - xs[j]) * (y - xs[j]) - m) / (2 * sigma2));
            for (int b = 0; b < levels; ++b) {
                if ((lab[j] >> (levels - 1 - b)) & 1u)
                    p1[b] += w;
                else
                    p0[b] += w;
            }
        }
        // -log2 P(b_true | y) summed over levels
        double t = 0;
        for (int b = 0; b < levels; ++b) {
            bool bit = (lab[idx] >> (levels - 1 - b)) & 1u;
            double num = bit ? p1[b] : p0[b];
            double den = p0[b] + p1[b];
            t += -std::log2(num / den);
        }
        sum += t;
        sum2 += t * t;
    }
    double mean = sum / cfg.samples;
    double var = std::max(0.0, sum2 / cfg.samples - mean * mean);
    // per 2D: two independent rails
    est.value = h2d - 2.0 * mean;
    est.std_err = 2.0 * std::sqrt(var / cfg.samples);
    est.samples = cfg.samples;
    return est;
}

void NgmiAccumulator::add(int bit_level, uint8_t bit, double llr) {
    if (bit_level > static_cast<int>(sum_bits.size())) {
        sum_bits.resize(static_cast<size_t>(bit_level), 0.0);
        count.resize(static_cast<size_t>(bit_level), 0);
    }
    double la = (bit ? -llr : llr);
    double v;
    if (la > 30)
        v = std::exp(-la) / std::log(2.0); // log2(1+x) ~ x/ln2
    else
        v = std::log2(1.0 + std::exp(-la));
    sum_bits[static_cast<size_t>(bit_level - 1)] += v;
    count[static_cast<size_t>(bit_level - 1)] += 1;
}

void NgmiAccumulator::merge(const NgmiAccumulator& o) {
    if (o.sum_bits.size() > sum_bits.size()) {
        sum_bits.resize(o.sum_bits.size(), 0.0);
        count.resize(o.count.size(), 0);
    }
    for (size_t i = 0; i < o.sum_bits.size(); ++i) {
        sum_bits[i] += o.sum_bits[i];
        count[i] += o.count[i];
    }
}

double NgmiAccumulator::ngmi(double entropy_2d, int m) const {
    double cond = 0;
    for (size_t i = 0; i < sum_bits.size(); ++i)
        if (count[i] > 0)
            cond += sum_bits[i] / static_cast<double>(count[i]);
    double gmi = entropy_2d - cond;
    return 1.0 - (entropy_2d - gmi) / m;
}

double estimate_ngmi(std::span<const LlrSample> samples, double entropy_2d, int m) {
    if (samples.empty())
        throw std::invalid_argument("empty sample set");
    NgmiAccumulator acc;
    for (const auto& s : samples)
        acc.add(s.bit_level, s.bit, s.llr);
    return acc.ngmi(entropy_2d, m);
}

void AsiAccumulator::add(int bit_level, uint8_t bit, int quantized_llr) {
    counts[{bit_level, quantized_llr}][bit & 1] += 1;
}

void AsiAccumulator::merge(const AsiAccumulator& o) {
    for (const auto& [key, c] : o.counts) {
        auto& mine = counts[key];
        mine[0] += c[0];
        mine[1] += c[1];
    }
}

double AsiAccumulator::asi() const {
    std::map<int, long> level_totals;
    for (const auto& [key, c] : counts)
        level_totals[key.first] += c[0] + c[1];
    if (level_totals.empty())
        throw std::invalid_argument("empty sample set");
    double sum_h = 0;
    for (const auto& [key, c] : counts) {
        long n = level_totals[key.first];
        double w = static_cast<double>(c[0] + c[1]) / static_cast<double>(n);
        sum_h += w * h_binary_from_probs(static_cast<double>(c[0]), static_cast<double>(c[1])) /
                 static_cast<double>(level_totals.size());
    }
    return 1.0 - sum_h;
}

namespace {

// quantile-binned conditional entropy H(B|L) for one level, Miller-Madow corrected
double level_cond_entropy_binned(std::vector<std::pair<double, uint8_t>>& lv) {
    const int kBins = 64;
    long n = static_cast<long>(lv.size());
    // bin |L| by quantiles, separate sign(L); L == 0 gets its own cell
    std::vector<double> mags;
    mags.reserve(lv.size());
    for (auto& [l, b] : lv)
        mags.push_back(std::abs(l));
    std::sort(mags.begin(), mags.end());
    auto bin_of = [&](double l) -> int {
        if (l == 0)
            return 0;
        double m = std::abs(l);
        size_t r = std::lower_bound(mags.begin(), mags.end(), m) - mags.begin();
        int q = static_cast<int>(static_cast<long long>(r) * kBins / static_cast<long long>(mags.size()));
        q = std::min(q, kBins - 1);
        return (l > 0) ? (1 + q) : -(1 + q);
    };
    std::map<int, std::array<long, 2>> cell;
    for (auto& [l, b] : lv)
        cell[bin_of(l)][b & 1] += 1;
    double h_joint = 0, h_l = 0;
    long k_joint = 0, k_l = 0;
    for (auto& [bin, c] : cell) {
        long tot = c[0] + c[1];
        double pl = static_cast<double>(tot) / n;
        h_l -= pl * std::log2(pl);
        k_l += 1;
        for (int b = 0; b < 2; ++b) {
            if (c[b] > 0) {
                double pj = static_cast<double>(c[b]) / n;
                h_joint -= pj * std::log2(pj);
                k_joint += 1;
            }
        }
    }
    const double ln2 = std::log(2.0);
    h_joint += static_cast<double>(k_joint - 1) / (2.0 * n * ln2);
    h_l += static_cast<double>(k_l - 1) / (2.0 * n * ln2);
    return std::max(0.0, h_joint - h_l);
}

} // namespace

double estimate_asi(std::span<const LlrSample> samples) {
    if (samples.empty())
        throw std::invalid_argument("empty sample set");
    bool all_integral = true;
    int max_level = 0;
    for (const auto& s : samples) {
        max_level = std::max(max_level, s.bit_level);
        if (s.llr != std::floor(s.llr) || std::abs(s.llr) > 1e6)
            all_integral = false;
    }
    if (all_integral) {
        AsiAccumulator acc;
        for (const auto& s : samples)
            acc.add(s.bit_level, s.bit, static_cast<int>(s.llr));
        return acc.asi();
    }
    // group by level, quantile-bin each
    std::vector<std::vector<std::pair<double, uint8_t>>> per_level(static_cast<size_t>(max_level));
    for (const auto& s : samples)
        per_level[static_cast<size_t>(s.bit_level - 1)].push_back({s.llr, s.bit});
    double sum_h = 0;
    int m = 0;
    for (auto& lv : per_level) {
        if (lv.empty())
            continue;
        sum_h += level_cond_entropy_binned(lv);
        m += 1;
    }
    return 1.0 - sum_h / m;
}

} // namespace pslink
