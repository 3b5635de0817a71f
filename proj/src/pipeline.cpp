#include "pslink/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pslink {

long FramePlan::client_bits_per_group() const {
    if (layout == FrameLayout::BicmUniform)
        return static_cast<long>(codewords_per_group) * code.k;
    return static_cast<long>(dm_words_per_group) * dm.info_bits_per_word +
           static_cast<long>(codewords_per_group) * unshaped_per_codeword;
}

long FramePlan::ps_bit_index(int sym, int rail, int level) const {
    int half = qam_bits / 2;
    int sbps = dm.shaped_bits_per_symbol;
    long sq = qam_per_codeword;
    int amp_bits = half - 1;
    int ua = amp_bits - sbps;
    if (level == 1) {
        long base2 = static_cast<long>(amp_bits) * 2 * sq;
        long payload_signs = code.k - base2;
        long ss = 2L * sym + rail;
        return ss < payload_signs ? base2 + ss : code.k + (ss - payload_signs);
    }
    if (level <= 1 + sbps) {
        long base = static_cast<long>(ua) * 2 * sq;
        return base + 2L * sbps * sym + static_cast<long>(sbps) * rail + (level - 2);
    }
    long rank = half - level; // least significant level at rank 0
    return rank * 2 * sq + 2L * sym + rail;
}

std::pair<int, long> FramePlan::shaped_slot(long p) const {
    int ua = (qam_bits / 2 - 1) - dm.shaped_bits_per_symbol;
    long base = static_cast<long>(ua) * 2 * qam_per_codeword;
    if (layout == FrameLayout::CcdmParallel) {
        int cw = static_cast<int>(p % codewords_per_group);
        return {cw, base + p / codewords_per_group};
    }
    int cw = static_cast<int>(p / shaped_per_codeword);
    return {cw, base + p % shaped_per_codeword};
}

long FramePlan::unshaped_payload_index(long j) const {
    int ua = (qam_bits / 2 - 1) - dm.shaped_bits_per_symbol;
    long amp_unshaped = static_cast<long>(ua) * 2 * qam_per_codeword;
    if (j < amp_unshaped)
        return j;
    return amp_unshaped + shaped_per_codeword + (j - amp_unshaped);
}

std::pair<long, int> FramePlan::bicm_slot(int cw, long i) const {
    long t = (i < code.k) ? i * codewords_per_group + cw
                          : static_cast<long>(codewords_per_group) * code.k + (i - code.k) * codewords_per_group + cw;
    return {t % group_symbols, qam_bits - static_cast<int>(t / group_symbols)};
}

long FramePlan::client_of_word_bit(long word, long bit) const {
    return word * dm.info_bits_per_word + bit;
}

long FramePlan::client_of_unshaped(int cw, long j) const {
    return static_cast<long>(dm_words_per_group) * dm.info_bits_per_word +
           static_cast<long>(cw) * unshaped_per_codeword + j;
}

FramePlan build_frame_plan(FrameLayout layout, CodeGeometry code, int qam_bits, const DmGeometry& dm) {
    if (code.n <= 0 || code.k <= 0 || code.k >= code.n)
        throw std::invalid_argument("bad code geometry");
    FramePlan plan;
    plan.layout = layout;
    plan.code = code;
    plan.qam_bits = qam_bits;
    plan.dm = dm;

    if (layout == FrameLayout::BicmUniform) {
        if (qam_bits < 2)
            throw std::invalid_argument("bad qam bits");
        long g = qam_bits / std::gcd(static_cast<long>(code.n), static_cast<long>(qam_bits));
        plan.codewords_per_group = dm.codewords_per_group ? dm.codewords_per_group : static_cast<int>(g);
        if (plan.codewords_per_group % g != 0)
            throw std::invalid_argument("codewords per group must be a multiple of " + std::to_string(g));
        plan.group_symbols = static_cast<long>(plan.codewords_per_group) * code.n / qam_bits;
        plan.dm_words_per_group = 0;
        plan.unshaped_per_codeword = code.k;
        return plan;
    }

    if (qam_bits < 4 || qam_bits % 2 != 0)
        throw std::invalid_argument("PS layouts need even qam bits >= 4");
    if (code.n % qam_bits != 0)
        throw std::invalid_argument("codeword length not a multiple of qam bits");
    if (dm.shaped_bits_per_word <= 0 || dm.shaped_bits_per_symbol <= 0 || dm.info_bits_per_word <= 0)
        throw std::invalid_argument("PS layouts need DM geometry");
    int amp_bits = qam_bits / 2 - 1;
    if (dm.shaped_bits_per_symbol > amp_bits)
        throw std::invalid_argument("more shaped levels than amplitude bits");

    plan.qam_per_codeword = code.n / qam_bits;
    plan.shaped_per_codeword = static_cast<long>(dm.shaped_bits_per_symbol) * 2 * plan.qam_per_codeword;
    long parity = code.n - code.k;
    long sign_positions = 2L * plan.qam_per_codeword;
    if (parity > sign_positions)
        throw std::invalid_argument("parity does not fit on sign positions");
    long amp_positions = static_cast<long>(amp_bits) * 2 * plan.qam_per_codeword;
    plan.unshaped_per_codeword = code.k - plan.shaped_per_codeword;
    if (plan.unshaped_per_codeword < 0)
        throw std::invalid_argument("shaped bits exceed payload");
    if (code.k <= amp_positions)
        throw std::invalid_argument("payload does not cover amplitude bits");

    long l = std::lcm(plan.shaped_per_codeword, dm.shaped_bits_per_word);
    long g_min = l / plan.shaped_per_codeword;
    long w_min = l / dm.shaped_bits_per_word;
    long g = dm.codewords_per_group ? dm.codewords_per_group : g_min;
    if (g % g_min != 0)
        throw std::invalid_argument("codewords per group must be a multiple of " + std::to_string(g_min));
    plan.codewords_per_group = static_cast<int>(g);
    plan.dm_words_per_group = static_cast<int>(w_min * (g / g_min));
    plan.group_symbols = g * plan.qam_per_codeword;
    // exact fit: W * shaped_bits_per_word == G * shaped_per_codeword
    if (static_cast<long>(plan.dm_words_per_group) * dm.shaped_bits_per_word !=
        g * plan.shaped_per_codeword)
        throw std::invalid_argument("non-divisible shaped geometry");
    return plan;
}

double awgn_sigma2_per_dim(double energy_2d, double snr_db) {
    if (std::isnan(snr_db))
        throw std::invalid_argument("SNR is NaN");
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0;
    return energy_2d * std::pow(10.0, -snr_db / 10.0) / 2.0;
}

double NormalGen::operator()() {
    if (have_) {
        have_ = false;
        return spare_;
    }
    double u1 = ((rng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    double u2 = ((rng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
}

std::vector<double> pam_posterior_llrs(double y, const Pmf& prior, const AmplitudeLabeling& labeling,
                                       double noise_var) {
    size_t na = prior.p.size();
    int levels = labeling.bits + 1;
    std::vector<double> p0(static_cast<size_t>(levels), 0.0), p1(static_cast<size_t>(levels), 0.0);
    if (noise_var <= 0) {
        // saturated: decide from the nearest constellation point
        double best = 1e300;
        uint32_t best_label = 0;
        for (size_t i = 0; i < na; ++i) {
            double a = 2.0 * i + 1.0;
            uint32_t pat = labeling.pattern_of_index(static_cast<int>(i));
            for (int s = 0; s < 2; ++s) {
                double x = s ? -a : a;
                double d = (y - x) * (y - x);
                if (d < best) {
                    best = d;
                    best_label = (static_cast<uint32_t>(s) << labeling.bits) | pat;
                }
            }
        }
        std::vector<double> out(static_cast<size_t>(levels));
        for (int b = 0; b < levels; ++b)
            out[static_cast<size_t>(b)] = ((best_label >> (levels - 1 - b)) & 1u) ? -1e9 : 1e9;
        return out;
    }
    double mind = 1e300;
    for (size_t i = 0; i < na; ++i) {
        double a = 2.0 * i + 1.0;
        mind = std::min(mind, std::min((y - a) * (y - a), (y + a) * (y + a)));
    }
    for (size_t i = 0; i < na; ++i) {
        double a = 2.0 * i + 1.0;
        uint32_t pat = labeling.pattern_of_index(static_cast<int>(i));
        for (int s = 0; s < 2; ++s) {
            double x = s ? -a : a;
            uint32_t label = (static_cast<uint32_t>(s) << labeling.bits) | pat;
            double w = (prior.p[i] / 2.0) * std::exp(-((y - x) * (y - x) - mind) / (2.0 * noise_var));
            for (int b = 0; b < levels; ++b) {
                if ((label >> (levels - 1 - b)) & 1u)
                    p1[static_cast<size_t>(b)] += w;
                else
                    p0[static_cast<size_t>(b)] += w;
            }
        }
    }
    std::vector<double> out(static_cast<size_t>(levels));
    for (int b = 0; b < levels; ++b) {
        double n0 = p0[static_cast<size_t>(b)], n1 = p1[static_cast<size_t>(b)];
        if (n0 <= 0)
            out[static_cast<size_t>(b)] = -1e9;
        else if (n1 <= 0)
            out[static_cast<size_t>(b)] = 1e9;
        else
            out[static_cast<size_t>(b)] = std::log(n0) - std::log(n1);
    }
    return out;
}

namespace {

int8_t quantize_llr(double l, int clip) {
    double r = std::nearbyint(l);
    if (r > clip)
        r = clip;
    if (r < -clip)
        r = -clip;
    return static_cast<int8_t>(r);
}

} // namespace

PamDemapper::PamDemapper(const Pmf& prior, const AmplitudeLabeling& labeling, double noise_var, int in_bits,
                         int out_bits) {
    if (in_bits < 2 || in_bits > 16 || out_bits < 2 || out_bits > 8)
        throw std::invalid_argument("bad quantizer widths");
    levels_ = labeling.bits + 1;
    grid_ = 1 << in_bits;
    clip_ = (1 << (out_bits - 1)) - 1;
    double max_amp = 2.0 * static_cast<double>(prior.p.size()) - 1.0;
    double range = max_amp + 4.0 * std::sqrt(std::max(noise_var, 0.0));
    lo_ = -range;
    step_ = 2.0 * range / (grid_ - 1);
    raw_.resize(static_cast<size_t>(grid_) * levels_);
    q_.resize(raw_.size());
    for (int gidx = 0; gidx < grid_; ++gidx) {
        auto l = pam_posterior_llrs(grid_value(gidx), prior, labeling, noise_var);
        for (int b = 0; b < levels_; ++b) {
            raw_[static_cast<size_t>(gidx) * levels_ + b] = static_cast<float>(l[static_cast<size_t>(b)]);
            q_[static_cast<size_t>(gidx) * levels_ + b] = quantize_llr(l[static_cast<size_t>(b)], clip_);
        }
    }
}

int PamDemapper::quantize(double y) const {
    int idx = static_cast<int>(std::nearbyint((y - lo_) / step_));
    return std::clamp(idx, 0, grid_ - 1);
}

CrossQamDemapper::CrossQamDemapper(const CrossQam128& qam, double noise_var, int in_bits, int out_bits) {
    grid_ = 1 << in_bits;
    clip_ = (1 << (out_bits - 1)) - 1;
    double range = 11.0 + 4.0 * std::sqrt(std::max(noise_var, 0.0));
    lo_ = -range;
    step_ = 2.0 * range / (grid_ - 1);
    raw_.resize(static_cast<size_t>(grid_) * grid_ * CrossQam128::kBits);
    q_.resize(raw_.size());
    std::vector<std::pair<double, double>> pts(CrossQam128::kPoints);
    std::vector<uint32_t> labels(CrossQam128::kPoints);
    for (int i = 0; i < CrossQam128::kPoints; ++i) {
        pts[static_cast<size_t>(i)] = qam.point(i);
        labels[static_cast<size_t>(i)] = qam.label_of(i);
    }
    for (int gx = 0; gx < grid_; ++gx) {
        double x = lo_ + step_ * gx;
        for (int gy = 0; gy < grid_; ++gy) {
            double y = lo_ + step_ * gy;
            double p0[CrossQam128::kBits] = {0}, p1[CrossQam128::kBits] = {0};
            size_t base = (static_cast<size_t>(gx) * grid_ + gy) * CrossQam128::kBits;
            if (noise_var <= 0) {
                double best = 1e300;
                uint32_t bl = 0;
                for (int i = 0; i < CrossQam128::kPoints; ++i) {
                    double d = (x - pts[static_cast<size_t>(i)].first) * (x - pts[static_cast<size_t>(i)].first) +
                               (y - pts[static_cast<size_t>(i)].second) * (y - pts[static_cast<size_t>(i)].second);
                    if (d < best) {
                        best = d;
                        bl = labels[static_cast<size_t>(i)];
                    }
                }
                for (int b = 0; b < CrossQam128::kBits; ++b) {
                    bool one = (bl >> (CrossQam128::kBits - 1 - b)) & 1u;
                    raw_[base + static_cast<size_t>(b)] = one ? -1e9f : 1e9f;
                    q_[base + static_cast<size_t>(b)] = static_cast<int8_t>(one ? -clip_ : clip_);
                }
                continue;
            }
            double mind = 1e300;
            for (int i = 0; i < CrossQam128::kPoints; ++i) {
                double d = (x - pts[static_cast<size_t>(i)].first) * (x - pts[static_cast<size_t>(i)].first) +
                           (y - pts[static_cast<size_t>(i)].second) * (y - pts[static_cast<size_t>(i)].second);
                if (d < mind)
                    mind = d;
            }
            for (int i = 0; i < CrossQam128::kPoints; ++i) {
                double d = (x - pts[static_cast<size_t>(i)].first) * (x - pts[static_cast<size_t>(i)].first) +
                           (y - pts[static_cast<size_t>(i)].second) * (y - pts[static_cast<size_t>(i)].second);
                double w = std::exp(-(d - mind) / (2.0 * noise_var));
                uint32_t lbl = labels[static_cast<size_t>(i)];
                for (int b = 0; b < CrossQam128::kBits; ++b) {
                    if ((lbl >> (CrossQam128::kBits - 1 - b)) & 1u)
                        p1[b] += w;
                    else
                        p0[b] += w;
                }
            }
            for (int b = 0; b < CrossQam128::kBits; ++b) {
                double l;
                if (p0[b] <= 0)
                    l = -1e9;
                else if (p1[b] <= 0)
                    l = 1e9;
                else
                    l = std::log(p0[b]) - std::log(p1[b]);
                raw_[base + static_cast<size_t>(b)] = static_cast<float>(l);
                q_[base + static_cast<size_t>(b)] = quantize_llr(l, clip_);
            }
        }
    }
}

int CrossQamDemapper::quantize(double v) const {
    int idx = static_cast<int>(std::nearbyint((v - lo_) / step_));
    return std::clamp(idx, 0, grid_ - 1);
}

void SimConfig::validate() const {
    if (!seed)
        throw std::invalid_argument("seed is mandatory");
    if (snr_db.empty())
        throw std::invalid_argument("no SNR points");
    if (code.n <= 0)
        throw std::invalid_argument("no code");
    if (otuc_n < 1 || demap_in_bits < 2 || demap_out_bits < 2)
        throw std::invalid_argument("widths and block sizes must be positive");
    if (layout != FrameLayout::BicmUniform) {
        if (!dm)
            throw std::invalid_argument("PS layout needs a DM codec");
        if (amplitude_pmf.p.empty())
            throw std::invalid_argument("PS layout needs demap priors");
    }
}

namespace {

struct GroupStats {
    long codewords = 0;
    long prefec_err = 0, prefec_bits = 0;
    long postfec_err = 0, payload_bits = 0;
    long frame_err = 0;
    long postinv_err = 0, client_bits = 0;
    std::vector<long> block_ids;
    NgmiAccumulator ngmi;
    AsiAccumulator asi;
};

struct Scratch {
    std::vector<BitVec> payload, codeword, decoded;
    std::vector<std::vector<float>> llr;
    BitVec client, client_rx;
    std::vector<BitVec> word_shaped;
    std::vector<int> sym_grid_x, sym_grid_y;
    std::vector<uint32_t> sym_label;
};

void fill_random_bits(BitVec& v, std::mt19937_64& rng) {
    size_t i = 0;
    while (i < v.size()) {
        uint64_t w = rng();
        for (int b = 0; b < 64 && i < v.size(); ++b, ++i)
            v[i] = static_cast<uint8_t>((w >> b) & 1u);
    }
}

} // namespace

Pmf hidm_amplitude_pmf(const HidmCodec& codec) { return codec.amplitude_pmf().to_pmf(); }

Pmf ccdm_amplitude_pmf(const CcdmBitCodec& codec) {
    const auto& counts = codec.codec().composition().counts;
    long n = codec.codec().composition().word_len();
    Pmf pmf;
    pmf.p.resize(counts.size() * 2);
    for (size_t c = 0; c < counts.size(); ++c) {
        double half = static_cast<double>(counts[c]) / (2.0 * n);
        pmf.p[2 * c] = half;
        pmf.p[2 * c + 1] = half;
    }
    return pmf;
}

SimResult run_link(const SimConfig& cfg) {
    cfg.validate();
    const bool bicm = cfg.layout == FrameLayout::BicmUniform;
    const int m = bicm ? CrossQam128::kBits : 2 * (static_cast<int>([&] {
        // amplitude bits implied by the prior table
        size_t n = cfg.amplitude_pmf.p.size();
        int b = 0;
        while ((size_t(1) << b) < n)
            ++b;
        if ((size_t(1) << b) != n)
            throw std::invalid_argument("prior size must be a power of two");
        return b;
    }()) + 1);

    DmGeometry geom;
    if (!bicm) {
        geom.shaped_bits_per_word = cfg.dm->shaped_bits();
        geom.shaped_bits_per_symbol = cfg.dm->shaped_bits_per_symbol();
        geom.info_bits_per_word = cfg.dm->info_bits();
    }
    FramePlan plan = build_frame_plan(cfg.layout, {cfg.code.n, cfg.code.k}, m, geom);

    AmplitudeLabeling labeling;
    double energy_2d, entropy_2d;
    CrossQam128 qam;
    if (bicm) {
        energy_2d = qam.energy_2d();
        entropy_2d = m;
    } else {
        labeling = build_reflected_gray_labeling(m / 2 - 1);
        AmplitudeAlphabet alphabet = AmplitudeAlphabet::for_bits(m / 2 - 1);
        energy_2d = pmf_energy_2d(cfg.amplitude_pmf, alphabet);
        entropy_2d = pmf_entropy_2d(cfg.amplitude_pmf);
    }

    int workers = cfg.workers;
    if (workers <= 0) {
        if (const char* env = std::getenv("PSLINK_WORKERS"))
            workers = std::atoi(env);
        if (workers <= 0)
            workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0)
            workers = 1;
    }

    const long cpg = plan.client_bits_per_group();
    const long block_bits = 130560L * cfg.otuc_n;
    const int G = plan.codewords_per_group;
    const int W = plan.dm_words_per_group;
    const int sq = plan.qam_per_codeword;
    const int half = m / 2;

    SimResult result;
    result.plan = plan;

    std::vector<LdpcDecoder> decoders;
    decoders.reserve(static_cast<size_t>(workers));
    for (int i = 0; i < workers; ++i)
        decoders.emplace_back(cfg.code, cfg.decode);
    std::vector<Scratch> scratch(static_cast<size_t>(workers));

    for (size_t snr_idx = 0; snr_idx < cfg.snr_db.size(); ++snr_idx) {
        double snr = cfg.snr_db[snr_idx];
        double sigma2 = awgn_sigma2_per_dim(energy_2d, snr);
        double sigma = std::sqrt(sigma2);

        std::unique_ptr<PamDemapper> pam_demap;
        std::unique_ptr<CrossQamDemapper> qam_demap;
        if (bicm)
            qam_demap = std::make_unique<CrossQamDemapper>(qam, sigma2, cfg.demap_in_bits, cfg.demap_out_bits);
        else
            pam_demap = std::make_unique<PamDemapper>(cfg.amplitude_pmf, labeling, sigma2, cfg.demap_in_bits,
                                                      cfg.demap_out_bits);

        auto run_group = [&](long group_idx, int worker, GroupStats& st) {
            Scratch& sc = scratch[static_cast<size_t>(worker)];
            NormalGen gen(mix_seed(*cfg.seed, snr_idx, static_cast<uint64_t>(group_idx)));

            sc.client.resize(static_cast<size_t>(cpg));
            fill_random_bits(sc.client, gen.engine());

            sc.payload.assign(static_cast<size_t>(G), BitVec(static_cast<size_t>(cfg.code.k)));
            if (bicm) {
                for (int c = 0; c < G; ++c)
                    std::copy(sc.client.begin() + static_cast<long>(c) * cfg.code.k,
                              sc.client.begin() + static_cast<long>(c + 1) * cfg.code.k, sc.payload[static_cast<size_t>(c)].begin());
            } else {
                sc.word_shaped.resize(static_cast<size_t>(W));
                for (int w = 0; w < W; ++w) {
                    BitVec info(sc.client.begin() + plan.client_of_word_bit(w, 0),
                                sc.client.begin() + plan.client_of_word_bit(w, geom.info_bits_per_word));
                    sc.word_shaped[static_cast<size_t>(w)] = cfg.dm->match(info);
                }
                long lw = geom.shaped_bits_per_word;
                for (long p = 0; p < static_cast<long>(W) * lw; ++p) {
                    auto [cw, idx] = plan.shaped_slot(p);
                    sc.payload[static_cast<size_t>(cw)][static_cast<size_t>(idx)] =
                        sc.word_shaped[static_cast<size_t>(p / lw)][static_cast<size_t>(p % lw)];
                }
                for (int c = 0; c < G; ++c)
                    for (long j = 0; j < plan.unshaped_per_codeword; ++j)
                        sc.payload[static_cast<size_t>(c)][static_cast<size_t>(plan.unshaped_payload_index(j))] =
                            sc.client[static_cast<size_t>(plan.client_of_unshaped(c, j))];
            }

            sc.codeword.resize(static_cast<size_t>(G));
            for (int c = 0; c < G; ++c)
                sc.codeword[static_cast<size_t>(c)] = ldpc_encode(cfg.code, sc.payload[static_cast<size_t>(c)]);

            // map, channel, demap
            sc.llr.assign(static_cast<size_t>(G), std::vector<float>(static_cast<size_t>(cfg.code.n)));
            if (bicm) {
                sc.sym_label.assign(static_cast<size_t>(plan.group_symbols), 0);
                for (int c = 0; c < G; ++c)
                    for (long i = 0; i < cfg.code.n; ++i) {
                        auto [s, lvl] = plan.bicm_slot(c, i);
                        if (sc.codeword[static_cast<size_t>(c)][static_cast<size_t>(i)])
                            sc.sym_label[static_cast<size_t>(s)] |= 1u << (m - lvl);
                    }
                sc.sym_grid_x.resize(static_cast<size_t>(plan.group_symbols));
                sc.sym_grid_y.resize(static_cast<size_t>(plan.group_symbols));
                for (long s = 0; s < plan.group_symbols; ++s) {
                    auto [x, y] = qam.map(sc.sym_label[static_cast<size_t>(s)]);
                    sc.sym_grid_x[static_cast<size_t>(s)] = qam_demap->quantize(x + sigma * gen());
                    sc.sym_grid_y[static_cast<size_t>(s)] = qam_demap->quantize(y + sigma * gen());
                }
                for (int c = 0; c < G; ++c)
                    for (long i = 0; i < cfg.code.n; ++i) {
                        auto [s, lvl] = plan.bicm_slot(c, i);
                        int q = qam_demap->q_llr(sc.sym_grid_x[static_cast<size_t>(s)],
                                                 sc.sym_grid_y[static_cast<size_t>(s)], lvl);
                        sc.llr[static_cast<size_t>(c)][static_cast<size_t>(i)] = static_cast<float>(q);
                        uint8_t tx = sc.codeword[static_cast<size_t>(c)][static_cast<size_t>(i)];
                        st.prefec_err += ((q < 0 ? 1 : 0) != tx);
                        st.ngmi.add(lvl, tx, q);
                        st.asi.add(lvl, tx, q);
                    }
                st.prefec_bits += static_cast<long>(G) * cfg.code.n;
            } else {
                for (int c = 0; c < G; ++c) {
                    const BitVec& word = sc.codeword[static_cast<size_t>(c)];
                    auto& llr = sc.llr[static_cast<size_t>(c)];
                    for (int sym = 0; sym < sq; ++sym) {
                        for (int rail = 0; rail < 2; ++rail) {
                            uint32_t pattern = 0;
                            for (int lvl = 2; lvl <= half; ++lvl)
                                pattern = (pattern << 1) |
                                          word[static_cast<size_t>(plan.ps_bit_index(sym, rail, lvl))];
                            uint8_t sign = word[static_cast<size_t>(plan.ps_bit_index(sym, rail, 1))];
                            double x = labeling.amplitude_of(pattern) * (sign ? -1.0 : 1.0);
                            int gidx = pam_demap->quantize(x + sigma * gen());
                            for (int lvl = 1; lvl <= half; ++lvl) {
                                long bi = plan.ps_bit_index(sym, rail, lvl);
                                int q = pam_demap->q_llr(gidx, lvl);
                                llr[static_cast<size_t>(bi)] = static_cast<float>(q);
                                uint8_t tx = word[static_cast<size_t>(bi)];
                                int level_2d = rail * half + lvl;
                                st.prefec_err += ((q < 0 ? 1 : 0) != tx);
                                st.ngmi.add(level_2d, tx, q);
                                st.asi.add(level_2d, tx, q);
                            }
                        }
                    }
                }
                st.prefec_bits += static_cast<long>(G) * cfg.code.n;
            }

            // decode
            sc.decoded.resize(static_cast<size_t>(G));
            bool group_clean = true;
            for (int c = 0; c < G; ++c) {
                auto res = decoders[static_cast<size_t>(worker)].decode(sc.llr[static_cast<size_t>(c)]);
                long errs = 0;
                for (int i = 0; i < cfg.code.k; ++i)
                    errs += res.codeword[static_cast<size_t>(i)] != sc.payload[static_cast<size_t>(c)][static_cast<size_t>(i)];
                st.postfec_err += errs;
                st.frame_err += errs > 0;
                group_clean = group_clean && errs == 0;
                sc.decoded[static_cast<size_t>(c)] = std::move(res.codeword);
            }
            st.codewords += G;
            st.payload_bits += static_cast<long>(G) * cfg.code.k;
            st.client_bits += cpg;

            // inverse DM + deframe; clean groups reproduce the client exactly
            if (!group_clean) {
                long base = group_idx * cpg;
                if (bicm) {
                    for (int c = 0; c < G; ++c)
                        for (int i = 0; i < cfg.code.k; ++i)
                            if (sc.decoded[static_cast<size_t>(c)][static_cast<size_t>(i)] !=
                                sc.payload[static_cast<size_t>(c)][static_cast<size_t>(i)]) {
                                st.postinv_err += 1;
                                st.block_ids.push_back((base + static_cast<long>(c) * cfg.code.k + i) / block_bits);
                            }
                } else {
                    long lw = geom.shaped_bits_per_word;
                    BitVec shaped(static_cast<size_t>(lw));
                    for (int w = 0; w < W; ++w) {
                        bool word_dirty = false;
                        for (long b = 0; b < lw; ++b) {
                            auto [cw, idx] = plan.shaped_slot(static_cast<long>(w) * lw + b);
                            shaped[static_cast<size_t>(b)] = sc.decoded[static_cast<size_t>(cw)][static_cast<size_t>(idx)];
                            word_dirty = word_dirty ||
                                         shaped[static_cast<size_t>(b)] !=
                                             sc.word_shaped[static_cast<size_t>(w)][static_cast<size_t>(b)];
                        }
                        if (!word_dirty)
                            continue;
                        BitVec info = cfg.dm->dematch(shaped);
                        for (long b = 0; b < geom.info_bits_per_word; ++b) {
                            long t = plan.client_of_word_bit(w, b);
                            if (info[static_cast<size_t>(b)] != sc.client[static_cast<size_t>(t)]) {
                                st.postinv_err += 1;
                                st.block_ids.push_back((base + t) / block_bits);
                            }
                        }
                    }
                    for (int c = 0; c < G; ++c)
                        for (long j = 0; j < plan.unshaped_per_codeword; ++j) {
                            long pi = plan.unshaped_payload_index(j);
                            if (sc.decoded[static_cast<size_t>(c)][static_cast<size_t>(pi)] !=
                                sc.payload[static_cast<size_t>(c)][static_cast<size_t>(pi)]) {
                                st.postinv_err += 1;
                                st.block_ids.push_back((base + plan.client_of_unshaped(c, j)) / block_bits);
                            }
                        }
                }
            }
        };

        SnrPoint pt;
        pt.snr_db = snr;
        std::set<long> errored_blocks;
        NgmiAccumulator ngmi_acc;
        AsiAccumulator asi_acc;
        long next_group = 0;
        const int round = std::max(cfg.groups_per_round, workers);
        while (true) {
            if (pt.frame_errors >= cfg.target_frame_errors || pt.codewords >= cfg.max_codewords)
                break;
            std::vector<GroupStats> stats(static_cast<size_t>(round));
            std::vector<std::thread> pool;
            for (int wkr = 0; wkr < workers; ++wkr)
                pool.emplace_back([&, wkr] {
                    for (int g = wkr; g < round; g += workers)
                        run_group(next_group + g, wkr, stats[static_cast<size_t>(g)]);
                });
            for (auto& t : pool)
                t.join();
            for (int g = 0; g < round; ++g) {
                auto& st = stats[static_cast<size_t>(g)];
                pt.groups += 1;
                pt.codewords += st.codewords;
                pt.prefec_bit_errors += st.prefec_err;
                pt.prefec_bits += st.prefec_bits;
                pt.postfec_bit_errors += st.postfec_err;
                pt.payload_bits += st.payload_bits;
                pt.frame_errors += st.frame_err;
                pt.postinvdm_bit_errors += st.postinv_err;
                pt.client_bits += st.client_bits;
                errored_blocks.insert(st.block_ids.begin(), st.block_ids.end());
                ngmi_acc.merge(st.ngmi);
                asi_acc.merge(st.asi);
            }
            next_group += round;
        }
        pt.blocks_total = pt.client_bits / block_bits;
        for (long b : errored_blocks)
            if (b < pt.blocks_total)
                pt.blocks_errored += 1;
        pt.ngmi = ngmi_acc.ngmi(entropy_2d, m);
        pt.asi = asi_acc.asi();
        result.points.push_back(pt);
    }
    return result;
}

BberCount count_bber(const std::vector<long>& error_positions, long total_client_bits, int otuc_n) {
    if (otuc_n < 1)
        throw std::invalid_argument("otuc_n must be positive");
    long block_bits = 130560L * otuc_n;
    BberCount out;
    out.blocks_total = total_client_bits / block_bits;
    std::set<long> blocks;
    for (long p : error_positions) {
        if (p < 0 || p >= total_client_bits)
            throw std::invalid_argument("error position out of range");
        long b = p / block_bits;
        if (b < out.blocks_total)
            blocks.insert(b);
    }
    out.blocks_errored = static_cast<long>(blocks.size());
    return out;
}

} // namespace pslink
