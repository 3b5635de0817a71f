#include "pslink/hidm.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pslink {

std::vector<long> HidmTreeSpec::lut_counts() const {
    int L = num_layers();
    std::vector<long> T(static_cast<size_t>(L), 1);
    for (int l = L - 2; l >= 0; --l)
        T[static_cast<size_t>(l)] = T[static_cast<size_t>(l + 1)] * layers[static_cast<size_t>(l)].fan_out;
    return T;
}

long HidmTreeSpec::n_info_bits() const {
    auto T = lut_counts();
    long n = 0;
    for (int l = 0; l < num_layers(); ++l)
        n += T[static_cast<size_t>(l)] * layers[static_cast<size_t>(l)].fresh_bits;
    return n;
}

long HidmTreeSpec::n_shaped_bits() const {
    if (layers.empty())
        return 0;
    return lut_counts()[0] * layers[0].out_bits;
}

int HidmTreeSpec::n_pam_symbols() const {
    return static_cast<int>(n_shaped_bits() / shaped_bits_per_symbol());
}

void HidmTreeSpec::validate() const {
    auto fail = [](int layer, const std::string& what) {
        throw std::invalid_argument("layer " + std::to_string(layer) + ": " + what);
    };
    if (layers.empty())
        throw std::invalid_argument("tree has no layers");
    if (labeling_bits < 1 || labeling_bits > 7)
        throw std::invalid_argument("labeling width out of range");
    if (shaped_levels.empty())
        throw std::invalid_argument("no shaped levels");
    for (size_t i = 0; i < shaped_levels.size(); ++i) {
        int lvl = shaped_levels[i];
        if (lvl < 2 || lvl > labeling_bits + 1)
            throw std::invalid_argument("shaped level out of range");
        if (i > 0 && shaped_levels[i] <= shaped_levels[i - 1])
            throw std::invalid_argument("shaped levels must be strictly increasing");
    }
    int L = num_layers();
    for (int l = 0; l < L; ++l) {
        const auto& lay = layers[static_cast<size_t>(l)];
        int num = l + 1;
        if (lay.out_bits < 1 || lay.out_bits > 16)
            fail(num, "output bits out of range");
        if (lay.fresh_bits < 0 || lay.constraint_bits < 0)
            fail(num, "negative bit count");
        if (lay.in_bits() > lay.out_bits)
            fail(num, "v = r + s exceeds u (table cannot stay one-to-one)");
        if (l == L - 1) {
            if (lay.constraint_bits != 0)
                fail(num, "top layer must have r = 0");
        } else {
            if (lay.constraint_bits < 1)
                fail(num, "non-top layer needs constraint bits");
            if (lay.fan_out < 1)
                fail(num, "fan-out must be >= 1");
            if (layers[static_cast<size_t>(l + 1)].out_bits != lay.fan_out * lay.constraint_bits)
                fail(num + 1, "u must equal t*r of the layer below");
        }
    }
    if (layers[0].out_bits % shaped_bits_per_symbol() != 0)
        fail(1, "output bits not a whole number of symbols");
}

std::pair<uint64_t, uint64_t> storage_bits(const HidmTreeSpec& spec) {
    if (spec.layers.empty())
        return {0, 0};
    auto T = spec.lut_counts();
    uint64_t dm = 0, inv = 0;
    for (int l = 0; l < spec.num_layers(); ++l) {
        const auto& lay = spec.layers[static_cast<size_t>(l)];
        uint64_t t = static_cast<uint64_t>(T[static_cast<size_t>(l)]);
        dm += t * (uint64_t(1) << lay.in_bits()) * static_cast<uint64_t>(lay.out_bits);
        inv += t * (uint64_t(1) << lay.out_bits) * static_cast<uint64_t>(lay.in_bits());
    }
    return {dm, inv};
}

namespace {

struct Candidate {
    uint32_t word;
    Rational energy;
    std::vector<Rational> components; // sorted ascending
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    int c = cmp(a.energy, b.energy);
    if (c != 0)
        return c < 0;
    for (size_t i = 0; i < a.components.size(); ++i) {
        c = cmp(a.components[i], b.components[i]);
        if (c != 0)
            return c < 0;
    }
    return a.word < b.word;
}

// Expected |X|^2 per shaped pattern, unshaped amplitude bits averaged uniformly.
std::vector<Rational> shaped_pattern_energies(const HidmTreeSpec& spec, const AmplitudeLabeling& labeling) {
    int w = spec.labeling_bits;
    int sb = spec.shaped_bits_per_symbol();
    std::vector<int> shaped_pos; // bit position within the amplitude pattern, MSB first
    for (int lvl : spec.shaped_levels)
        shaped_pos.push_back(lvl - 2);
    std::vector<bool> is_shaped(static_cast<size_t>(w), false);
    for (int p : shaped_pos)
        is_shaped[static_cast<size_t>(p)] = true;
    std::vector<int> unshaped_pos;
    for (int p = 0; p < w; ++p)
        if (!is_shaped[static_cast<size_t>(p)])
            unshaped_pos.push_back(p);

    std::vector<Rational> energies(static_cast<size_t>(1) << sb);
    long fills = 1L << unshaped_pos.size();
    for (uint32_t sp = 0; sp < energies.size(); ++sp) {
        long long total = 0;
        for (long f = 0; f < fills; ++f) {
            uint32_t pattern = 0;
            for (int i = 0; i < sb; ++i)
                if ((sp >> (sb - 1 - i)) & 1u)
                    pattern |= 1u << (w - 1 - shaped_pos[static_cast<size_t>(i)]);
            for (size_t i = 0; i < unshaped_pos.size(); ++i)
                if ((f >> i) & 1)
                    pattern |= 1u << (w - 1 - unshaped_pos[i]);
            long long a = labeling.amplitude_of(pattern);
            total += a * a;
        }
        energies[sp] = Rational(total, fills);
        energies[sp].canonicalize();
    }
    return energies;
}

} // namespace

HidmCodec build_tree(const HidmTreeSpec& spec, const AmplitudeLabeling& labeling) {
    spec.validate();
    if (labeling.bits != spec.labeling_bits)
        throw std::invalid_argument("labeling width does not match tree spec");

    HidmCodec codec;
    codec.spec = spec;
    codec.labeling = labeling;
    codec.tables.resize(static_cast<size_t>(spec.num_layers()));

    int sb = spec.shaped_bits_per_symbol();
    auto pat_energy = shaped_pattern_energies(spec, labeling);

    std::vector<Rational> region_energy; // of the layer below, per constraint value
    int L = spec.num_layers();
    for (int l = 0; l < L; ++l) {
        const auto& lay = spec.layers[static_cast<size_t>(l)];
        size_t n_cand = static_cast<size_t>(1) << lay.out_bits;
        std::vector<Candidate> cands(n_cand);
        if (l == 0) {
            int g = lay.out_bits / sb;
            for (uint32_t word = 0; word < n_cand; ++word) {
                Candidate& c = cands[word];
                c.word = word;
                c.components.reserve(static_cast<size_t>(g));
                Rational sum = 0;
                for (int j = 0; j < g; ++j) {
                    uint32_t sp = (word >> (sb * (g - 1 - j))) & ((1u << sb) - 1);
                    c.components.push_back(pat_energy[sp]);
                    sum += pat_energy[sp];
                }
                c.energy = sum / g;
                std::sort(c.components.begin(), c.components.end());
            }
        } else {
            const auto& below = spec.layers[static_cast<size_t>(l - 1)];
            int t = below.fan_out;
            int r = below.constraint_bits;
            uint32_t mask = (1u << r) - 1;
            for (uint32_t word = 0; word < n_cand; ++word) {
                Candidate& c = cands[word];
                c.word = word;
                c.components.reserve(static_cast<size_t>(t));
                Rational sum = 0;
                for (int j = 0; j < t; ++j) {
                    uint32_t g = (word >> (r * (t - 1 - j))) & mask;
                    sum += region_energy[g];
                    c.components.push_back(region_energy[g]);
                }
                c.energy = sum / t;
                std::sort(c.components.begin(), c.components.end());
            }
        }
        std::sort(cands.begin(), cands.end(), candidate_less);

        size_t keep = static_cast<size_t>(1) << lay.in_bits();
        auto& table = codec.tables[static_cast<size_t>(l)];
        table.resize(keep);
        for (size_t i = 0; i < keep; ++i)
            table[i] = {cands[i].word, cands[i].energy};

        // region energies for the layer above
        size_t n_regions = static_cast<size_t>(1) << lay.constraint_bits;
        size_t region_size = keep >> lay.constraint_bits;
        region_energy.assign(n_regions, Rational(0));
        for (size_t g = 0; g < n_regions; ++g) {
            Rational sum = 0;
            for (size_t i = 0; i < region_size; ++i)
                sum += table[g * region_size + i].energy;
            region_energy[g] = sum / static_cast<long>(region_size);
        }
    }
    codec.finalize();
    return codec;
}

void HidmCodec::finalize() {
    spec.validate();
    if (tables.size() != static_cast<size_t>(spec.num_layers()))
        throw std::invalid_argument("table count does not match layer count");
    inverse_.resize(tables.size());
    for (size_t l = 0; l < tables.size(); ++l) {
        const auto& lay = spec.layers[l];
        if (tables[l].size() != static_cast<size_t>(1) << lay.in_bits())
            throw std::invalid_argument("layer " + std::to_string(l + 1) + ": table size != 2^v");
        auto& inv = inverse_[l];
        inv.assign(static_cast<size_t>(1) << lay.out_bits, -1);
        for (size_t i = 0; i < tables[l].size(); ++i) {
            uint32_t w = tables[l][i].word;
            if (w >= inv.size())
                throw std::invalid_argument("layer " + std::to_string(l + 1) + ": word wider than u");
            if (inv[w] != -1)
                throw std::invalid_argument("layer " + std::to_string(l + 1) + ": duplicate table word");
            inv[w] = static_cast<int32_t>(i);
        }
    }
}

int HidmCodec::lookup(int layer, uint32_t word) const {
    const auto& inv = inverse_[static_cast<size_t>(layer)];
    int32_t idx = inv[word];
    if (idx >= 0)
        return idx;
    // corrupted word: nearest stored entry by Hamming distance, lowest index on ties
    const auto& table = tables[static_cast<size_t>(layer)];
    int best = 0, best_d = 32;
    for (size_t i = 0; i < table.size(); ++i) {
        int d = std::popcount(table[i].word ^ word);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
            if (d == 1)
                break;
        }
    }
    return best;
}

BitVec HidmCodec::match(const BitVec& info) const {
    if (static_cast<long>(info.size()) != info_bits())
        throw std::invalid_argument("info length != N_u^sb");
    int L = spec.num_layers();
    auto T = spec.lut_counts();

    // info bits are consumed top-down, layer L first, LUT index order inside a layer
    std::vector<std::vector<uint32_t>> words(static_cast<size_t>(L));
    size_t pos = 0;
    std::vector<size_t> fresh_base(static_cast<size_t>(L));
    for (int l = L - 1; l >= 0; --l) {
        fresh_base[static_cast<size_t>(l)] = pos;
        pos += static_cast<size_t>(T[static_cast<size_t>(l)]) * spec.layers[static_cast<size_t>(l)].fresh_bits;
    }

    for (int l = L - 1; l >= 0; --l) {
        const auto& lay = spec.layers[static_cast<size_t>(l)];
        long count = T[static_cast<size_t>(l)];
        words[static_cast<size_t>(l)].resize(static_cast<size_t>(count));
        for (long j = 0; j < count; ++j) {
            uint32_t fresh = lay.fresh_bits
                                 ? pack_bits(info, fresh_base[static_cast<size_t>(l)] +
                                                       static_cast<size_t>(j) * lay.fresh_bits,
                                             lay.fresh_bits)
                                 : 0;
            uint32_t constraint = 0;
            if (l < L - 1) {
                const auto& parent_words = words[static_cast<size_t>(l + 1)];
                uint32_t pw = parent_words[static_cast<size_t>(j / lay.fan_out)];
                int slot = static_cast<int>(j % lay.fan_out);
                constraint = (pw >> (lay.constraint_bits * (lay.fan_out - 1 - slot))) &
                             ((1u << lay.constraint_bits) - 1);
            }
            uint32_t idx = (constraint << lay.fresh_bits) | fresh;
            words[static_cast<size_t>(l)][static_cast<size_t>(j)] = tables[static_cast<size_t>(l)][idx].word;
        }
    }

    BitVec out(static_cast<size_t>(shaped_bits()));
    int u1 = spec.layers[0].out_bits;
    for (long j = 0; j < T[0]; ++j)
        unpack_bits(words[0][static_cast<size_t>(j)], u1, out, static_cast<size_t>(j) * u1);
    return out;
}

BitVec HidmCodec::dematch(const BitVec& shaped) const {
    if (static_cast<long>(shaped.size()) != shaped_bits())
        throw std::invalid_argument("shaped length != T1 u1");
    int L = spec.num_layers();
    auto T = spec.lut_counts();

    BitVec info(static_cast<size_t>(info_bits()));
    size_t pos = 0;
    std::vector<size_t> fresh_base(static_cast<size_t>(L));
    for (int l = L - 1; l >= 0; --l) {
        fresh_base[static_cast<size_t>(l)] = pos;
        pos += static_cast<size_t>(T[static_cast<size_t>(l)]) * spec.layers[static_cast<size_t>(l)].fresh_bits;
    }

    std::vector<uint32_t> cur(static_cast<size_t>(T[0]));
    int u1 = spec.layers[0].out_bits;
    for (long j = 0; j < T[0]; ++j)
        cur[static_cast<size_t>(j)] = pack_bits(shaped, static_cast<size_t>(j) * u1, u1);

    for (int l = 0; l < L; ++l) {
        const auto& lay = spec.layers[static_cast<size_t>(l)];
        long count = T[static_cast<size_t>(l)];
        std::vector<uint32_t> parent;
        if (l < L - 1)
            parent.assign(static_cast<size_t>(T[static_cast<size_t>(l + 1)]), 0);
        for (long j = 0; j < count; ++j) {
            int idx = lookup(l, cur[static_cast<size_t>(j)]);
            if (lay.fresh_bits)
                unpack_bits(static_cast<uint32_t>(idx) & ((1u << lay.fresh_bits) - 1), lay.fresh_bits, info,
                            fresh_base[static_cast<size_t>(l)] + static_cast<size_t>(j) * lay.fresh_bits);
            if (l < L - 1) {
                uint32_t constraint = static_cast<uint32_t>(idx) >> lay.fresh_bits;
                int slot = static_cast<int>(j % lay.fan_out);
                parent[static_cast<size_t>(j / lay.fan_out)] |=
                    constraint << (lay.constraint_bits * (lay.fan_out - 1 - slot));
            }
        }
        cur = std::move(parent);
    }
    return info;
}

RationalPmf HidmCodec::amplitude_pmf() const {
    int w = spec.labeling_bits;
    int sb = spec.shaped_bits_per_symbol();
    size_t n_amp = static_cast<size_t>(1) << w;

    // amplitude distribution of one symbol given its shaped pattern
    std::vector<int> shaped_pos;
    for (int lvl : spec.shaped_levels)
        shaped_pos.push_back(lvl - 2);
    std::vector<bool> is_shaped(static_cast<size_t>(w), false);
    for (int p : shaped_pos)
        is_shaped[static_cast<size_t>(p)] = true;
    std::vector<int> unshaped_pos;
    for (int p = 0; p < w; ++p)
        if (!is_shaped[static_cast<size_t>(p)])
            unshaped_pos.push_back(p);
    long fills = 1L << unshaped_pos.size();

    std::vector<std::vector<Rational>> pat_vec(static_cast<size_t>(1) << sb,
                                               std::vector<Rational>(n_amp, Rational(0)));
    for (uint32_t sp = 0; sp < pat_vec.size(); ++sp) {
        for (long f = 0; f < fills; ++f) {
            uint32_t pattern = 0;
            for (int i = 0; i < sb; ++i)
                if ((sp >> (sb - 1 - i)) & 1u)
                    pattern |= 1u << (w - 1 - shaped_pos[static_cast<size_t>(i)]);
            for (size_t i = 0; i < unshaped_pos.size(); ++i)
                if ((f >> i) & 1)
                    pattern |= 1u << (w - 1 - unshaped_pos[i]);
            int amp_index = (labeling.amplitude_of(pattern) - 1) / 2;
            pat_vec[sp][static_cast<size_t>(amp_index)] += Rational(1, fills);
        }
    }

    // expected per-entry amplitude count vectors, aggregated up the tree
    int L = spec.num_layers();
    std::vector<std::vector<Rational>> region_vec;
    std::vector<std::vector<Rational>> entry_vec;
    for (int l = 0; l < L; ++l) {
        const auto& lay = spec.layers[static_cast<size_t>(l)];
        const auto& table = tables[static_cast<size_t>(l)];
        entry_vec.assign(table.size(), std::vector<Rational>(n_amp, Rational(0)));
        if (l == 0) {
            int g = lay.out_bits / sb;
            for (size_t i = 0; i < table.size(); ++i) {
                uint32_t word = table[i].word;
                for (int j = 0; j < g; ++j) {
                    uint32_t sp = (word >> (sb * (g - 1 - j))) & ((1u << sb) - 1);
                    for (size_t a = 0; a < n_amp; ++a)
                        entry_vec[i][a] += pat_vec[sp][a];
                }
            }
        } else {
            const auto& below = spec.layers[static_cast<size_t>(l - 1)];
            int t = below.fan_out;
            int r = below.constraint_bits;
            uint32_t mask = (1u << r) - 1;
            for (size_t i = 0; i < table.size(); ++i) {
                uint32_t word = table[i].word;
                for (int j = 0; j < t; ++j) {
                    uint32_t g = (word >> (r * (t - 1 - j))) & mask;
                    for (size_t a = 0; a < n_amp; ++a)
                        entry_vec[i][a] += region_vec[g][a];
                }
            }
        }
        size_t n_regions = static_cast<size_t>(1) << lay.constraint_bits;
        size_t region_size = table.size() >> lay.constraint_bits;
        region_vec.assign(n_regions, std::vector<Rational>(n_amp, Rational(0)));
        for (size_t g = 0; g < n_regions; ++g)
            for (size_t i = 0; i < region_size; ++i)
                for (size_t a = 0; a < n_amp; ++a)
                    region_vec[g][a] += entry_vec[g * region_size + i][a] / static_cast<long>(region_size);
    }

    RationalPmf pmf;
    pmf.p.assign(n_amp, Rational(0));
    long n_top = static_cast<long>(entry_vec.size());
    for (const auto& v : entry_vec)
        for (size_t a = 0; a < n_amp; ++a)
            pmf.p[a] += v[a];
    for (size_t a = 0; a < n_amp; ++a) {
        pmf.p[a] /= n_top * static_cast<long>(pam_symbols());
        pmf.p[a].canonicalize();
    }
    return pmf;
}

Rational HidmCodec::expected_energy_1d() const {
    const auto& top = tables.back();
    Rational sum = 0;
    for (const auto& e : top)
        sum += e.energy;
    sum /= static_cast<long>(top.size());
    sum.canonicalize();
    return sum;
}

namespace {

void write_header(const HidmTreeSpec& spec, std::ostream& out) {
    out << "pslink-hidm v1\n";
    out << "labeling gray" << spec.labeling_bits << "\n";
    out << "shaped-levels ";
    for (size_t i = 0; i < spec.shaped_levels.size(); ++i)
        out << (i ? "," : "") << spec.shaped_levels[i];
    out << "\n";
    if (spec.budget_dm_bits || spec.budget_invdm_bits)
        out << "budget " << spec.budget_dm_bits << " " << spec.budget_invdm_bits << "\n";
    out << "layers " << spec.num_layers() << "\n";
    for (int l = spec.num_layers() - 1; l >= 0; --l) {
        const auto& lay = spec.layers[static_cast<size_t>(l)];
        out << "layer " << (l + 1) << " u " << lay.out_bits << " r " << lay.constraint_bits << " s "
            << lay.fresh_bits;
        if (l != spec.num_layers() - 1)
            out << " t " << lay.fan_out;
        out << "\n";
    }
}

struct Parser {
    std::istream& in;
    int lineno = 0;

    std::string next_line() {
        std::string line;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty())
                return line;
        }
        throw std::invalid_argument("unexpected end of tree file");
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("tree file line " + std::to_string(lineno) + ": " + what);
    }
};

HidmTreeSpec parse_header(Parser& p, std::string& next) {
    HidmTreeSpec spec;
    if (p.next_line() != "pslink-hidm v1")
        p.fail("bad magic (expected pslink-hidm v1)");
    {
        std::istringstream ls(p.next_line());
        std::string key, val;
        ls >> key >> val;
        if (key != "labeling" || val.substr(0, 4) != "gray")
            p.fail("expected labeling gray<N>");
        spec.labeling_bits = std::stoi(val.substr(4));
    }
    {
        std::istringstream ls(p.next_line());
        std::string key, val;
        ls >> key >> val;
        if (key != "shaped-levels")
            p.fail("expected shaped-levels");
        std::istringstream vs(val);
        std::string tok;
        while (std::getline(vs, tok, ','))
            spec.shaped_levels.push_back(std::stoi(tok));
    }
    std::string line = p.next_line();
    if (line.rfind("budget ", 0) == 0) {
        std::istringstream ls(line);
        std::string key;
        ls >> key >> spec.budget_dm_bits >> spec.budget_invdm_bits;
        line = p.next_line();
    }
    int L = 0;
    {
        std::istringstream ls(line);
        std::string key;
        ls >> key >> L;
        if (key != "layers" || L < 1 || L > 32)
            p.fail("expected layers <count>");
    }
    spec.layers.resize(static_cast<size_t>(L));
    for (int i = L; i >= 1; --i) {
        std::istringstream ls(p.next_line());
        std::string kw, ku, kr, ks, kt;
        int num = 0;
        HidmLayerSpec lay;
        ls >> kw >> num >> ku >> lay.out_bits >> kr >> lay.constraint_bits >> ks >> lay.fresh_bits;
        if (kw != "layer" || num != i || ku != "u" || kr != "r" || ks != "s" || !ls)
            p.fail("bad layer line");
        if (i != L) {
            ls >> kt >> lay.fan_out;
            if (kt != "t" || !ls)
                p.fail("missing fan-out");
        }
        spec.layers[static_cast<size_t>(i - 1)] = lay;
    }
    next = p.next_line();
    return spec;
}

} // namespace

void save_tree_spec(const HidmTreeSpec& spec, std::ostream& out) {
    write_header(spec, out);
    out << "end\n";
}

HidmTreeSpec load_tree_spec(std::istream& in) {
    Parser p{in};
    std::string next;
    HidmTreeSpec spec = parse_header(p, next);
    if (next != "end")
        p.fail("expected end");
    spec.validate();
    return spec;
}

void save_tree(const HidmCodec& codec, std::ostream& out) {
    write_header(codec.spec, out);
    out << "tables\n";
    for (int l = codec.spec.num_layers() - 1; l >= 0; --l) {
        out << "layer " << (l + 1) << "\n";
        const auto& lay = codec.spec.layers[static_cast<size_t>(l)];
        for (const auto& e : codec.tables[static_cast<size_t>(l)])
            out << word_to_string(e.word, lay.out_bits) << " " << rational_to_string(e.energy) << "\n";
    }
    out << "end\n";
}

HidmCodec load_tree(std::istream& in) {
    Parser p{in};
    std::string next;
    HidmCodec codec;
    codec.spec = parse_header(p, next);
    codec.spec.validate();
    if (next != "tables")
        p.fail("expected tables");
    codec.labeling = build_reflected_gray_labeling(codec.spec.labeling_bits);
    int L = codec.spec.num_layers();
    codec.tables.resize(static_cast<size_t>(L));
    for (int i = L; i >= 1; --i) {
        std::istringstream ls(p.next_line());
        std::string kw;
        int num = 0;
        ls >> kw >> num;
        if (kw != "layer" || num != i)
            p.fail("expected layer " + std::to_string(i));
        const auto& lay = codec.spec.layers[static_cast<size_t>(i - 1)];
        size_t rows = static_cast<size_t>(1) << lay.in_bits();
        auto& table = codec.tables[static_cast<size_t>(i - 1)];
        table.resize(rows);
        for (size_t row = 0; row < rows; ++row) {
            std::istringstream es(p.next_line());
            std::string wordbits, energy;
            es >> wordbits >> energy;
            if (static_cast<int>(wordbits.size()) != lay.out_bits)
                p.fail("word width != u");
            uint32_t w = 0;
            for (char c : wordbits) {
                if (c != '0' && c != '1')
                    p.fail("bad word bits");
                w = (w << 1) | static_cast<uint32_t>(c - '0');
            }
            table[row] = {w, rational_from_string(energy)};
        }
    }
    if (p.next_line() != "end")
        p.fail("expected end");
    codec.finalize();
    return codec;
}

void save_tree_file(const HidmCodec& codec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    save_tree(codec, out);
}

HidmCodec load_tree_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    return load_tree(in);
}

HidmTreeSpec fig2_tree_spec() {
    HidmTreeSpec spec;
    spec.labeling_bits = 4;
    spec.shaped_levels = {2, 3, 4, 5};
    spec.layers = {
        {4, 3, 1, 2}, // layer 1: 4 LUTs
        {6, 2, 2, 2}, // layer 2: 2 LUTs
        {4, 0, 3, 1}, // layer 3: top
    };
    spec.budget_dm_bits = 480;
    spec.budget_invdm_bits = 816;
    return spec;
}

HidmTreeSpec reference_tree_spec() {
    HidmTreeSpec spec;
    spec.labeling_bits = 3;
    spec.shaped_levels = {2, 3};
    // 64 x u1=10 onto 507 info bits; chosen to track the MB-like target PMF
    spec.layers = {
        {10, 4, 5, 2}, // layer 1
        {8, 6, 2, 2},  // layer 2
        {12, 7, 3, 2}, // layer 3
        {14, 7, 5, 2}, // layer 4
        {14, 7, 5, 2}, // layer 5
        {14, 7, 3, 2}, // layer 6
        {14, 0, 9, 1}, // layer 7: top
    };
    spec.budget_dm_bits = 1500000;
    spec.budget_invdm_bits = 4200000;
    return spec;
}

} // namespace pslink
