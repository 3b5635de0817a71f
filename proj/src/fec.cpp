#include "pslink/fec.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pslink {

namespace {

bool parity_rank_full(const LdpcCode& code) {
    int m = code.n_checks();
    // dense GF(2) elimination on the parity square, rows packed in uint64
    int words = (m + 63) / 64;
    std::vector<std::vector<uint64_t>> rows(static_cast<size_t>(m),
                                            std::vector<uint64_t>(static_cast<size_t>(words), 0));
    for (int r = 0; r < m; ++r)
        for (int c : code.row_cols[static_cast<size_t>(r)])
            if (c >= code.k) {
                int j = c - code.k;
                rows[static_cast<size_t>(r)][static_cast<size_t>(j / 64)] |= uint64_t(1) << (j % 64);
            }
    int rank = 0;
    for (int col = 0; col < m && rank < m; ++col) {
        int pivot = -1;
        for (int r = rank; r < m; ++r)
            if ((rows[static_cast<size_t>(r)][static_cast<size_t>(col / 64)] >> (col % 64)) & 1u) {
                pivot = r;
                break;
            }
        if (pivot < 0)
            continue;
        std::swap(rows[static_cast<size_t>(pivot)], rows[static_cast<size_t>(rank)]);
        for (int r = 0; r < m; ++r) {
            if (r == rank)
                continue;
            if ((rows[static_cast<size_t>(r)][static_cast<size_t>(col / 64)] >> (col % 64)) & 1u)
                for (int w = 0; w < words; ++w)
                    rows[static_cast<size_t>(r)][static_cast<size_t>(w)] ^=
                        rows[static_cast<size_t>(rank)][static_cast<size_t>(w)];
        }
        ++rank;
    }
    return rank == m;
}

} // namespace

void LdpcCode::detect_encoder() {
    int m = n_checks();
    // staircase: parity column k+j checks rows {j, j+1}, last column {m-1}
    bool staircase = true;
    for (int j = 0; j < m && staircase; ++j) {
        const auto& rows = col_rows[static_cast<size_t>(k + j)];
        if (j < m - 1)
            staircase = rows.size() == 2 && rows[0] == j && rows[1] == j + 1;
        else
            staircase = rows.size() == 1 && rows[0] == m - 1;
    }
    if (staircase) {
        encoder = Encoder::Staircase;
        parity_full_rank = true;
        return;
    }
    // lower triangular with unit diagonal: row j's parity support is within
    // columns k..k+j and includes k+j
    bool lower = true;
    for (int j = 0; j < m && lower; ++j) {
        bool diag = false;
        for (int c : row_cols[static_cast<size_t>(j)])
            if (c >= k) {
                if (c - k > j) {
                    lower = false;
                    break;
                }
                diag = diag || (c - k == j);
            }
        lower = lower && diag;
    }
    if (lower) {
        encoder = Encoder::LowerTriangular;
        parity_full_rank = true;
        return;
    }
    encoder = Encoder::None;
    parity_full_rank = parity_rank_full(*this);
}

LdpcCode load_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    auto next_int = [&](const char* what) {
        long v;
        if (!(in >> v))
            throw std::runtime_error(std::string("alist parse error: missing ") + what + " in " + path);
        return v;
    };
    long n = next_int("N"), m = next_int("M");
    if (n <= 0 || m <= 0 || m >= n)
        throw std::runtime_error("alist parse error: bad dimensions in " + path);
    LdpcCode code;
    code.n = static_cast<int>(n);
    code.k = static_cast<int>(n - m);
    next_int("max col degree");
    next_int("max row degree");
    std::vector<long> col_deg(static_cast<size_t>(n)), row_deg(static_cast<size_t>(m));
    for (auto& d : col_deg)
        d = next_int("column degree");
    for (auto& d : row_deg)
        d = next_int("row degree");
    code.col_rows.resize(static_cast<size_t>(n));
    code.row_cols.resize(static_cast<size_t>(m));
    for (long c = 0; c < n; ++c) {
        for (long i = 0; i < col_deg[static_cast<size_t>(c)]; ++i) {
            long r = next_int("column entry");
            if (r == 0)
                continue; // alist padding
            if (r < 1 || r > m)
                throw std::runtime_error("alist parse error: row index out of range in " + path);
            code.col_rows[static_cast<size_t>(c)].push_back(static_cast<int>(r - 1));
        }
        std::sort(code.col_rows[static_cast<size_t>(c)].begin(), code.col_rows[static_cast<size_t>(c)].end());
    }
    for (long r = 0; r < m; ++r) {
        for (long i = 0; i < row_deg[static_cast<size_t>(r)]; ++i) {
            long c = next_int("row entry");
            if (c == 0)
                continue;
            if (c < 1 || c > n)
                throw std::runtime_error("alist parse error: column index out of range in " + path);
            code.row_cols[static_cast<size_t>(r)].push_back(static_cast<int>(c - 1));
        }
        std::sort(code.row_cols[static_cast<size_t>(r)].begin(), code.row_cols[static_cast<size_t>(r)].end());
    }
    // cross-check the two adjacency views
    for (long c = 0; c < n; ++c)
        for (int r : code.col_rows[static_cast<size_t>(c)]) {
            const auto& rc = code.row_cols[static_cast<size_t>(r)];
            if (!std::binary_search(rc.begin(), rc.end(), static_cast<int>(c)))
                throw std::runtime_error("alist parse error: inconsistent adjacency in " + path);
        }
    code.detect_encoder();
    return code;
}

void save_alist(const LdpcCode& code, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    int m = code.n_checks();
    size_t max_col = 0, max_row = 0;
    for (const auto& v : code.col_rows)
        max_col = std::max(max_col, v.size());
    for (const auto& v : code.row_cols)
        max_row = std::max(max_row, v.size());
    out << code.n << " " << m << "\n" << max_col << " " << max_row << "\n";
    for (int c = 0; c < code.n; ++c)
        out << code.col_rows[static_cast<size_t>(c)].size() << (c + 1 < code.n ? " " : "\n");
    for (int r = 0; r < m; ++r)
        out << code.row_cols[static_cast<size_t>(r)].size() << (r + 1 < m ? " " : "\n");
    for (const auto& v : code.col_rows) {
        for (size_t i = 0; i < v.size(); ++i)
            out << v[i] + 1 << (i + 1 < v.size() ? " " : "");
        out << "\n";
    }
    for (const auto& v : code.row_cols) {
        for (size_t i = 0; i < v.size(); ++i)
            out << v[i] + 1 << (i + 1 < v.size() ? " " : "");
        out << "\n";
    }
}

LdpcCode make_bundled_code() {
    const int n = 2040, k = 1700, m = n - k;
    LdpcCode code;
    code.n = n;
    code.k = k;
    code.row_cols.resize(static_cast<size_t>(m));
    code.col_rows.resize(static_cast<size_t>(n));
    auto add_edge = [&](int r, int c) {
        code.row_cols[static_cast<size_t>(r)].push_back(c);
        code.col_rows[static_cast<size_t>(c)].push_back(r);
    };
    // staircase parity
    for (int j = 0; j < m; ++j) {
        add_edge(j, k + j);
        if (j + 1 < m)
            add_edge(j + 1, k + j);
    }
    std::vector<int> degree(static_cast<size_t>(m), 0);
    for (int r = 0; r < m; ++r)
        degree[static_cast<size_t>(r)] = static_cast<int>(code.row_cols[static_cast<size_t>(r)].size());

    std::vector<int> dist(static_cast<size_t>(m));
    std::vector<int> col_checks;
    for (int c = 0; c < k; ++c) {
        col_checks.clear();
        for (int e = 0; e < 3; ++e) {
            int chosen = -1;
            if (col_checks.empty()) {
                for (int r = 0; r < m; ++r)
                    if (chosen < 0 || degree[static_cast<size_t>(r)] < degree[static_cast<size_t>(chosen)])
                        chosen = r;
            } else {
                // BFS from the column's current checks through the bipartite graph
                std::fill(dist.begin(), dist.end(), -1);
                std::deque<int> q;
                for (int r : col_checks) {
                    dist[static_cast<size_t>(r)] = 0;
                    q.push_back(r);
                }
                while (!q.empty()) {
                    int r = q.front();
                    q.pop_front();
                    for (int v : code.row_cols[static_cast<size_t>(r)])
                        for (int r2 : code.col_rows[static_cast<size_t>(v)])
                            if (dist[static_cast<size_t>(r2)] < 0) {
                                dist[static_cast<size_t>(r2)] = dist[static_cast<size_t>(r)] + 1;
                                q.push_back(r2);
                            }
                }
                // farthest check (unreached = infinitely far), then min degree, then index
                for (int r = 0; r < m; ++r) {
                    if (std::find(col_checks.begin(), col_checks.end(), r) != col_checks.end())
                        continue;
                    if (chosen < 0) {
                        chosen = r;
                        continue;
                    }
                    int dr = dist[static_cast<size_t>(r)] < 0 ? 1 << 20 : dist[static_cast<size_t>(r)];
                    int dc = dist[static_cast<size_t>(chosen)] < 0 ? 1 << 20 : dist[static_cast<size_t>(chosen)];
                    if (dr > dc || (dr == dc && (degree[static_cast<size_t>(r)] < degree[static_cast<size_t>(chosen)])))
                        chosen = r;
                }
            }
            col_checks.push_back(chosen);
            add_edge(chosen, c);
            degree[static_cast<size_t>(chosen)] += 1;
        }
    }
    for (auto& v : code.row_cols)
        std::sort(v.begin(), v.end());
    for (auto& v : code.col_rows)
        std::sort(v.begin(), v.end());
    code.detect_encoder();
    return code;
}

BitVec ldpc_encode(const LdpcCode& code, const BitVec& payload) {
    if (static_cast<int>(payload.size()) != code.k)
        throw std::invalid_argument("payload length != k");
    if (code.encoder == LdpcCode::Encoder::None)
        throw std::invalid_argument("code is decode-only (no systematic encoder structure)");
    BitVec word(static_cast<size_t>(code.n), 0);
    std::copy(payload.begin(), payload.end(), word.begin());
    int m = code.n_checks();
    // payload part of each check
    std::vector<uint8_t> s(static_cast<size_t>(m), 0);
    for (int r = 0; r < m; ++r) {
        uint8_t acc = 0;
        for (int c : code.row_cols[static_cast<size_t>(r)])
            if (c < code.k)
                acc ^= payload[static_cast<size_t>(c)];
        s[static_cast<size_t>(r)] = acc;
    }
    if (code.encoder == LdpcCode::Encoder::Staircase) {
        uint8_t prev = 0;
        for (int j = 0; j < m; ++j) {
            prev ^= s[static_cast<size_t>(j)];
            word[static_cast<size_t>(code.k + j)] = prev;
        }
    } else {
        for (int j = 0; j < m; ++j) {
            uint8_t acc = s[static_cast<size_t>(j)];
            for (int c : code.row_cols[static_cast<size_t>(j)])
                if (c >= code.k && c - code.k < j)
                    acc ^= word[static_cast<size_t>(c)];
            word[static_cast<size_t>(code.k + j)] = acc;
        }
    }
    return word;
}

bool syndrome_ok(const LdpcCode& code, const BitVec& word) {
    for (const auto& row : code.row_cols) {
        uint8_t acc = 0;
        for (int c : row)
            acc ^= word[static_cast<size_t>(c)];
        if (acc)
            return false;
    }
    return true;
}

LdpcDecoder::LdpcDecoder(const LdpcCode& code, DecodeOptions options) : code_(code), opt_(options) {
    int m = code.n_checks();
    check_offset_.resize(static_cast<size_t>(m) + 1, 0);
    for (int r = 0; r < m; ++r)
        check_offset_[static_cast<size_t>(r) + 1] =
            check_offset_[static_cast<size_t>(r)] + static_cast<int>(code.row_cols[static_cast<size_t>(r)].size());
    int n_edges = check_offset_.back();
    edge_var_.resize(static_cast<size_t>(n_edges));
    var_edges_.resize(static_cast<size_t>(code.n));
    for (int r = 0; r < m; ++r) {
        int base = check_offset_[static_cast<size_t>(r)];
        const auto& cols = code.row_cols[static_cast<size_t>(r)];
        for (size_t i = 0; i < cols.size(); ++i) {
            edge_var_[static_cast<size_t>(base) + i] = cols[i];
            var_edges_[static_cast<size_t>(cols[i])].push_back(base + static_cast<int>(i));
        }
    }
    v2c_.resize(static_cast<size_t>(n_edges));
    c2v_.assign(static_cast<size_t>(n_edges), 0.0f);
    total_.resize(static_cast<size_t>(code.n));
}

DecodeResult LdpcDecoder::decode(std::span<const float> llr) {
    if (static_cast<int>(llr.size()) != code_.n)
        throw std::invalid_argument("llr length != n");
    for (float l : llr)
        if (!std::isfinite(l))
            throw std::invalid_argument("non-finite L-value");
    int m = code_.n_checks();
    int n_edges = static_cast<int>(edge_var_.size());
    for (int e = 0; e < n_edges; ++e)
        v2c_[static_cast<size_t>(e)] = llr[static_cast<size_t>(edge_var_[static_cast<size_t>(e)])];

    DecodeResult res;
    res.codeword.resize(static_cast<size_t>(code_.n));
    for (int v = 0; v < code_.n; ++v)
        res.codeword[static_cast<size_t>(v)] = llr[static_cast<size_t>(v)] < 0 ? 1 : 0;
    if (syndrome_ok(code_, res.codeword)) {
        res.converged = true;
        res.iterations = 0;
        return res;
    }
    const float norm = static_cast<float>(opt_.normalization);
    const bool minsum = opt_.alg == DecodeOptions::Alg::NormalizedMinSum;

    for (int it = 1; it <= opt_.max_iter; ++it) {
        // check update
        for (int r = 0; r < m; ++r) {
            int lo = check_offset_[static_cast<size_t>(r)], hi = check_offset_[static_cast<size_t>(r) + 1];
            if (minsum) {
                float min1 = 1e30f, min2 = 1e30f;
                int arg1 = -1;
                uint32_t signs = 0;
                for (int e = lo; e < hi; ++e) {
                    float v = v2c_[static_cast<size_t>(e)];
                    float a = std::fabs(v);
                    if (v < 0)
                        signs ^= 1u;
                    if (a < min1) {
                        min2 = min1;
                        min1 = a;
                        arg1 = e;
                    } else if (a < min2) {
                        min2 = a;
                    }
                }
                for (int e = lo; e < hi; ++e) {
                    float v = v2c_[static_cast<size_t>(e)];
                    float mag = (e == arg1 ? min2 : min1) * norm;
                    bool neg = (signs ^ (v < 0 ? 1u : 0u)) & 1u;
                    c2v_[static_cast<size_t>(e)] = neg ? -mag : mag;
                }
            } else {
                // sum-product via tanh product with self-division
                double prod = 1.0;
                bool saturated = false;
                for (int e = lo; e < hi; ++e) {
                    double t = std::tanh(0.5 * static_cast<double>(v2c_[static_cast<size_t>(e)]));
                    t = std::clamp(t, -0.9999999, 0.9999999);
                    prod *= t;
                    if (std::fabs(t) < 1e-12)
                        saturated = true;
                }
                for (int e = lo; e < hi; ++e) {
                    double t = std::tanh(0.5 * static_cast<double>(v2c_[static_cast<size_t>(e)]));
                    t = std::clamp(t, -0.9999999, 0.9999999);
                    double rest;
                    if (!saturated)
                        rest = prod / t;
                    else {
                        rest = 1.0;
                        for (int e2 = lo; e2 < hi; ++e2) {
                            if (e2 == e)
                                continue;
                            double t2 = std::tanh(0.5 * static_cast<double>(v2c_[static_cast<size_t>(e2)]));
                            rest *= std::clamp(t2, -0.9999999, 0.9999999);
                        }
                    }
                    rest = std::clamp(rest, -0.9999999, 0.9999999);
                    c2v_[static_cast<size_t>(e)] = static_cast<float>(2.0 * std::atanh(rest));
                }
            }
        }
        // variable update
        for (int v = 0; v < code_.n; ++v) {
            float t = llr[static_cast<size_t>(v)];
            for (int e : var_edges_[static_cast<size_t>(v)])
                t += c2v_[static_cast<size_t>(e)];
            total_[static_cast<size_t>(v)] = t;
            res.codeword[static_cast<size_t>(v)] = t < 0 ? 1 : 0;
        }
        res.iterations = it;
        if (syndrome_ok(code_, res.codeword)) {
            res.converged = true;
            return res;
        }
        for (int e = 0; e < n_edges; ++e)
            v2c_[static_cast<size_t>(e)] =
                total_[static_cast<size_t>(edge_var_[static_cast<size_t>(e)])] - c2v_[static_cast<size_t>(e)];
    }
    res.converged = false;
    return res;
}

DecodeResult ldpc_decode(const LdpcCode& code, std::span<const float> llr, const DecodeOptions& options) {
    LdpcDecoder dec(code, options);
    return dec.decode(llr);
}

} // namespace pslink
