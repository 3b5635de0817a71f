#ifndef PSLINK_FEC_HPP
#define PSLINK_FEC_HPP

#include <span>
#include <string>
#include <vector>

#include "pslink/bits.hpp"

namespace pslink {

// Sparse parity-check description of a systematic binary LDPC code.
// Variables 0..k-1 are payload, k..n-1 parity.
struct LdpcCode {
    int n = 0; // codeword length
    int k = 0; // payload length

    std::vector<std::vector<int>> row_cols; // per check: variable indices, ascending
    std::vector<std::vector<int>> col_rows; // per variable: check indices, ascending

    enum class Encoder { Staircase, LowerTriangular, None };
    Encoder encoder = Encoder::None;
    bool parity_full_rank = true;

    int n_checks() const { return n - k; }
    void detect_encoder(); // classify parity structure; rank-check fallback
};

LdpcCode load_alist(const std::string& path);
void save_alist(const LdpcCode& code, const std::string& path);

// Deterministic PEG-style (2040,1700) rate-5/6 code with staircase parity:
// payload columns of weight 3 placed one edge at a time on the check least
// recently reachable by BFS, ties to the lowest-degree then lowest-index check.
LdpcCode make_bundled_code();

BitVec ldpc_encode(const LdpcCode& code, const BitVec& payload);
bool syndrome_ok(const LdpcCode& code, const BitVec& word);

struct DecodeOptions {
    enum class Alg { NormalizedMinSum, SumProduct };
    Alg alg = Alg::NormalizedMinSum;
    double normalization = 0.75;
    int max_iter = 20;
};

struct DecodeResult {
    BitVec codeword;
    bool converged = false;
    int iterations = 0;

    BitVec payload(const LdpcCode& code) const {
        return BitVec(codeword.begin(), codeword.begin() + code.k);
    }
};

// Flooding belief-propagation decoder with reusable work buffers.
class LdpcDecoder {
public:
    explicit LdpcDecoder(const LdpcCode& code, DecodeOptions options = {});
    DecodeResult decode(std::span<const float> llr);

private:
    const LdpcCode& code_;
    DecodeOptions opt_;
    // flat edge layout, check-major
    std::vector<int> edge_var_;
    std::vector<int> check_offset_;
    std::vector<std::vector<int>> var_edges_;
    std::vector<float> v2c_, c2v_, total_;
};

DecodeResult ldpc_decode(const LdpcCode& code, std::span<const float> llr, const DecodeOptions& options = {});

} // namespace pslink

#endif
