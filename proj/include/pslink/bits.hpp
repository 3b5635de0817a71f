#ifndef PSLINK_BITS_HPP
#define PSLINK_BITS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pslink {

// Bits are stored one per byte, value 0 or 1.
using BitVec = std::vector<uint8_t>;

inline uint32_t pack_bits(const BitVec& bits, size_t pos, int width) {
    uint32_t w = 0;
    for (int i = 0; i < width; ++i)
        w = (w << 1) | (bits[pos + i] & 1u);
    return w;
}

inline void unpack_bits(uint32_t word, int width, BitVec& bits, size_t pos) {
    for (int i = 0; i < width; ++i)
        bits[pos + i] = static_cast<uint8_t>((word >> (width - 1 - i)) & 1u);
}

inline BitVec bits_from_string(const std::string& s) {
    BitVec v;
    v.reserve(s.size());
    for (char c : s) {
        if (c == '0' || c == '1')
            v.push_back(static_cast<uint8_t>(c - '0'));
        else if (c != ' ' && c != '_')
            throw std::invalid_argument("bad bit character in \"" + s + "\"");
    }
    return v;
}

inline std::string bits_to_string(const BitVec& v) {
    std::string s;
    s.reserve(v.size());
    for (uint8_t b : v)
        s.push_back(b ? '1' : '0');
    return s;
}

inline std::string word_to_string(uint32_t word, int width) {
    std::string s(static_cast<size_t>(width), '0');
    for (int i = 0; i < width; ++i)
        if ((word >> (width - 1 - i)) & 1u)
            s[static_cast<size_t>(i)] = '1';
    return s;
}

inline size_t count_diff(const BitVec& a, const BitVec& b) {
    size_t n = 0;
    for (size_t i = 0; i < a.size() && i < b.size(); ++i)
        n += (a[i] != b[i]);
    return n;
}

inline uint32_t binary_to_gray(uint32_t i) { return i ^ (i >> 1); }

inline uint32_t gray_to_binary(uint32_t g) {
    uint32_t i = 0;
    while (g) {
        i ^= g;
        g >>= 1;
    }
    return i;
}

// splitmix64-style mixing for counter-based per-task seeding
inline uint64_t mix_seed(uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1) + 0xbf58476d1ce4e5b9ULL * (c + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace pslink

#endif
