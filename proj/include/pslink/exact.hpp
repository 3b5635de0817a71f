#ifndef PSLINK_EXACT_HPP
#define PSLINK_EXACT_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace pslink {

using BigInt = mpz_class;
using Rational = mpq_class;

// Canonical text form: "n" when the denominator is 1, otherwise "n/d".
inline std::string rational_to_string(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    if (c.get_den() == 1)
        return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline Rational rational_from_string(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational: \"" + s + "\"");
    q.canonicalize();
    return q;
}

// floor(log2(x)) for x >= 1
inline long floor_log2(const BigInt& x) {
    if (x <= 0)
        throw std::domain_error("floor_log2 of non-positive value");
    return static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2)) - 1;
}

} // namespace pslink

#endif
