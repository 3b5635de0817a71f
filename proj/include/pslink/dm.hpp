#ifndef PSLINK_DM_HPP
#define PSLINK_DM_HPP

#include <string>

#include "pslink/bits.hpp"

namespace pslink {

// Fixed-length distribution matcher over the shaped bit levels of a DM word.
// match() maps info_bits() uniform bits to shaped_bits() output bits;
// dematch() inverts valid words and must accept corrupted input without
// aborting (post-FEC errors reach the inverse DM).
class DmCodec {
public:
    virtual ~DmCodec() = default;

    virtual long info_bits() const = 0;       // N_u^sb
    virtual long shaped_bits() const = 0;     // m^sb N_s / 2
    virtual int pam_symbols() const = 0;      // N_s
    virtual int shaped_bits_per_symbol() const = 0; // m^sb / 2
    virtual BitVec match(const BitVec& info) const = 0;
    virtual BitVec dematch(const BitVec& shaped) const = 0;
    virtual std::string name() const = 0;
};

} // namespace pslink

#endif
