#include "keyagree/gf2m.hpp"

#include <string>

namespace keyagree {
namespace {

// Primitive polynomials over GF(2), one per degree. Classic table used by
// LFSR/CRC implementations; bit m is the x^m term.
constexpr std::uint32_t kModuli[17] = {
    0,        // degree 0 unused
    0x3,      // x + 1
    0x7,      // x^2 + x + 1
    0xB,      // x^3 + x + 1
    0x13,     // x^4 + x + 1
    0x25,     // x^5 + x^2 + 1
    0x43,     // x^6 + x + 1
    0x89,     // x^7 + x^3 + 1
    0x11D,    // x^8 + x^4 + x^3 + x^2 + 1
    0x211,    // x^9 + x^4 + 1
    0x409,    // x^10 + x^3 + 1
    0x805,    // x^11 + x^2 + 1
    0x1053,   // x^12 + x^6 + x^4 + x + 1
    0x201B,   // x^13 + x^4 + x^3 + x + 1
    0x4443,   // x^14 + x^10 + x^6 + x + 1
    0x8003,   // x^15 + x + 1
    0x1100B,  // x^16 + x^12 + x^3 + x + 1
};

}  // namespace

std::uint32_t Gf2m::modulus_for(int m) {
    if (m < 1 || m > 16) {
        throw ParameterError("field degree m must be in [1, 16], got " + std::to_string(m));
    }
    return kModuli[m];
}

Gf2m::Gf2m(int m) : m_(m), poly_(modulus_for(m)) {}

std::uint32_t Gf2m::mul(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t r = 0;
    while (b != 0) {
        if (b & 1u) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & (std::uint32_t{1} << m_)) a ^= poly_;
    }
    return r;
}

std::uint32_t Gf2m::pow(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t r = 1;
    while (e != 0) {
        if (e & 1u) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::uint32_t Gf2m::inv(std::uint32_t a) const {
    if (a == 0) throw ParameterError("no inverse of zero");
    return pow(a, (std::uint64_t{1} << m_) - 2);
}

}  // namespace keyagree
