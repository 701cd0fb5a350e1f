#pragma once

#include <cstdint>

#include "keyagree/errors.hpp"

namespace keyagree {

// Arithmetic in the field with 2^m elements, 1 <= m <= 16. Each m uses a
// fixed published primitive polynomial so codebooks are identical across
// builds and platforms.
class Gf2m {
public:
    explicit Gf2m(int m);

    int m() const { return m_; }
    std::uint32_t order() const { return std::uint32_t{1} << m_; }
    // Reduction polynomial including the x^m term.
    std::uint32_t poly() const { return poly_; }

    static std::uint32_t add(std::uint32_t a, std::uint32_t b) { return a ^ b; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
    std::uint32_t inv(std::uint32_t a) const;  // ParameterError on a == 0

    static std::uint32_t modulus_for(int m);  // ParameterError outside 1..16

private:
    int m_;
    std::uint32_t poly_;
};

}  // namespace keyagree
