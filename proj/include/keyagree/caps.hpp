#pragma once

#include <cstdint>

namespace keyagree {

// Enumeration/materialization limits. Exhaustive verification and brute-force
// oracles only run below these; larger instances switch to algebraic paths or
// refuse with CapacityError.
struct Caps {
    // Codebooks are materialized only when log2(size) <= this.
    int materialize_log2 = 20;
    // min_distance scans at most this many codeword pairs.
    std::uint64_t distance_pairs = std::uint64_t{1} << 24;
    // Upper bound on exhaustively enumerated verification cases.
    std::uint64_t verify_cases = std::uint64_t{1} << 26;
    // Random binary codes keep at most 2^k codewords with k <= this.
    int random_code_bits = 18;
};

inline const Caps& default_caps() {
    static const Caps caps{};
    return caps;
}

}  // namespace keyagree
