#pragma once

#include <iosfwd>
#include <string>

#include "keyagree/codes.hpp"

namespace keyagree {

// Text codebook format:
//
//   keyagree-codebook v1
//   n 3
//   m 2
//   d 2
//   construction mds
//   poly 0x7          <- field modulus for mds, "-" otherwise
//   count 16
//   <one hex codeword per line, tuple bits MSB-first>
//
// Writing requires a materialized codebook; reading yields an explicit-list
// codebook carrying the recorded metadata.
void write_codebook(std::ostream& out, const Codebook& cb);
std::string codebook_to_string(const Codebook& cb);

struct LoadedCodebook {
    Codebook codebook;             // explicit list
    Construction recorded_tag;     // construction named in the file
    std::uint32_t field_poly = 0;  // 0 when absent
};

LoadedCodebook read_codebook(std::istream& in);

}  // namespace keyagree
