#pragma once

#include <span>
#include <vector>

#include "keyagree/codes.hpp"

namespace keyagree {

// One tampered link: Eve overwrites the message on `link` with `value`.
// Replacing a message with its current value is a no-op and costs no budget.
struct LinkReplacement {
    int link = 0;
    Message value;

    friend bool operator==(const LinkReplacement&, const LinkReplacement&) = default;
};

// The exact replacements Eve applies in one protocol execution.
struct AttackProfile {
    std::vector<LinkReplacement> forward;
    std::vector<LinkReplacement> backward;

    friend bool operator==(const AttackProfile&, const AttackProfile&) = default;
};

// Apply replacements to a sent tuple. Link indices must be in range and
// distinct; values must match the tuple width.
LinkTuple apply_replacements(const LinkTuple& sent, std::span<const LinkReplacement> replacements);

}  // namespace keyagree
