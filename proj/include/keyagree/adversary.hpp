#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "keyagree/attack.hpp"
#include "keyagree/caps.hpp"
#include "keyagree/eps_protocol.hpp"
#include "keyagree/protocol.hpp"

namespace keyagree {

// Attack strategy families the worst-case sweep minimizes over.
enum class StrategyFamily {
    // Every per-transcript deterministic attack; dominates the randomized
    // ones for both agreement and entropy.
    exhaustive_deterministic,
    // Fixed (link, value) replacements chosen before seeing any traffic.
    constant_oblivious,
    // Only the per-direction attack counts are chosen; positions are
    // uniform and the attacked bits flip (single-bit messages).
    count_only_random,
};

// Closed-form number of effective attacks against one transcript:
// sum over f + b <= t of C(n1,f) * C(n2,b) * (2^m - 1)^(f+b).
std::uint64_t count_attacks(int n1, int n2, int m, int t);

// Every budget-respecting attack that changes at least what it touches:
// choices of attacked forward/backward subsets and, per attacked link, every
// value different from the one in flight. Includes the empty attack.
std::vector<AttackProfile> enumerate_attacks(int n1, int n2, int m, int t, const LinkTuple& x_sent,
                                             const LinkTuple& y_sent, const Caps& caps = default_caps());

struct VerificationReport {
    SchemeKind kind = SchemeKind::branched;
    SchemeParams params;
    std::uint64_t total_cases = 0;
    std::uint64_t disagreements = 0;
    std::uint64_t protocol_failures = 0;  // included in disagreements
    std::map<int, std::uint64_t> branch_histogram;
    std::map<int, std::int64_t> branch_key_log2;
    std::int64_t min_branch_key_log2 = 0;  // over reached branches
    std::optional<Transcript> first_counterexample;

    bool ok() const { return disagreements == 0; }
};

// Runs the scheme for every codeword, every Bob draw and every
// budget-respecting deterministic attack; per-transcript enumeration covers
// adaptive strategies. Disagreements are reported, not thrown.
VerificationReport verify_zero_error(const TwoRoundScheme& scheme, const Caps& caps = default_caps());

// Minimum key entropy (bits) over a strategy family. For the zero-error
// schemes key distributions are computed exactly; the branch-forcing attacks
// inside the exhaustive family attain the minimum because the distribution
// depends on the attack only through the branch (asserted in tests).
double worst_case_entropy(const TwoRoundScheme& scheme, StrategyFamily family, const Caps& caps = default_caps());

// Count-only attack positions: forward/backward link subsets drawn uniformly
// without replacement.
struct CountOnlyAttack {
    std::vector<int> forward_links;
    std::vector<int> backward_links;
};

CountOnlyAttack sample_count_only_attack(int n1, int n2, int t, int forward_count, int backward_count, Rng& rng);

// Concrete profile for single-bit messages: each attacked link's bit flips.
AttackProfile materialize_bit_flips(const CountOnlyAttack& attack, const LinkTuple& x_sent, const LinkTuple& y_sent);

// Plug-in entropy of the empirical key distribution over agreeing runs, at
// the worst count pair. Meaningful at desk scale only when trials cover the
// key space.
double worst_case_entropy_eps(const EpsScheme& scheme, std::uint64_t trials_per_cell, Rng& rng);

}  // namespace keyagree
