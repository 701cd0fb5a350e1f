#pragma once

#include <cstdint>

#include "keyagree/caps.hpp"
#include "keyagree/cbs.hpp"
#include "keyagree/rng.hpp"

namespace keyagree {

// Ranged parameters for the single-bit-per-link regime: n1 = ceil(lambda1*r)
// forward links, n2 = ceil(lambda2*r) backward links, budget t = floor(tau*r).
// xi is the fraction of forward corruption the scheme is designed to correct.
struct EpsParams {
    double lambda1 = 0;
    double lambda2 = 0;
    double tau = 0;
    double xi = 0;
    int r = 0;

    int n1() const;
    int n2() const;
    int t() const;

    void validate() const;  // ParameterError on violation
};

// Random-code instantiation of the two-round scheme for the count-only
// adversary. Alice ships a key index behind a forward random code; Bob
// either corrects (success) or detects, majority-signals one branch bit on a
// dedicated block of 2t+1 backward links, and ships his own key index behind
// a branch-matched random code on the remaining links.
//
// Code rates track random_code_rate(...) of the designed corruption
// fractions, scaled by kRateMargin so that desk-scale blocks decode reliably;
// the asymptotic targets are reported, not enforced.
class EpsScheme {
public:
    static constexpr double kRateMargin = 0.5;

    EpsScheme(const EpsParams& params, Rng build_rng, const Caps& caps = default_caps());

    const EpsParams& params() const { return params_; }
    int flag_links() const { return flag_links_; }
    int key_links() const { return key_links_; }
    int forward_key_bits() const { return forward_.dimension(); }
    int backward_key_bits_success() const { return backward_success_.dimension(); }
    int backward_key_bits_detect() const { return backward_detect_.dimension(); }

    struct Run {
        bool agreed = false;
        bool bob_detected = false;
        bool alice_detected = false;
        int forward_flips = 0;
        int backward_flips = 0;
        int key_bits = 0;               // realized key size for Bob's branch
        std::uint64_t key_forward = 0;  // agreed components when agreed
        std::uint64_t key_backward = 0;
    };

    // One execution with Eve flipping `forward_count` + `backward_count`
    // uniformly chosen links. ParameterError when the counts exceed t.
    Run run(Rng& rng, int forward_count, int backward_count) const;

private:
    // Decode against a random code: an exact codeword hit wins outright,
    // otherwise the unique codeword within the radius (0 on miss/ambiguity).
    static std::uint64_t decode(const RandomCode& code, std::uint64_t received, int radius);

    EpsParams params_;
    int flag_links_;
    int key_links_;
    int radius_forward_;
    int radius_success_;
    int radius_detect_;
    RandomCode forward_;
    RandomCode backward_success_;
    RandomCode backward_detect_;
};

}  // namespace keyagree
