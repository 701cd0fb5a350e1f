#include "keyagree/eps_protocol.hpp"

#include <bit>
#include <cmath>

#include "keyagree/rates.hpp"

namespace keyagree {

int EpsParams::n1() const { return static_cast<int>(std::ceil(lambda1 * r - 1e-9)); }
int EpsParams::n2() const { return static_cast<int>(std::ceil(lambda2 * r - 1e-9)); }
int EpsParams::t() const { return static_cast<int>(std::floor(tau * r + 1e-9)); }

void EpsParams::validate() const {
    if (r < 1) throw ParameterError("scale r must be >= 1");
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw ParameterError("lambda1 and lambda2 must be positive");
    if (!(tau >= 0.0)) throw ParameterError("tau must be >= 0");
    if (!(tau / lambda2 < 0.5)) throw ParameterError("the scheme needs tau/lambda2 < 1/2");
    const double xi_max = std::min(0.5, lambda1 > 0 ? tau / lambda1 : 0.5);
    if (!(xi >= 0.0) || !(xi <= xi_max + 1e-12)) {
        throw ParameterError("xi must lie in [0, min(1/2, tau/lambda1)]");
    }
    if (n1() < 1) throw ParameterError("no forward links at this scale");
    if (n2() <= 2 * t()) throw ParameterError("backward links do not cover the branch signal");
}

namespace {

int clamp_dimension(int block, double target_rate) {
    const int k = static_cast<int>(std::floor(block * target_rate * EpsScheme::kRateMargin + 1e-9));
    return std::max(1, k);
}

}  // namespace

EpsScheme::EpsScheme(const EpsParams& params, Rng build_rng, const Caps& caps) : params_(params) {
    params_.validate();
    const int n1 = params_.n1();
    const int n2 = params_.n2();
    const int t = params_.t();
    flag_links_ = 2 * t + 1;
    key_links_ = n2 - flag_links_;
    if (key_links_ < 1) throw ParameterError("scale r too small: no backward links left beside the branch signal");

    const double gamma = std::max(params_.tau - params_.lambda1 * params_.xi, 0.0);
    const double s_fwd = random_code_rate(params_.xi);
    const double s_succ = random_code_rate(params_.tau / params_.lambda2);
    const double s_det = random_code_rate(gamma / params_.lambda2);

    radius_forward_ = strict_radius(n1, params_.xi);
    radius_success_ = std::min(t, key_links_);
    radius_detect_ = std::min(std::max(t - 1, 0), key_links_);

    auto make = [&](int block, double rate, const char* label) {
        const int k = clamp_dimension(block, rate);
        if (k > caps.random_code_bits) throw CapacityError("random code cap exceeded");
        Rng rng = build_rng.derive(label);
        return RandomCode(block, k, rng);
    };
    forward_ = make(n1, s_fwd, "forward");
    backward_success_ = make(key_links_, s_succ, "backward-success");
    backward_detect_ = make(key_links_, s_det, "backward-detect");
    forward_.set_decode_radius(radius_forward_);
    backward_success_.set_decode_radius(radius_success_);
    backward_detect_.set_decode_radius(radius_detect_);
}

std::uint64_t EpsScheme::decode(const RandomCode& code, std::uint64_t received, int radius) {
    std::uint64_t hit = 0;
    for (std::uint64_t i = 0; i < code.count(); ++i) {
        const int dist = std::popcount(received ^ code.words()[i]);
        if (dist == 0) return i + 1;  // exact hit always wins
        if (radius >= 0 && dist <= radius) {
            if (hit != 0) return 0;
            hit = i + 1;
        }
    }
    return hit;
}

EpsScheme::Run EpsScheme::run(Rng& rng, int forward_count, int backward_count) const {
    const int n1 = params_.n1();
    const int n2 = params_.n2();
    const int t = params_.t();
    if (forward_count < 0 || backward_count < 0 || forward_count + backward_count > t) {
        throw ParameterError("attack counts exceed the budget");
    }
    const std::uint64_t nonce = rng.next();
    Rng alice_rng = Rng(nonce).derive("alice");
    Rng bob_rng = Rng(nonce).derive("bob");
    Rng eve_rng = Rng(nonce).derive("eve");

    Run out;
    out.forward_flips = forward_count;
    out.backward_flips = backward_count;

    // Round 1: Alice ships a uniform key index on the forward links.
    const std::uint64_t alice_index = alice_rng.below(forward_.count()) + 1;
    std::uint64_t x = forward_.word(alice_index);
    for (int p : sample_distinct(n1, forward_count, eve_rng)) x ^= std::uint64_t{1} << p;

    // Round 2: Bob grades the corruption and answers on the backward links:
    // the branch bit majority-coded on the flag block, his key index behind
    // the branch-matched code on the rest.
    const std::uint64_t bob_forward = decode(forward_, x, radius_forward_);
    const bool detect = bob_forward == 0;
    out.bob_detected = detect;
    const RandomCode& bob_code = detect ? backward_detect_ : backward_success_;
    const std::uint64_t bob_index = bob_rng.below(bob_code.count()) + 1;
    std::uint64_t y = bob_code.word(bob_index) << flag_links_;
    if (detect) y |= (std::uint64_t{1} << flag_links_) - 1;
    for (int p : sample_distinct(n2, backward_count, eve_rng)) y ^= std::uint64_t{1} << p;

    // Alice: majority over the flag block picks the branch, then the branch
    // code recovers Bob's key index.
    const int flag_ones = std::popcount(y & ((std::uint64_t{1} << flag_links_) - 1));
    const bool alice_detect = 2 * flag_ones > flag_links_;
    out.alice_detected = alice_detect;
    const RandomCode& alice_code = alice_detect ? backward_detect_ : backward_success_;
    const int alice_radius = alice_detect ? radius_detect_ : radius_success_;
    const std::uint64_t alice_backward = decode(alice_code, y >> flag_links_, alice_radius);

    out.key_bits = detect ? backward_detect_.dimension() : forward_.dimension() + backward_success_.dimension();

    // Keys: (branch, forward part unless detected, backward part). Bob keys
    // on his decoded forward index; Alice keys on her own draw.
    const bool branch_match = alice_detect == detect;
    const bool forward_match = detect || bob_forward == alice_index;
    const bool backward_match = alice_backward == bob_index && alice_backward != 0;
    out.agreed = branch_match && forward_match && backward_match;
    if (out.agreed) {
        out.key_forward = detect ? 0 : alice_index;
        out.key_backward = bob_index;
    }
    return out;
}

}  // namespace keyagree
