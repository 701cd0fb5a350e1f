#include "keyagree/cbs.hpp"

#include <bit>
#include <cmath>
#include <set>
#include <string>

namespace keyagree {

CbsChannel::CbsChannel(int n_bits, double eps) : n(n_bits), epsilon(eps) {
    if (n < 1 || n > 63) throw ParameterError("channel block length must be in [1, 63]");
    if (!(eps >= 0.0) || !(eps < 0.5)) throw ParameterError("channel parameter must satisfy 0 <= eps < 1/2");
}

int CbsChannel::max_weight() const { return static_cast<int>(std::floor(static_cast<double>(n) * epsilon)); }

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        if (r > UINT64_MAX / num) throw CapacityError("binomial coefficient overflows 64 bits");
        r = r * num / static_cast<std::uint64_t>(i);
    }
    return r;
}

std::uint64_t sample_cbs_error(const CbsChannel& channel, Rng& rng) {
    const int cap = channel.max_weight();
    std::uint64_t ball = 0;
    for (int w = 0; w <= cap; ++w) ball += binomial(channel.n, w);
    std::uint64_t pick = rng.below(ball);
    int weight = 0;
    for (int w = 0; w <= cap; ++w) {
        const std::uint64_t layer = binomial(channel.n, w);
        if (pick < layer) {
            weight = w;
            break;
        }
        pick -= layer;
    }
    const auto positions = sample_distinct(channel.n, weight, rng);
    std::uint64_t word = 0;
    for (int p : positions) word |= std::uint64_t{1} << p;
    return word;
}

RandomCode::RandomCode(int n, int k, Rng& rng) : n_(n), k_(k) {
    if (n < 1 || n > 63) throw ParameterError("code length must be in [1, 63]");
    if (k < 0 || k > n) throw ParameterError("code dimension must be in [0, n]");
    const std::uint64_t count = std::uint64_t{1} << k;
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    std::set<std::uint64_t> seen;
    words_.reserve(count);
    while (words_.size() < count) {
        const std::uint64_t w = rng.next() & mask;
        if (seen.insert(w).second) words_.push_back(w);
    }
}

std::uint64_t RandomCode::word(std::uint64_t index) const {
    if (index < 1 || index > words_.size()) throw ParameterError("message index out of range");
    return words_[index - 1];
}

int strict_radius(int n, double xi) {
    // Inclusive radius for "weight < n * xi"; the nudge keeps exact integer
    // products (e.g. 20 * 0.2) on the strict side.
    const double target = static_cast<double>(n) * xi;
    return static_cast<int>(std::ceil(target - 1e-9)) - 1;
}

int dimension_for_rate(int n, double s) {
    if (!(s >= 0.0) || !(s <= 1.0)) throw ParameterError("code rate must lie in [0, 1]");
    return static_cast<int>(std::ceil(static_cast<double>(n) * s - 1e-9));
}

RandomCode build_random_code(int n, double s, Rng& rng, const Caps& caps) {
    const int k = dimension_for_rate(n, s);
    if (k > caps.random_code_bits) {
        throw CapacityError("random code with 2^" + std::to_string(k) + " codewords exceeds the cap");
    }
    if (k > n) throw ParameterError("rate " + std::to_string(s) + " is above 1 bit per symbol");
    return RandomCode(n, k, rng);
}

std::uint64_t bd_decode_random(const RandomCode& code, std::uint64_t received) {
    const int radius = code.decode_radius();
    std::uint64_t hit = 0;
    for (std::uint64_t i = 0; i < code.count(); ++i) {
        if (std::popcount(received ^ code.words()[i]) <= radius) {
            if (hit != 0) return 0;  // ambiguous
            hit = i + 1;
        }
    }
    return hit;
}

FailureEstimate estimate_failures(const RandomCode& code, const CbsChannel& channel, std::uint64_t trials, Rng& rng) {
    if (trials < 1) throw ParameterError("at least one trial required");
    if (channel.n != code.n()) throw ParameterError("channel and code lengths differ");
    std::uint64_t correction_failures = 0;
    std::uint64_t detection_failures = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t sent = rng.below(code.count()) + 1;
        const std::uint64_t error = sample_cbs_error(channel, rng);
        const std::uint64_t received = code.word(sent) ^ error;
        const std::uint64_t out = bd_decode_random(code, received);
        if (out != sent) ++correction_failures;
        if (out != sent && out != 0) {
            ++detection_failures;
            // A detection failure must be a wrong codeword strictly inside
            // the radius; re-verify by direct distance.
            if (std::popcount(received ^ code.word(out)) > code.decode_radius()) {
                throw std::logic_error("detection failure outside the decode radius");
            }
        }
    }
    auto ratio = [&](std::uint64_t c) { return static_cast<double>(c) / static_cast<double>(trials); };
    auto halfwidth = [&](double p) { return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)); };
    FailureEstimate est;
    est.trials = trials;
    est.p_correction = ratio(correction_failures);
    est.p_detection = ratio(detection_failures);
    est.ci_correction = halfwidth(est.p_correction);
    est.ci_detection = halfwidth(est.p_detection);
    return est;
}

}  // namespace keyagree
