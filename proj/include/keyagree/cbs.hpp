#pragma once

#include <cstdint>
#include <vector>

#include "keyagree/caps.hpp"
#include "keyagree/errors.hpp"
#include "keyagree/rng.hpp"

namespace keyagree {

// Additive binary channel whose error vector is uniform over the Hamming
// ball of radius floor(n * epsilon). Not memoryless.
struct CbsChannel {
    int n = 0;
    double epsilon = 0;

    CbsChannel(int n_bits, double eps);
    int max_weight() const;
};

// Uniform draw from the weight-<=floor(n*eps) ball, in two stages: weight w
// with probability proportional to C(n, w), then a uniform w-subset of
// positions. Words are the low n bits of the result.
std::uint64_t sample_cbs_error(const CbsChannel& channel, Rng& rng);

// Binomial coefficient; CapacityError if it would overflow 64 bits.
std::uint64_t binomial(int n, int k);

// 2^k codewords of length n <= 63, each bit independent and uniform,
// resampled until pairwise distinct. The decode radius is set by the caller
// for the fraction of errors the code is meant to correct: weight < n * xi,
// i.e. an inclusive radius of ceil(n * xi) - 1.
class RandomCode {
public:
    RandomCode() = default;  // empty placeholder
    RandomCode(int n, int k, Rng& rng);

    int n() const { return n_; }
    int dimension() const { return k_; }
    std::uint64_t count() const { return words_.size(); }
    double rate() const { return static_cast<double>(k_) / n_; }
    // Codeword of message index i in 1..2^k.
    std::uint64_t word(std::uint64_t index) const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    void set_decode_radius(int radius) { decode_radius_ = radius; }
    int decode_radius() const { return decode_radius_; }

private:
    int n_ = 0;
    int k_ = 0;
    int decode_radius_ = 0;
    std::vector<std::uint64_t> words_;
};

// Inclusive decode radius realizing "weight strictly below n * xi".
int strict_radius(int n, double xi);

// Dimension of a rate-s code of length n: ceil(n * s), so the realized rate
// never falls below s.
int dimension_for_rate(int n, double s);

RandomCode build_random_code(int n, double s, Rng& rng, const Caps& caps = default_caps());

// Bounded distance decoding: the message index whose codeword is the unique
// one within the decode radius of `received`; 0 when none or several are.
// An exact codeword hit with a second codeword inside the ball still counts
// as ambiguous.
std::uint64_t bd_decode_random(const RandomCode& code, std::uint64_t received);

struct FailureEstimate {
    double p_correction = 0;
    double p_detection = 0;
    std::uint64_t trials = 0;
    double ci_correction = 0;  // 95% half-widths
    double ci_detection = 0;
};

// Monte Carlo over a uniform message and a CBS error vector. A correction
// failure is any output other than the sent index; a detection failure is a
// wrong nonzero output.
FailureEstimate estimate_failures(const RandomCode& code, const CbsChannel& channel, std::uint64_t trials, Rng& rng);

}  // namespace keyagree
