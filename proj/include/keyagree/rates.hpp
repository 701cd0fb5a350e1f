#pragma once

#include <cstdint>
#include <span>

#include "keyagree/errors.hpp"

namespace keyagree {

// Bits needed to tag an attack count in 0..t (ceil(log2(t + 1))).
int branch_tag_bits(int t);

// True when the total attack budget covers every link of one direction; all
// zero-error bounds collapse to 0 in that regime.
bool capacity_is_zero(int n1, int n2, int t);

// Per-branch key size of the two-round branch-signaling scheme, in bits,
// with Singleton-tight code sizes. `t1` is the number of forward attacks the
// branch accounts for. When the branch cannot correct (d <= t + t1) only the
// backward key survives; its code distance is clamped below at 1.
struct BranchRateParams {
    int m = 0;
    int n1 = 0;
    int n2 = 0;
    int t = 0;
    int d = 0;
    int t1 = 0;
};

std::int64_t branch_key_bits(const BranchRateParams& p);

// Best two-round zero-error rate over the forward-code distance d, taking
// the worse of the corrected branch (t1 = 0) and the detection branch
// (t1 = d - t) at each d. Zero when capacity_is_zero holds.
struct TwoRoundBound {
    std::int64_t bits = 0;
    int best_d = -1;
    std::int64_t corrected_bits = 0;  // branch value at t1 = 0 for best_d
    std::int64_t detect_bits = 0;     // branch value at t1 = best_d - t
};

TwoRoundBound two_round_bound(int m, int n1, int n2, int t);

// Multi-round recursion. rounds[i] is the link count of round i; one round
// is plain key transmission behind a distance-(2t+1) code. Deeper rounds
// reserve branch-tag bits and split on the corrected/detected cases, with
// the inner budget 2t - d. Zero when the budget covers every round.
std::int64_t multi_round_bound(std::span<const int> rounds, int t, int m);

// Rate achievable by random binary codes that correct a xi-fraction of
// adversarial flips: 1 + xi*log2(xi) + (1 - xi)*log2(1 - xi), with
// 0*log2(0) = 0. Domain [0, 1], range [0, 1].
double random_code_rate(double xi);

// Asymptotic rate of theranged two-round scheme under count-only attacks:
// links scale as n1 = lambda1*r, n2 = lambda2*r, budget t = tau*r.
struct AsymptoticParams {
    double lambda1 = 0;
    double lambda2 = 0;
    double tau = 0;
    double grid_step = 1e-4;
};

// Value of the inner objective at a given forward design fraction xi:
// min(detect_term, success_term) with the leftover backward budget
// gamma = tau - lambda1*xi.
struct AsymptoticObjective {
    double detect_term = 0;
    double success_term = 0;
    double value = 0;
};

AsymptoticObjective asymptotic_objective(const AsymptoticParams& p, double xi);

struct AsymptoticBound {
    double value = 0;
    double best_xi = 0;
};

// Maximizes the objective over xi in [0, min(1/2, tau/lambda1)] by dense grid
// search plus local golden-section refinement around the best grid point.
AsymptoticBound asymptotic_bound(const AsymptoticParams& p);

}  // namespace keyagree
