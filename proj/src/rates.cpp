#include "keyagree/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace keyagree {

int branch_tag_bits(int t) {
    if (t < 0) throw ParameterError("attack budget must be >= 0");
    int bits = 0;
    while ((1 << bits) < t + 1) ++bits;
    return bits;
}

bool capacity_is_zero(int n1, int n2, int t) { return t >= std::max(n1, n2); }

std::int64_t branch_key_bits(const BranchRateParams& p) {
    const int ell = branch_tag_bits(p.t);
    if (p.n1 < 1 || p.n2 < 1) throw ParameterError("link counts must be >= 1");
    if (p.d < 1 || p.d > p.n1) throw ParameterError("forward distance d must satisfy 1 <= d <= n1");
    if (p.n2 <= 2 * p.t) throw ParameterError("branch rates need n2 > 2t");
    if (p.m <= ell) throw ParameterError("message width m must exceed the branch tag width");
    if (p.t1 < 0 || p.t1 > std::max(p.t, p.d - p.t)) throw ParameterError("branch index t1 out of range");
    if (p.d > p.t + p.t1) {
        // Correctable branch: forward key plus a backward key protected for
        // the full budget.
        return static_cast<std::int64_t>(p.m) * (p.n1 - p.d + 1) +
               static_cast<std::int64_t>(p.m - ell) * (p.n2 - (2 * p.t + 1) + 1);
    }
    // Detection branch: backward key only, protected for the leftover budget.
    const int dist = std::max(2 * (p.t - p.t1) + 1, 1);
    if (dist > p.n2) throw ParameterError("required backward distance exceeds n2");
    return static_cast<std::int64_t>(p.m - ell) * (p.n2 - dist + 1);
}

TwoRoundBound two_round_bound(int m, int n1, int n2, int t) {
    if (n1 < 1 || n2 < 1 || t < 0 || m < 1) throw ParameterError("invalid two-round bound parameters");
    if (capacity_is_zero(n1, n2, t)) return {0, -1, 0, 0};
    if (n2 <= 2 * t) throw ParameterError("two-round bound needs n2 > 2t");
    if (t >= n1) throw ParameterError("two-round bound needs t < n1");
    if (m <= branch_tag_bits(t)) throw ParameterError("message width m must exceed the branch tag width");
    TwoRoundBound best;
    for (int d = t + 1; d <= n1; ++d) {
        const auto corrected = branch_key_bits({m, n1, n2, t, d, 0});
        const auto detect = branch_key_bits({m, n1, n2, t, d, d - t});
        const auto value = std::min(corrected, detect);
        if (best.best_d < 0 || value > best.bits) {
            best = {value, d, corrected, detect};
        }
    }
    return best;
}

std::int64_t multi_round_bound(std::span<const int> rounds, int t, int m) {
    if (rounds.empty()) throw ParameterError("at least one round required");
    if (t < 0 || m < 1) throw ParameterError("invalid multi-round parameters");
    for (int n : rounds) {
        if (n < 1) throw ParameterError("round link counts must be >= 1");
    }
    if (t >= *std::max_element(rounds.begin(), rounds.end())) return 0;
    if (rounds.size() == 1) {
        // One-way key transmission behind a distance-(2t+1) code.
        return static_cast<std::int64_t>(m) * std::max(rounds[0] - 2 * t, 0);
    }
    if (t < 1) throw ParameterError("multi-round recursion needs t >= 1");
    for (int n : rounds) {
        if (n <= 2 * t + 1) throw ParameterError("multi-round recursion needs every round > 2t + 1 links");
    }
    const int ell = branch_tag_bits(t);
    if (m - ell < 1) throw ParameterError("message width too small for the branch tag at this budget");
    const auto rest = rounds.subspan(1);
    std::int64_t best = -1;
    for (int d = t + 1; d <= 2 * t; ++d) {
        const std::int64_t corrected = static_cast<std::int64_t>(m - ell) * (rounds[0] - d + 1) +
                                       multi_round_bound(rest, t, m - ell);
        const std::int64_t detect = multi_round_bound(rest, std::max(2 * t - d, 0), m - ell);
        best = std::max(best, std::min(corrected, detect));
    }
    return best;
}

double random_code_rate(double xi) {
    if (!(xi >= 0.0) || !(xi <= 1.0)) throw ParameterError("rate argument must lie in [0, 1]");
    auto xlog = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
    return 1.0 + xlog(xi) + xlog(1.0 - xi);
}

namespace {

void validate(const AsymptoticParams& p) {
    if (!(p.lambda1 > 0.0) || !(p.lambda2 > 0.0)) throw ParameterError("lambda1 and lambda2 must be positive");
    if (!(p.tau >= 0.0)) throw ParameterError("tau must be >= 0");
    if (!(p.tau / p.lambda2 < 0.5)) throw ParameterError("asymptotic bound needs tau/lambda2 < 1/2");
    if (!(p.tau <= p.lambda1)) throw ParameterError("asymptotic bound needs tau <= lambda1");
    if (!(p.grid_step > 0.0)) throw ParameterError("grid step must be positive");
}

}  // namespace

AsymptoticObjective asymptotic_objective(const AsymptoticParams& p, double xi) {
    const double gamma = std::max(p.tau - p.lambda1 * xi, 0.0);
    AsymptoticObjective obj;
    obj.detect_term = p.lambda2 * random_code_rate(gamma / p.lambda2);
    obj.success_term = p.lambda1 * random_code_rate(xi) + p.lambda2 * random_code_rate(p.tau / p.lambda2);
    obj.value = std::min(obj.detect_term, obj.success_term);
    return obj;
}

AsymptoticBound asymptotic_bound(const AsymptoticParams& p) {
    validate(p);
    const double xi_max = std::min(0.5, p.tau / p.lambda1);
    auto eval = [&](double xi) { return asymptotic_objective(p, xi).value; };

    AsymptoticBound best{eval(0.0), 0.0};
    const auto steps = static_cast<std::int64_t>(std::floor(xi_max / p.grid_step));
    for (std::int64_t i = 1; i <= steps; ++i) {
        const double xi = std::min(static_cast<double>(i) * p.grid_step, xi_max);
        const double v = eval(xi);
        if (v > best.value) best = {v, xi};
    }
    if (eval(xi_max) >= best.value) best = {eval(xi_max), xi_max};

    // Local golden-section refinement around the best grid point. The grid
    // already brackets the global maximum to one step; refinement only
    // polishes within that bracket.
    double lo = std::max(0.0, best.best_xi - p.grid_step);
    double hi = std::min(xi_max, best.best_xi + p.grid_step);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo);
    double b = lo + gr * (hi - lo);
    double fa = eval(a);
    double fb = eval(b);
    for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = eval(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = eval(a);
        }
    }
    const double mid = (lo + hi) / 2;
    if (eval(mid) > best.value) best = {eval(mid), mid};
    return best;
}

}  // namespace keyagree
