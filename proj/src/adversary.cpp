#include "keyagree/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "keyagree/cbs.hpp"

namespace keyagree {
namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > UINT64_MAX / b) throw CapacityError("attack count overflows 64 bits");
    return a * b;
}

std::uint64_t pow_u64(std::uint64_t base, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r = checked_mul(r, base);
    return r;
}

// All replacement lists touching at most `budget` links of `sent`, each
// attacked link taking every value different from the one in flight. The
// first entry is the empty list.
std::vector<std::vector<LinkReplacement>> replacement_lists(const LinkTuple& sent, int budget) {
    std::vector<std::vector<LinkReplacement>> out;
    std::vector<LinkReplacement> current;
    const std::uint32_t values = std::uint32_t{1} << sent.m();
    auto rec = [&](auto&& self, int next_link, int remaining) -> void {
        out.push_back(current);
        if (remaining == 0) return;
        for (int link = next_link; link < sent.n(); ++link) {
            for (std::uint32_t v = 0; v < values; ++v) {
                if (v == sent.value(link)) continue;
                current.push_back({link, Message(sent.m(), v)});
                self(self, link + 1, remaining - 1);
                current.pop_back();
            }
        }
    };
    rec(rec, 0, budget);
    return out;
}

double entropy_bits(const std::map<std::string, double>& dist) {
    double total = 0;
    for (const auto& [key, mass] : dist) total += mass;
    if (total <= 0) return 0;
    double h = 0;
    for (const auto& [key, mass] : dist) {
        if (mass <= 0) continue;
        const double p = mass / total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

std::uint64_t count_attacks(int n1, int n2, int m, int t) {
    if (n1 < 1 || n2 < 1 || m < 1 || t < 0) throw ParameterError("invalid attack-space parameters");
    const std::uint64_t alts = pow_u64(2, m) - 1;
    std::uint64_t total = 0;
    for (int f = 0; f <= std::min(t, n1); ++f) {
        for (int b = 0; f + b <= t && b <= n2; ++b) {
            total += checked_mul(checked_mul(binomial(n1, f), binomial(n2, b)), pow_u64(alts, f + b));
        }
    }
    return total;
}

std::vector<AttackProfile> enumerate_attacks(int n1, int n2, int m, int t, const LinkTuple& x_sent,
                                             const LinkTuple& y_sent, const Caps& caps) {
    if (x_sent.n() != n1 || y_sent.n() != n2 || x_sent.m() != m || y_sent.m() != m) {
        throw ParameterError("sent tuples do not match the declared dimensions");
    }
    const std::uint64_t expected = count_attacks(n1, n2, m, t);
    if (expected > caps.verify_cases) {
        throw CapacityError("attack space of " + std::to_string(expected) + " profiles exceeds the cap");
    }
    std::vector<AttackProfile> out;
    out.reserve(expected);
    const auto forward = replacement_lists(x_sent, t);
    for (const auto& f : forward) {
        const auto backward = replacement_lists(y_sent, t - static_cast<int>(f.size()));
        for (const auto& b : backward) out.push_back({f, b});
    }
    return out;
}

VerificationReport verify_zero_error(const TwoRoundScheme& scheme, const Caps& caps) {
    const auto& p = scheme.params();
    VerificationReport report;
    report.kind = scheme.kind();
    report.params = p;
    for (int branch = 0; branch < scheme.branch_count(); ++branch) {
        report.branch_key_log2[branch] = scheme.branch_key_log2(branch);
    }

    auto note_disagreement = [&](Transcript&& tr) {
        ++report.disagreements;
        if (!report.first_counterexample) report.first_counterexample = std::move(tr);
    };

    for (const auto& x : scheme.forward_book().codewords()) {
        for (const auto& fwd : replacement_lists(x, p.t)) {
            const LinkTuple x_hat = apply_replacements(x, fwd);
            // Within budget classify_forward cannot fail; a ProtocolFailure
            // here is a library bug and surfaces as such.
            const auto [branch, x_dec] = scheme.classify_forward(x_hat);
            const int spent = static_cast<int>(fwd.size());
            for (const auto& y_suffix : scheme.suffix_book(branch).codewords()) {
                const LinkTuple y = scheme.extend_with_prefix(branch, y_suffix);
                const KeyTriple key_bob = scheme.bob_key(branch, x_dec, y);
                for (const auto& bwd : replacement_lists(y, p.t - spent)) {
                    if (++report.total_cases > caps.verify_cases) {
                        throw CapacityError("verification space exceeds the configured cap");
                    }
                    ++report.branch_histogram[branch];
                    const LinkTuple y_hat = apply_replacements(y, bwd);
                    Transcript tr;
                    tr.scheme = scheme.kind();
                    tr.params = p;
                    tr.x_sent = x;
                    tr.x_received = x_hat;
                    tr.y_sent = y;
                    tr.y_received = y_hat;
                    tr.bob_branch = branch;
                    tr.forward_attacks = link_distance(x, x_hat);
                    tr.backward_attacks = link_distance(y, y_hat);
                    tr.key_bob = key_bob;
                    try {
                        tr.key_alice = scheme.alice_finalize(x, y_hat);
                    } catch (const ProtocolFailure&) {
                        ++report.protocol_failures;
                        note_disagreement(std::move(tr));
                        continue;
                    }
                    if (!tr.agreed()) note_disagreement(std::move(tr));
                }
            }
        }
    }

    report.min_branch_key_log2 = 0;
    bool first = true;
    for (const auto& [branch, cases] : report.branch_histogram) {
        const auto bits = report.branch_key_log2.at(branch);
        if (first || bits < report.min_branch_key_log2) report.min_branch_key_log2 = bits;
        first = false;
    }
    return report;
}

namespace {

// Exact key distribution under one attack map, over Alice's and Bob's
// uniform draws. `forward_of` and `backward_of` materialize the attack for
// the traffic in flight. Mass lands on agreeing transcripts only.
template <typename ForwardOf, typename BackwardOf>
double attack_entropy(const TwoRoundScheme& scheme, ForwardOf&& forward_of, BackwardOf&& backward_of) {
    std::map<std::string, double> dist;
    const auto& codewords = scheme.forward_book().codewords();
    for (const auto& x : codewords) {
        const LinkTuple x_hat = apply_replacements(x, forward_of(x));
        const auto [branch, x_dec] = scheme.classify_forward(x_hat);
        const auto& book = scheme.suffix_book(branch).codewords();
        const double mass = 1.0 / (static_cast<double>(codewords.size()) * static_cast<double>(book.size()));
        for (const auto& y_suffix : book) {
            const LinkTuple y = scheme.extend_with_prefix(branch, y_suffix);
            const LinkTuple y_hat = apply_replacements(y, backward_of(x, y));
            const KeyTriple key_bob = scheme.bob_key(branch, x_dec, y);
            KeyTriple key_alice;
            try {
                key_alice = scheme.alice_finalize(x, y_hat);
            } catch (const ProtocolFailure&) {
                continue;
            }
            if (key_alice == key_bob) dist[key_fingerprint(key_alice)] += mass;
        }
    }
    return entropy_bits(dist);
}

// Fixed (link, value) assignments of total size <= budget on a side of
// `links` links; the empty assignment comes first. Values span the whole
// alphabet: a constant replacement may coincide with the message in flight
// on some transcripts, which is exactly what makes it oblivious.
std::vector<std::vector<LinkReplacement>> constant_assignments(int links, int m, int budget) {
    std::vector<std::vector<LinkReplacement>> out;
    std::vector<LinkReplacement> current;
    const std::uint32_t values = std::uint32_t{1} << m;
    auto rec = [&](auto&& self, int next_link, int remaining) -> void {
        out.push_back(current);
        if (remaining == 0) return;
        for (int link = next_link; link < links; ++link) {
            for (std::uint32_t v = 0; v < values; ++v) {
                current.push_back({link, Message(m, v)});
                self(self, link + 1, remaining - 1);
                current.pop_back();
            }
        }
    };
    rec(rec, 0, budget);
    return out;
}

double entropy_constant_oblivious(const TwoRoundScheme& scheme) {
    const auto& p = scheme.params();
    double best = -1;
    for (const auto& fwd : constant_assignments(p.n1, p.m, p.t)) {
        for (const auto& bwd : constant_assignments(p.n2, p.m, p.t - static_cast<int>(fwd.size()))) {
            const double h = attack_entropy(
                scheme, [&](const LinkTuple&) { return std::span<const LinkReplacement>(fwd); },
                [&](const LinkTuple&, const LinkTuple&) { return std::span<const LinkReplacement>(bwd); });
            if (best < 0 || h < best) best = h;
        }
    }
    return best;
}

double entropy_branch_forcing(const TwoRoundScheme& scheme) {
    // Every branch is forced by corrupting exactly `branch` forward links
    // with a value-shifting attack; the key is then uniform over the
    // branch-conditional space.
    double best = -1;
    for (int branch = 0; branch < scheme.branch_count(); ++branch) {
        const auto bits = static_cast<double>(scheme.branch_key_log2(branch));
        if (best < 0 || bits < best) best = bits;
    }
    return best;
}

double entropy_count_only(const TwoRoundScheme& scheme) {
    const auto& p = scheme.params();
    if (p.m != 1) throw ParameterError("count-only attacks are defined for single-bit messages");
    double best = -1;
    for (int f = 0; f <= std::min(p.t, p.n1); ++f) {
        for (int b = 0; f + b <= p.t && b <= p.n2; ++b) {
            // Mixture over position subsets, exact by enumeration.
            std::map<std::string, double> dist;
            std::vector<int> fwd_subset, bwd_subset;
            auto flip = [](const LinkTuple& sent, const std::vector<int>& links) {
                std::vector<LinkReplacement> reps;
                reps.reserve(links.size());
                for (int link : links) reps.push_back({link, Message(1, sent.value(link) ^ 1u)});
                return reps;
            };
            auto subsets = [](int n, int k) {
                std::vector<std::vector<int>> out;
                std::vector<int> cur;
                auto rec = [&](auto&& self, int start) -> void {
                    if (static_cast<int>(cur.size()) == k) {
                        out.push_back(cur);
                        return;
                    }
                    for (int i = start; i < n; ++i) {
                        cur.push_back(i);
                        self(self, i + 1);
                        cur.pop_back();
                    }
                };
                rec(rec, 0);
                return out;
            };
            const auto fsets = subsets(p.n1, f);
            const auto bsets = subsets(p.n2, b);
            const double subset_mass = 1.0 / (static_cast<double>(fsets.size()) * static_cast<double>(bsets.size()));
            for (const auto& fs : fsets) {
                for (const auto& bs : bsets) {
                    const auto& codewords = scheme.forward_book().codewords();
                    for (const auto& x : codewords) {
                        const auto fwd = flip(x, fs);
                        const LinkTuple x_hat = apply_replacements(x, fwd);
                        const auto [branch, x_dec] = scheme.classify_forward(x_hat);
                        const auto& book = scheme.suffix_book(branch).codewords();
                        const double mass =
                            subset_mass / (static_cast<double>(codewords.size()) * static_cast<double>(book.size()));
                        for (const auto& y_suffix : book) {
                            const LinkTuple y = scheme.extend_with_prefix(branch, y_suffix);
                            const LinkTuple y_hat = apply_replacements(y, flip(y, bs));
                            const KeyTriple key_bob = scheme.bob_key(branch, x_dec, y);
                            KeyTriple key_alice;
                            try {
                                key_alice = scheme.alice_finalize(x, y_hat);
                            } catch (const ProtocolFailure&) {
                                continue;
                            }
                            if (key_alice == key_bob) dist[key_fingerprint(key_alice)] += mass;
                        }
                    }
                }
            }
            const double h = entropy_bits(dist);
            if (best < 0 || h < best) best = h;
        }
    }
    return best;
}

}  // namespace

double worst_case_entropy(const TwoRoundScheme& scheme, StrategyFamily family, const Caps& caps) {
    (void)caps;
    switch (family) {
        case StrategyFamily::constant_oblivious:
            return entropy_constant_oblivious(scheme);
        case StrategyFamily::count_only_random:
            return entropy_count_only(scheme);
        case StrategyFamily::exhaustive_deterministic:
            // The key distribution depends on a deterministic attack only
            // through the branch it forces, so branch-forcing attains the
            // family minimum; constant-oblivious mixtures cannot dip below.
            return std::min(entropy_branch_forcing(scheme), entropy_constant_oblivious(scheme));
    }
    throw ParameterError("unknown strategy family");
}

CountOnlyAttack sample_count_only_attack(int n1, int n2, int t, int forward_count, int backward_count, Rng& rng) {
    if (forward_count < 0 || backward_count < 0 || forward_count + backward_count > t) {
        throw ParameterError("attack counts exceed the budget");
    }
    if (forward_count > n1 || backward_count > n2) throw ParameterError("attack counts exceed the link counts");
    CountOnlyAttack attack;
    attack.forward_links = sample_distinct(n1, forward_count, rng);
    attack.backward_links = sample_distinct(n2, backward_count, rng);
    return attack;
}

AttackProfile materialize_bit_flips(const CountOnlyAttack& attack, const LinkTuple& x_sent, const LinkTuple& y_sent) {
    if (x_sent.m() != 1 || y_sent.m() != 1) throw ParameterError("bit-flip attacks need single-bit messages");
    AttackProfile profile;
    for (int link : attack.forward_links) profile.forward.push_back({link, Message(1, x_sent.value(link) ^ 1u)});
    for (int link : attack.backward_links) profile.backward.push_back({link, Message(1, y_sent.value(link) ^ 1u)});
    return profile;
}

double worst_case_entropy_eps(const EpsScheme& scheme, std::uint64_t trials_per_cell, Rng& rng) {
    const int t = scheme.params().t();
    double best = -1;
    for (int f = 0; f <= t; ++f) {
        for (int b = 0; f + b <= t; ++b) {
            Rng cell_rng = rng.derive(static_cast<std::uint64_t>(f * (t + 1) + b));
            std::map<std::string, double> dist;
            for (std::uint64_t i = 0; i < trials_per_cell; ++i) {
                const auto run = scheme.run(cell_rng, f, b);
                if (!run.agreed) continue;
                dist[std::to_string(run.bob_detected) + "|" + std::to_string(run.key_forward) + "|" +
                     std::to_string(run.key_backward)] += 1.0;
            }
            const double h = entropy_bits(dist);
            if (best < 0 || h < best) best = h;
        }
    }
    return best;
}

}  // namespace keyagree
