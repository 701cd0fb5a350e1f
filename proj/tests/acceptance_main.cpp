// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. argv[1] is the CLI binary, argv[2] a scratch directory for output
// files.

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "keyagree/adversary.hpp"
#include "keyagree/cbs.hpp"
#include "keyagree/eps_protocol.hpp"
#include "keyagree/protocol.hpp"
#include "keyagree/rates.hpp"

using namespace keyagree;

namespace {

std::string g_cli;
std::string g_scratch;
int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

int run_cli(const std::string& args, const std::string& out_file) {
    const std::string cmd = g_cli + " " + args + " > " + out_file + " 2>/dev/null";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    std::ostringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

// 1. Zero-error exhaustive verification of the three worked configurations.
void criterion_1() {
    bool pass = true;
    std::string detail;
    for (const char* preset : {"example1", "example2", "example3"}) {
        const std::string out = g_scratch + "/c1_" + preset + ".txt";
        const int code = run_cli(std::string("verify --preset ") + preset + " --m 2", out);
        const std::string body = slurp(out);
        const bool clean = code == 0 && body.find("\"disagreements\":0") != std::string::npos;
        pass = pass && clean;
        detail += std::string(preset) + (clean ? " clean; " : " FAILED; ");
    }
    report(1, "exhaustive zero-error verification at m=2", pass, detail);
}

// 2. Negative control: a weakened forward code must disagree visibly.
void criterion_2() {
    const std::string out = g_scratch + "/c2_weak.txt";
    const int code = run_cli("verify --n1 3 --n2 3 --t 1 --d 1 --m 2", out);
    const std::string body = slurp(out);
    const bool dumped = body.find("\"agreed\":false") != std::string::npos;
    const bool pass = code == 1 && dumped;
    report(2, "weakened scheme yields a counterexample transcript", pass,
           "exit=" + std::to_string(code) + (dumped ? ", transcript dumped" : ", transcript missing"));
}

// 3. Branch-conditional key sizes agree with the closed-form branch rates on
//    every reached branch of the verified configurations.
void criterion_3() {
    bool pass = true;
    std::string detail;
    // Instances whose branches are exactly the clean/detect endpoints, where
    // the formula is an identity.
    for (const SchemeParams& p : {SchemeParams{2, 3, 3, 1, 2}, SchemeParams{3, 3, 3, 1, 2},
                                  SchemeParams{2, 4, 3, 1, 2}}) {
        const TwoRoundScheme scheme(SchemeKind::branched, p);
        const auto rep = verify_zero_error(scheme);
        pass = pass && rep.ok();
        for (const auto& [branch, cases] : rep.branch_histogram) {
            const auto closed_form = branch_key_bits({p.m, p.n1, p.n2, p.t, p.d, branch});
            if (rep.branch_key_log2.at(branch) != closed_form) {
                pass = false;
                detail += "mismatch at m=" + std::to_string(p.m) + " branch " + std::to_string(branch) + "; ";
            }
        }
    }
    // With d - t > 1 the intermediate corrected branches hold strictly more
    // than the closed form accounts for; the bound direction must still hold.
    {
        const SchemeParams p{2, 3, 3, 1, 3};
        const TwoRoundScheme scheme(SchemeKind::branched, p);
        const auto rep = verify_zero_error(scheme);
        pass = pass && rep.ok();
        for (const auto& [branch, cases] : rep.branch_histogram) {
            if (rep.branch_key_log2.at(branch) < branch_key_bits({p.m, p.n1, p.n2, p.t, p.d, branch})) {
                pass = false;
                detail += "operational key below the closed form at d=3 branch " + std::to_string(branch) + "; ";
            }
        }
        if (rep.branch_key_log2.at(0) != branch_key_bits({p.m, p.n1, p.n2, p.t, p.d, 0})) {
            pass = false;
            detail += "clean-branch mismatch at d=3; ";
        }
    }
    if (detail.empty()) detail = "integer equality on all endpoint branches";
    report(3, "key sizes match the branch rate formula", pass, detail);
}

// 4. Two-round bound fixture plus the endpoint reduction, exhaustively.
void criterion_4() {
    bool pass = true;
    std::string detail;
    const auto fixture = two_round_bound(8, 3, 3, 1);
    if (fixture.bits != 21 || fixture.best_d != 2) {
        pass = false;
        detail += "fixture bits=" + std::to_string(fixture.bits) + " d=" + std::to_string(fixture.best_d) + "; ";
    }
    std::uint64_t checked = 0;
    for (int t = 1; t <= 3; ++t) {
        for (int n1 = 2; n1 <= 7; ++n1) {
            for (int n2 = 2 * t + 1; n2 <= 7; ++n2) {
                for (int d = t + 1; d <= std::min(2 * t, n1); ++d) {
                    for (int m : {branch_tag_bits(t) + 1, 8}) {
                        std::int64_t swept = INT64_MAX;
                        for (int t1 = 0; t1 <= t; ++t1) {
                            swept = std::min(swept, branch_key_bits({m, n1, n2, t, d, t1}));
                        }
                        const auto endpoints = std::min(branch_key_bits({m, n1, n2, t, d, 0}),
                                                        branch_key_bits({m, n1, n2, t, d, d - t}));
                        ++checked;
                        if (swept != endpoints) {
                            pass = false;
                            detail += "reduction fails at t=" + std::to_string(t) + " d=" + std::to_string(d) + "; ";
                        }
                    }
                }
            }
        }
    }
    if (detail.empty()) detail = "fixture 21 bits at d=2; " + std::to_string(checked) + " reduction points";
    report(4, "two-round bound fixture and endpoint reduction", pass, detail);
}

// 5. The branch-signaling bound beats direct transmission, approaching 3/2.
void criterion_5() {
    bool pass = true;
    std::string detail;
    for (int m = 4; m <= 32; ++m) {
        const auto bound = two_round_bound(m, 3, 3, 1);
        if (bound.bits <= 2 * m) {
            pass = false;
            detail += "no gain at m=" + std::to_string(m) + "; ";
        }
    }
    const auto b32 = two_round_bound(32, 3, 3, 1);
    // ratio >= 1.4 in exact integer arithmetic: bits * 10 >= 14 * 2m
    if (b32.bits * 10 < 14 * 64) {
        pass = false;
        detail += "ratio below 1.4 at m=32; ";
    }
    if (detail.empty()) {
        detail = "m=32: " + std::to_string(b32.bits) + " bits vs 64 direct (ratio " +
                 std::to_string(static_cast<double>(b32.bits) / 64.0).substr(0, 5) + ")";
    }
    report(5, "strict improvement over direct transmission", pass, detail);
}

// 6. Full-budget adversaries zero every calculator.
void criterion_6() {
    bool pass = true;
    std::string detail;
    std::uint64_t checked = 0;
    for (int n1 = 1; n1 <= 8; ++n1) {
        for (int n2 = 1; n2 <= 8; ++n2) {
            for (int t = std::max(n1, n2); t <= 8; ++t) {
                ++checked;
                if (!capacity_is_zero(n1, n2, t)) {
                    pass = false;
                    detail += "guard misses " + std::to_string(n1) + "," + std::to_string(n2) + "," +
                              std::to_string(t) + "; ";
                }
                if (two_round_bound(8, n1, n2, t).bits != 0) {
                    pass = false;
                    detail += "two-round bound nonzero under the guard; ";
                }
                const std::vector<int> rounds{n1, n2};
                if (multi_round_bound(rounds, t, 8) != 0) {
                    pass = false;
                    detail += "multi-round bound nonzero under the guard; ";
                }
            }
        }
    }
    if (detail.empty()) detail = std::to_string(checked) + " guarded points, all zero";
    report(6, "impossibility guard zeroes every bound", pass, detail);
}

// 7. Rate function identities and the asymptotic-bound fixture.
void criterion_7() {
    bool pass = true;
    std::string detail;
    if (random_code_rate(0.0) != 1.0) {
        pass = false;
        detail += "I(0) != 1; ";
    }
    if (random_code_rate(0.5) != 0.0) {
        pass = false;
        detail += "I(1/2) != 0; ";
    }
    for (int i = 0; i <= 1000; ++i) {
        const double xi = i / 1000.0;
        if (std::abs(random_code_rate(xi) - random_code_rate(1.0 - xi)) > 1e-12) {
            pass = false;
            detail += "symmetry breaks at xi=" + std::to_string(xi) + "; ";
            break;
        }
    }
    const AsymptoticParams p{1.0, 1.0, 0.1, 1e-4};
    if (asymptotic_objective(p, 0.1).detect_term != 1.0) {
        pass = false;
        detail += "endpoint term not exactly lambda2; ";
    }
    const auto coarse = asymptotic_bound(p);
    AsymptoticParams finer = p;
    finer.grid_step = 1e-5;
    const auto fine = asymptotic_bound(finer);
    if (std::abs(coarse.value - fine.value) > 1e-6) {
        pass = false;
        detail += "grid refinement moves the value by " + std::to_string(std::abs(coarse.value - fine.value)) + "; ";
    }
    if (detail.empty()) {
        detail = "fixture value " + std::to_string(coarse.value).substr(0, 8) + " at xi " +
                 std::to_string(coarse.best_xi).substr(0, 6);
    }
    report(7, "rate function identities and asymptotic fixture", pass, detail);
}

// 8. Correction failures fall with the block length; detection failures
//    vanish where the theory promises them to.
void criterion_8() {
    bool pass = true;
    std::string detail;
    const double s = 0.25, xi = 0.2;
    const std::uint64_t trials = 100000;
    Rng master(7);
    double p_corr_12 = 0, p_corr_20 = 0;
    std::string extra;
    for (int n : {12, 16, 20}) {
        Rng build = master.derive("code-" + std::to_string(n));
        RandomCode code = build_random_code(n, s, build);
        code.set_decode_radius(strict_radius(n, xi));
        for (double eps : {0.15, 0.4}) {
            Rng cell = master.derive("cbs-" + std::to_string(n) + "-" + std::to_string(eps));
            const auto est = estimate_failures(code, CbsChannel(n, eps), trials, cell);
            if (eps == 0.15) {
                if (n == 12) p_corr_12 = est.p_correction;
                if (n == 20) p_corr_20 = est.p_correction;
                // Errors never exceed the decode radius here, so a detection
                // failure is impossible, not merely rare.
                if (est.p_detection != 0.0) {
                    pass = false;
                    detail += "detection failure below the radius at n=" + std::to_string(n) + "; ";
                }
            } else {
                if (n == 20 && est.p_detection >= 0.05) {
                    pass = false;
                    detail += "p_detection at n=20, eps=0.4 is " + std::to_string(est.p_detection) + "; ";
                }
                extra += "p_det(" + std::to_string(n) + ",0.4)=" + std::to_string(est.p_detection).substr(0, 6) + " ";
            }
        }
    }
    if (!(p_corr_12 > p_corr_20)) {
        pass = false;
        detail += "no end-to-end decrease: " + std::to_string(p_corr_12) + " vs " + std::to_string(p_corr_20) + "; ";
    }
    if (detail.empty()) {
        detail = "p_corr " + std::to_string(p_corr_12).substr(0, 6) + " -> " + std::to_string(p_corr_20).substr(0, 6) +
                 "; " + extra;
    }
    report(8, "channel-coding failure trends", pass, detail);
}

// 9. Randomized-adversary agreement improves with the scale. Single draws at
//    r=16 are degenerate (most realized codes admit no ambiguity at all), so
//    the statistic averages over independent scheme draws per scale.
void criterion_9() {
    const std::uint64_t seed = 3;
    const std::uint64_t trials = 10000;
    bool pass = true;
    std::string detail;
    bool zero_attack_clean = true;
    auto worst_cell = [&](int r, int schemes) {
        EpsParams params{1.0, 1.0, 0.1, 0.05, r};
        const int t = params.t();
        double worst = 0;
        for (int f = 0; f <= t; ++f) {
            for (int b = 0; f + b <= t; ++b) {
                std::uint64_t bad = 0;
                for (int s = 0; s < schemes; ++s) {
                    Rng master(seed);
                    const EpsScheme scheme(params,
                                           master.derive("build-" + std::to_string(r) + "-" + std::to_string(s)));
                    Rng cell = master.derive("cell-" + std::to_string(r) + "-" + std::to_string(s) + "-" +
                                             std::to_string(f) + "-" + std::to_string(b));
                    for (std::uint64_t i = 0; i < trials; ++i) {
                        if (!scheme.run(cell, f, b).agreed) ++bad;
                    }
                }
                if (f == 0 && b == 0 && bad != 0) zero_attack_clean = false;
                worst = std::max(worst, static_cast<double>(bad) / static_cast<double>(schemes * trials));
            }
        }
        return worst;
    };
    const double w16 = worst_cell(16, 30);
    const double w32 = worst_cell(32, 8);
    if (!(w16 > w32)) {
        pass = false;
        detail += "worst-cell rate did not fall: " + std::to_string(w16) + " -> " + std::to_string(w32) + "; ";
    }
    if (!zero_attack_clean) {
        pass = false;
        detail += "zero-attack column not exactly zero; ";
    }
    if (detail.empty()) {
        detail = "worst " + std::to_string(w16).substr(0, 7) + " -> " + std::to_string(w32).substr(0, 7) +
                 ", zero-attack clean";
    }
    report(9, "randomized-adversary disagreement falls with scale", pass, detail);
}

// 10. Byte-identical reruns for every command.
void criterion_10() {
    bool pass = true;
    std::string detail;
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"codes build --construction mds --n 3 --d 2 --m 3 --seed 11", "codes"},
        {"verify --preset example2 --m 2 --seed 11", "verify"},
        {"rates t2 --m 4:16:4 --n1 3 --n2 3 --t 1 --seed 11", "t2"},
        {"rates t3 --n 8,8 --t 3 --m 16 --seed 11", "t3"},
        {"rates t4 --l1 1 --l2 1 --tau 0.1 --seed 11", "t4"},
        {"simulate --r 16 --trials 500 --seed 11", "simulate"},
        {"cbs estimate --n 12 --trials 3000 --seed 11", "cbs"},
    };
    for (const auto& [args, tag] : cases) {
        const std::string out1 = g_scratch + "/c10_" + tag + "_1.txt";
        const std::string out2 = g_scratch + "/c10_" + tag + "_2.txt";
        const int e1 = run_cli(args, out1);
        const int e2 = run_cli(args, out2);
        if (e1 != e2 || e1 > 1 || slurp(out1) != slurp(out2) || slurp(out1).empty()) {
            pass = false;
            detail += tag + " not reproducible; ";
        }
    }
    if (detail.empty()) detail = std::to_string(cases.size()) + " commands byte-identical";
    report(10, "deterministic command output", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <cli-binary> <scratch-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_scratch = argv[2];

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
