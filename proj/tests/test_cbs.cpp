#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <map>
#include <set>

#include "keyagree/cbs.hpp"
#include "support/stats.hpp"

using namespace keyagree;

TEST_CASE("channel validation and ball radius") {
    CHECK(CbsChannel(10, 0.25).max_weight() == 2);
    CHECK(CbsChannel(4, 0.49).max_weight() == 1);
    CHECK_THROWS_AS(CbsChannel(10, 0.5), ParameterError);
    CHECK_THROWS_AS(CbsChannel(10, -0.1), ParameterError);
    CHECK_THROWS_AS(CbsChannel(0, 0.1), ParameterError);
}

TEST_CASE("error sampling stays in the ball and hits it uniformly") {
    Rng rng(21);

    SUBCASE("degenerate ball is the zero word") {
        const CbsChannel ch(8, 0.1);  // floor(0.8) = 0
        for (int i = 0; i < 200; ++i) CHECK(sample_cbs_error(ch, rng) == 0);
    }

    SUBCASE("weight never exceeds the cap") {
        const CbsChannel ch(20, 0.3);
        for (int i = 0; i < 20000; ++i) {
            CHECK(std::popcount(sample_cbs_error(ch, rng)) <= ch.max_weight());
        }
    }

    SUBCASE("five-word ball is uniform") {
        const CbsChannel ch(4, 0.26);  // floor(1.04) = 1: ball {0000, each single bit}
        std::map<std::uint64_t, std::uint64_t> counts;
        const std::uint64_t draws = 100000;
        for (std::uint64_t i = 0; i < draws; ++i) ++counts[sample_cbs_error(ch, rng)];
        REQUIRE(counts.size() == 5);
        std::vector<std::uint64_t> observed;
        for (const auto& [word, c] : counts) observed.push_back(c);
        const std::vector<double> expected(5, static_cast<double>(draws) / 5.0);
        CHECK(test::chi2_statistic(observed, expected) < test::chi2_critical_1e3(4));
    }

    SUBCASE("weight histogram follows the binomial layer sizes") {
        const CbsChannel ch(10, 0.35);  // weights 0..3
        std::vector<std::uint64_t> observed(4, 0);
        const std::uint64_t draws = 100000;
        for (std::uint64_t i = 0; i < draws; ++i) {
            ++observed[static_cast<std::size_t>(std::popcount(sample_cbs_error(ch, rng)))];
        }
        double ball = 0;
        for (int w = 0; w <= 3; ++w) ball += static_cast<double>(binomial(10, w));
        std::vector<double> expected;
        for (int w = 0; w <= 3; ++w) {
            expected.push_back(static_cast<double>(draws) * static_cast<double>(binomial(10, w)) / ball);
        }
        CHECK(test::chi2_statistic(observed, expected) < test::chi2_critical_1e3(3));
    }
}

TEST_CASE("random code construction") {
    Rng rng(22);

    SUBCASE("codewords are pairwise distinct") {
        const RandomCode code(12, 5, rng);
        std::set<std::uint64_t> seen(code.words().begin(), code.words().end());
        CHECK(seen.size() == 32);
    }

    SUBCASE("a rate rounding never falls below the target") {
        for (int n : {11, 12, 16, 20}) {
            for (double s : {0.1, 0.25, 0.4}) {
                CHECK(static_cast<double>(dimension_for_rate(n, s)) / n >= s - 1e-12);
            }
        }
    }

    SUBCASE("degenerate one-codeword code decodes trivially") {
        RandomCode code(8, 0, rng);
        REQUIRE(code.count() == 1);
        code.set_decode_radius(2);
        CHECK(bd_decode_random(code, code.word(1)) == 1);
    }

    SUBCASE("the enumeration cap refuses oversized codes") {
        Caps tight;
        tight.random_code_bits = 4;
        CHECK_THROWS_AS(build_random_code(40, 0.5, rng, tight), CapacityError);
    }
}

TEST_CASE("strict decode radius realizes weight < n*xi") {
    CHECK(strict_radius(12, 0.2) == 2);   // 2.4
    CHECK(strict_radius(16, 0.2) == 3);   // 3.2
    CHECK(strict_radius(20, 0.2) == 3);   // integer product stays strict
    CHECK(strict_radius(19, 0.1) == 1);   // 1.9
    CHECK(strict_radius(16, 0.05) == 0);  // 0.8
}

TEST_CASE("bounded distance decoding over random codes") {
    Rng rng(23);

    // A hand-built code with far-apart codewords behaves predictably.
    RandomCode code(12, 2, rng);
    // Re-draw until the minimum distance is at least 5 so radius-2 decoding
    // is unambiguous (tiny codes reach this quickly).
    auto min_dist = [](const RandomCode& c) {
        int best = 64;
        for (std::size_t i = 0; i < c.words().size(); ++i) {
            for (std::size_t j = i + 1; j < c.words().size(); ++j) {
                best = std::min(best, std::popcount(c.words()[i] ^ c.words()[j]));
            }
        }
        return best;
    };
    while (min_dist(code) < 5) code = RandomCode(12, 2, rng);
    code.set_decode_radius(2);

    SUBCASE("exact and near hits decode to the sent index") {
        for (std::uint64_t i = 1; i <= code.count(); ++i) {
            CHECK(bd_decode_random(code, code.word(i)) == i);
            CHECK(bd_decode_random(code, code.word(i) ^ 0b11) == i);
        }
    }

    SUBCASE("far words fail to zero") {
        for (std::uint64_t i = 1; i <= code.count(); ++i) {
            std::uint64_t far = code.word(i);
            int flips = 0;
            for (int bit = 0; bit < 12 && flips < 3; ++bit) {
                const std::uint64_t cand = far ^ (std::uint64_t{1} << bit);
                bool still_far = true;
                for (const auto w : code.words()) {
                    if (std::popcount(cand ^ w) <= 2) still_far = false;
                }
                if (still_far) {
                    far = cand;
                    ++flips;
                }
            }
            if (flips == 3) CHECK(bd_decode_random(code, far) == 0);
        }
    }

    SUBCASE("ambiguity between two codewords fails to zero") {
        // Construct a word halfway between two codewords when the distance
        // budget allows one.
        const std::uint64_t a = code.words()[0];
        const std::uint64_t b = code.words()[1];
        std::uint64_t mid = a;
        int moved = 0;
        for (int bit = 0; bit < 12 && moved < std::popcount(a ^ b) / 2; ++bit) {
            if (((a ^ b) >> bit) & 1u) {
                mid ^= std::uint64_t{1} << bit;
                ++moved;
            }
        }
        code.set_decode_radius(std::popcount(a ^ b));  // both inside now
        CHECK(bd_decode_random(code, mid) == 0);
    }
}

TEST_CASE("isolated codewords always correct within the design fraction") {
    Rng rng(24);
    const int n = 14;
    const double xi = 0.2;  // radius 2
    // Hand-placed far-apart codewords: pairwise distance 7 > 2 * n * xi.
    RandomCode code(n, 2, rng);
    auto spread = [&]() {
        return std::popcount(code.words()[0] ^ code.words()[1]) > 5 &&
               std::popcount(code.words()[0] ^ code.words()[2]) > 5 &&
               std::popcount(code.words()[0] ^ code.words()[3]) > 5 &&
               std::popcount(code.words()[1] ^ code.words()[2]) > 5 &&
               std::popcount(code.words()[1] ^ code.words()[3]) > 5 &&
               std::popcount(code.words()[2] ^ code.words()[3]) > 5;
    };
    while (!spread()) code = RandomCode(n, 2, rng);
    code.set_decode_radius(strict_radius(n, xi));

    const CbsChannel ch(n, 0.15);  // floor(2.1) = 2 <= radius
    for (int trial = 0; trial < 5000; ++trial) {
        const std::uint64_t sent = rng.below(code.count()) + 1;
        const std::uint64_t received = code.word(sent) ^ sample_cbs_error(ch, rng);
        CHECK(bd_decode_random(code, received) == sent);
    }
}

TEST_CASE("failure estimation accounting") {
    Rng rng(25);
    RandomCode code = build_random_code(12, 0.25, rng);
    code.set_decode_radius(strict_radius(12, 0.2));

    SUBCASE("no injected errors means no correction failures") {
        const CbsChannel quiet(12, 0.05);  // floor(0.6) = 0
        const auto est = estimate_failures(code, quiet, 2000, rng);
        CHECK(est.p_correction == 0.0);
        CHECK(est.p_detection == 0.0);
    }

    SUBCASE("estimates stay inside [0,1] and detection failures are a subset") {
        const CbsChannel ch(12, 0.4);
        const auto est = estimate_failures(code, ch, 5000, rng);
        CHECK(est.p_correction >= 0.0);
        CHECK(est.p_correction <= 1.0);
        CHECK(est.p_detection <= est.p_correction);
        CHECK(est.trials == 5000);
    }

    CHECK_THROWS_AS(estimate_failures(code, CbsChannel(11, 0.1), 10, rng), ParameterError);
    CHECK_THROWS_AS(estimate_failures(code, CbsChannel(12, 0.1), 0, rng), ParameterError);
}
