#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "keyagree/codebook_io.hpp"
#include "keyagree/codes.hpp"
#include "keyagree/rng.hpp"

#include <sstream>

using namespace keyagree;

namespace {

LinkTuple random_tuple(int n, int m, Rng& rng) {
    std::vector<std::uint32_t> values(static_cast<std::size_t>(n));
    for (auto& v : values) v = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << m));
    return LinkTuple(m, values);
}

}  // namespace

TEST_CASE("link distance counts differing links once") {
    Rng rng(1);
    const LinkTuple a = random_tuple(3, 4, rng);
    CHECK(link_distance(a, a) == 0);

    // All four bits of one message flip; still one link apart.
    LinkTuple b = a.with_message(1, Message(4, a.value(1) ^ 0xFu));
    CHECK(link_distance(a, b) == 1);

    LinkTuple c = a.with_message(0, Message(4, a.value(0) ^ 1u));
    c = c.with_message(2, Message(4, c.value(2) ^ 9u));
    CHECK(link_distance(a, c) == 2);

    CHECK_THROWS_AS(link_distance(a, random_tuple(4, 4, rng)), ParameterError);
    CHECK_THROWS_AS(link_distance(a, random_tuple(3, 3, rng)), ParameterError);
}

TEST_CASE("link distance is a metric") {
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        const LinkTuple a = random_tuple(5, 3, rng);
        const LinkTuple b = random_tuple(5, 3, rng);
        const LinkTuple c = random_tuple(5, 3, rng);
        CHECK(link_distance(a, b) == link_distance(b, a));
        CHECK((link_distance(a, b) == 0) == (a == b));
        CHECK(link_distance(a, c) <= link_distance(a, b) + link_distance(b, c));
    }
}

TEST_CASE("repetition codebooks") {
    const Codebook binary = build_repetition(3, 1);
    REQUIRE(binary.codewords().size() == 2);
    CHECK(binary.codewords()[0] == LinkTuple(1, {0, 0, 0}));
    CHECK(binary.codewords()[1] == LinkTuple(1, {1, 1, 1}));
    CHECK(binary.declared_min_distance() == 3);

    for (int m : {2, 3, 5}) {
        const Codebook cb = build_repetition(3, m);
        CHECK(cb.codewords().size() == std::size_t{1} << m);
        CHECK(cb.declared_min_distance() == 3);
        CHECK(min_distance(cb) == 3);
    }

    const Codebook two = build_repetition(2, 2);
    CHECK(two.codewords().size() == 4);
    CHECK(two.declared_min_distance() == 2);
}

TEST_CASE("full codebooks enumerate the whole space") {
    CHECK(build_full(2, 1).codewords().size() == 4);

    const Codebook cb = build_full(3, 2);
    CHECK(cb.codewords().size() == 64);
    CHECK(cb.declared_min_distance() == 1);
    CHECK(min_distance(cb) == 1);

    CHECK(codebook_log2_size(build_full(3, 1)) == 3);

    // Above the materialization cap enumeration refuses but membership and
    // sampling stay available.
    Caps caps;
    caps.materialize_log2 = 4;
    const Codebook big = build_full(3, 2, caps);
    CHECK_THROWS_AS(big.codewords(), CapacityError);
    Rng rng(3);
    CHECK(big.contains(random_tuple(3, 2, rng)));
}

TEST_CASE("mds codebooks meet the Singleton size with the declared distance") {
    const Codebook cb = build_mds(3, 2, 2);
    CHECK(cb.codewords().size() == 16);
    CHECK(min_distance(cb) == 2);

    // d = n collapses to the repetition construction.
    const Codebook rep_like = build_mds(3, 3, 2);
    CHECK(rep_like.codewords().size() == 4);
    for (const auto& w : rep_like.codewords()) {
        CHECK(w.value(0) == w.value(1));
        CHECK(w.value(1) == w.value(2));
    }

    const Codebook tiny = build_mds(2, 2, 1);
    REQUIRE(tiny.codewords().size() == 2);
    CHECK(tiny.codewords()[0] == LinkTuple(1, {0, 0}));
    CHECK(tiny.codewords()[1] == LinkTuple(1, {1, 1}));

    CHECK_THROWS_AS(build_mds(5, 2, 2), UnsupportedParameters);
}

TEST_CASE("constructed codebooks match their declared minimum distance") {
    for (int n : {2, 3, 4}) {
        for (int m : {1, 2, 3}) {
            if ((std::uint32_t{1} << m) < static_cast<std::uint32_t>(n)) continue;
            for (int d = 1; d <= n; ++d) {
                CAPTURE(n);
                CAPTURE(m);
                CAPTURE(d);
                const Codebook cb = build_mds(n, d, m);
                CHECK(codebook_log2_size(cb) == static_cast<std::int64_t>(m) * (n - d + 1));
                if (cb.codewords().size() >= 2) CHECK(min_distance(cb) == d);
            }
        }
    }
    CHECK(min_distance(build_repetition(3, 2)) == 3);
    CHECK(min_distance(build_full(2, 1)) == 1);
}

TEST_CASE("min_distance refuses oversized scans and tiny codebooks") {
    Caps caps;
    caps.distance_pairs = 100;
    CHECK_THROWS_AS(min_distance(build_mds(3, 2, 2), caps), CapacityError);
    CHECK_THROWS_AS(min_distance(make_explicit(2, 1, 1, {LinkTuple(1, {0, 0})})), ParameterError);
}

TEST_CASE("bounded distance decoding") {
    const Codebook rep = build_repetition(3, 1);

    SUBCASE("codeword inputs come back clean at any radius") {
        for (int radius : {0, 1, 2, 3}) {
            const auto out = bounded_distance_decode(rep, LinkTuple(1, {1, 1, 1}), radius);
            CHECK(out.kind == DecodeOutcome::Kind::clean);
            CHECK(*out.codeword == LinkTuple(1, {1, 1, 1}));
        }
        // Even when other codewords crowd the ball, membership wins.
        const Codebook full = build_full(2, 1);
        const auto out = bounded_distance_decode(full, LinkTuple(1, {0, 1}), 2);
        CHECK(out.kind == DecodeOutcome::Kind::clean);
        CHECK(*out.codeword == LinkTuple(1, {0, 1}));
    }

    SUBCASE("single corruption corrects to the nearer codeword") {
        const auto out = bounded_distance_decode(rep, LinkTuple(1, {1, 0, 0}), 1);
        REQUIRE(out.kind == DecodeOutcome::Kind::corrected);
        CHECK(*out.codeword == LinkTuple(1, {0, 0, 0}));
        CHECK(out.num_errors == 1);
    }

    SUBCASE("detection at radius zero") {
        const Codebook cb = build_mds(3, 2, 2);
        const LinkTuple cw = cb.codewords()[5];
        const LinkTuple bad = cw.with_message(0, Message(2, cw.value(0) ^ 3u));
        CHECK_FALSE(cb.contains(bad));
        CHECK(bounded_distance_decode(cb, bad, 0).kind == DecodeOutcome::Kind::detected);
    }

    SUBCASE("ambiguity is detected, not guessed") {
        // (1,0,0) sits at distance 1 from 000 and distance 2 from 111; at
        // radius 2 both qualify.
        const auto out = bounded_distance_decode(rep, LinkTuple(1, {1, 0, 0}), 2);
        CHECK(out.kind == DecodeOutcome::Kind::detected);
    }
}

TEST_CASE("unique decoding radius corrects every pattern exhaustively") {
    for (const Codebook& cb : {build_repetition(3, 2), build_mds(3, 2, 2), build_mds(5, 3, 3)}) {
        const int radius = (cb.declared_min_distance() - 1) / 2;
        for (const auto& cw : cb.codewords()) {
            for (int link = 0; link < cb.n(); ++link) {
                if (radius < 1) continue;
                for (std::uint32_t v = 0; v < (std::uint32_t{1} << cb.m()); ++v) {
                    if (v == cw.value(link)) continue;
                    const LinkTuple corrupted = cw.with_message(link, Message(cb.m(), v));
                    const auto out = bounded_distance_decode(cb, corrupted, radius);
                    REQUIRE(out.decoded());
                    CHECK(*out.codeword == cw);
                }
            }
        }
    }
}

TEST_CASE("corruptions below the distance never land on another codeword") {
    const Codebook cb = build_mds(4, 3, 2);
    Rng rng(11);
    for (const auto& cw : cb.codewords()) {
        for (int trial = 0; trial < 20; ++trial) {
            const int errors = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cb.declared_min_distance() - 1)));
            const auto links = sample_distinct(cb.n(), errors, rng);
            LinkTuple bad = cw;
            for (int link : links) {
                std::uint32_t v = cw.value(link);
                while (v == cw.value(link)) v = static_cast<std::uint32_t>(rng.below(4));
                bad = bad.with_message(link, Message(2, v));
            }
            CHECK_FALSE(cb.contains(bad));
            const auto out = bounded_distance_decode(cb, bad, 0);
            CHECK(out.kind == DecodeOutcome::Kind::detected);
        }
    }
}

TEST_CASE("algebraic and materialized mds paths agree") {
    Caps algebraic;
    algebraic.materialize_log2 = 0;
    const Codebook mat = build_mds(5, 3, 3);
    const Codebook alg = build_mds(5, 3, 3, algebraic);
    REQUIRE_FALSE(alg.is_materialized());

    Rng rng(13);
    for (int i = 0; i < 300; ++i) {
        const LinkTuple probe = random_tuple(5, 3, rng);
        CHECK(alg.contains(probe) == mat.contains(probe));
        const auto a = bounded_distance_decode(alg, probe, 1);
        const auto b = bounded_distance_decode(mat, probe, 1);
        CHECK(a.kind == b.kind);
        if (a.decoded()) CHECK(*a.codeword == *b.codeword);
    }

    // Sampling stays inside the codebook.
    for (int i = 0; i < 100; ++i) {
        CHECK(mat.contains(alg.sample(rng)));
    }
}

TEST_CASE("codebook log sizes") {
    CHECK(codebook_log2_size(build_repetition(3, 7)) == 7);
    CHECK(codebook_log2_size(build_mds(5, 2, 3)) == 12);
    CHECK(codebook_log2_size(build_full(4, 3)) == 12);

    const Codebook odd = make_explicit(2, 1, 1, {LinkTuple(1, {0, 0}), LinkTuple(1, {0, 1}), LinkTuple(1, {1, 0})});
    CHECK_THROWS_AS(codebook_log2_size(odd), ParameterError);
}

TEST_CASE("hex encoding round-trips") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const int m = 1 + static_cast<int>(rng.below(12));
        const LinkTuple t = random_tuple(n, m, rng);
        CHECK(LinkTuple::from_hex(n, m, t.to_hex()) == t);
    }
    CHECK(LinkTuple(1, {1, 0, 0}).to_hex() == "8");
    CHECK_THROWS_AS(LinkTuple::from_hex(3, 1, "f"), ParameterError);  // nonzero padding
    CHECK_THROWS_AS(LinkTuple::from_hex(3, 1, "zz"), ParameterError);
}

TEST_CASE("codebook files round-trip and validate") {
    const Codebook cb = build_mds(3, 2, 2);
    std::stringstream buffer;
    write_codebook(buffer, cb);

    const auto loaded = read_codebook(buffer);
    CHECK(loaded.recorded_tag == Construction::mds);
    CHECK(loaded.field_poly == 0x7);
    CHECK(loaded.codebook.n() == 3);
    CHECK(loaded.codebook.m() == 2);
    CHECK(loaded.codebook.declared_min_distance() == 2);
    REQUIRE(loaded.codebook.codewords().size() == 16);
    CHECK(min_distance(loaded.codebook) == 2);

    std::set<LinkTuple> original(cb.codewords().begin(), cb.codewords().end());
    std::set<LinkTuple> reread(loaded.codebook.codewords().begin(), loaded.codebook.codewords().end());
    CHECK(original == reread);

    std::stringstream junk("not a codebook\n");
    CHECK_THROWS_AS(read_codebook(junk), ParameterError);
}

TEST_CASE("explicit codebooks reject duplicates and shape mismatches") {
    CHECK_THROWS_AS(make_explicit(2, 1, 1, {LinkTuple(1, {0, 0}), LinkTuple(1, {0, 0})}), ParameterError);
    CHECK_THROWS_AS(make_explicit(2, 1, 1, {LinkTuple(1, {0, 0, 1})}), ParameterError);
    CHECK_THROWS_AS(make_explicit(2, 1, 3, {LinkTuple(1, {0, 0})}), ParameterError);
}
