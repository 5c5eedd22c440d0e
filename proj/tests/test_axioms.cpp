#include <doctest.h>

#include <random>

#include "creconf/axioms.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace creconf;
using testutil::cs;

TEST_CASE("JR on example 1") {
    Instance inst = testutil::example1();
    CHECK(!check_jr(inst, cs(inst, {0, 2, 3})));
    CHECK(!check_jr(inst, cs(inst, {1, 4, 5})));

    auto w = check_jr(inst, cs(inst, {2, 3, 4}));
    REQUIRE(w);
    // violation caused by the first three voters via candidate 0 (or 1)
    CHECK((w->candidate == 0 || w->candidate == 1));
    CHECK(testutil::as_set(w->group) == std::set<uint32_t>{0, 1, 2});
}

TEST_CASE("JR trivially holds when no candidate has a large support") {
    Instance inst = parse_instance("6 4 2\n0\n1\n2\n3\n0\n1\n");  // every support of size 2 < 3
    CHECK(!check_jr(inst, cs(inst, {0, 1})));
    CHECK(!check_jr(inst, inst.empty_candidate_set()));
}

TEST_CASE("EJR on example 1") {
    Instance inst = testutil::example1();
    CHECK(!check_ejr(inst, cs(inst, {0, 2, 3})));

    auto w = check_ejr(inst, cs(inst, {1, 4, 5}));
    REQUIRE(w);
    CHECK(w->ell == 2);
    CHECK(testutil::as_set(w->common) == std::set<uint32_t>{2, 3});
    CHECK(testutil::as_set(w->group) == std::set<uint32_t>{3, 4, 5, 6, 7, 8});
}

TEST_CASE("EJR on table 3: {c1,c2,c3} satisfies it") {
    Instance inst = testutil::civi_table();
    CHECK(!check_ejr(inst, cs(inst, {0, 1, 2})));
    CHECK(!check_ejr(inst, cs(inst, {2, 5, 6})));
    // swapping across breaks EJR
    CHECK(check_ejr(inst, cs(inst, {0, 2, 5})));
}

TEST_CASE("EJR with W = C when m = k") {
    Instance inst = parse_instance("4 3 3\n0 1 2\n0 1\n2\n0 2\n");
    CHECK(!check_ejr(inst, cs(inst, {0, 1, 2})));
}

TEST_CASE("EJR+ when m = k") {
    Instance inst = parse_instance("4 3 3\n0 1 2\n0 1\n2\n0 2\n");
    CHECK(!check_ejr_plus(inst, cs(inst, {0, 1, 2})));
}

TEST_CASE("checkers agree with brute-force oracles on random instances") {
    std::mt19937_64 rng(20250814);
    for (int iter = 0; iter < 400; ++iter) {
        uint32_t n = 2 + rng() % 9, m = 2 + rng() % 9;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 5);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.2 + 0.5 * (rng() % 100) / 100.0);
        auto ballots = testutil::ballots_of(inst);
        CandidateSet w = inst.empty_candidate_set();
        {
            std::vector<uint32_t> perm(m);
            for (uint32_t i = 0; i < m; ++i) perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), rng);
            for (uint32_t i = 0; i < k; ++i) w.set(perm[i]);
        }
        auto ws = testutil::as_set(w);
        CHECK(static_cast<bool>(check_jr(inst, w)) == oracle::jr_violated(ballots, m, k, ws));
        CHECK(static_cast<bool>(check_ejr(inst, w)) == oracle::ejr_violated(ballots, m, k, ws));
        CHECK(static_cast<bool>(check_ejr_plus(inst, w)) ==
              oracle::ejr_plus_violated(ballots, m, k, ws));
        // α = 3/2 cross-check for the approximate JR reading
        CHECK(static_cast<bool>(check_jr(inst, w, Alpha::of(3, 2))) ==
              oracle::jr_violated(ballots, m, k, ws, 3, 2));
        CHECK(static_cast<bool>(check_ejr(inst, w, Alpha::of(2))) ==
              oracle::ejr_violated(ballots, m, k, ws, 2, 1));
    }
}

TEST_CASE("witness invariants hold when reported") {
    std::mt19937_64 rng(31337);
    int seen_jr = 0, seen_ejr = 0, seen_plus = 0;
    for (int iter = 0; iter < 300; ++iter) {
        uint32_t n = 3 + rng() % 10, m = 3 + rng() % 8;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.35);
        CandidateSet w = complete_committee(inst, inst.empty_candidate_set());

        if (auto jw = check_jr(inst, w)) {
            ++seen_jr;
            CHECK(jw->group.count() * k >= n);
            CHECK(jw->group.is_subset_of(inst.supports(jw->candidate).to_bitset()));
            CHECK(!jw->group.intersects(coverage(inst, w)));
        }
        if (auto ew = check_ejr(inst, w)) {
            ++seen_ejr;
            CHECK(ew->common.count() == ew->ell);
            CHECK(ew->group.count() * k >= static_cast<uint64_t>(ew->ell) * n);
            auto counts = approved_counts(inst, w);
            ew->group.for_each([&](uint32_t v) {
                CHECK(counts[v] < ew->ell);
                CHECK(count_and(inst.approvals(v), ew->common) == ew->ell);
            });
        }
        if (auto pw = check_ejr_plus(inst, w)) {
            ++seen_plus;
            CHECK(!w.test(pw->candidate));
            CHECK(pw->group.count() * k >= static_cast<uint64_t>(pw->ell) * n);
        }
    }
    CHECK(seen_jr > 10);
    CHECK(seen_ejr > 10);
    CHECK(seen_plus > 10);
}

TEST_CASE("alpha monotonicity: passing a small alpha implies passing larger ones") {
    std::mt19937_64 rng(555);
    for (int iter = 0; iter < 200; ++iter) {
        uint32_t n = 3 + rng() % 10, m = 3 + rng() % 8;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        CandidateSet w = complete_committee(inst, inst.empty_candidate_set());
        std::vector<Alpha> alphas = {Alpha::exact(), Alpha::of(3, 2), Alpha::of(2)};
        for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
            if (!check_jr(inst, w, alphas[i])) CHECK(!check_jr(inst, w, alphas[i + 1]));
            if (!check_ejr(inst, w, alphas[i])) CHECK(!check_ejr(inst, w, alphas[i + 1]));
        }
    }
}

TEST_CASE("EJR+ implies EJR implies JR") {
    std::mt19937_64 rng(777);
    for (int iter = 0; iter < 300; ++iter) {
        uint32_t n = 3 + rng() % 10, m = 3 + rng() % 8;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        CandidateSet w = complete_committee(inst, inst.empty_candidate_set());
        if (!check_ejr_plus(inst, w)) CHECK(!check_ejr(inst, w));
        if (!check_ejr(inst, w)) CHECK(!check_jr(inst, w));
    }
}

TEST_CASE("adding candidates never creates a JR violation") {
    std::mt19937_64 rng(888);
    for (int iter = 0; iter < 200; ++iter) {
        uint32_t n = 3 + rng() % 10, m = 3 + rng() % 8;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 5);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        CandidateSet small = inst.empty_candidate_set();
        for (uint32_t c = 0; c < m && small.count() + 1 < k; ++c)
            if (rng() % 2) small.set(c);
        if (check_jr(inst, small)) continue;
        CandidateSet big = small;
        for (uint32_t c = 0; c < m && big.count() < k; ++c) big.set(c);
        CHECK(!check_jr(inst, big));
    }
}

TEST_CASE("lemma: JR committees overlap 2-large 1-cohesive groups in > n/k voters") {
    std::mt19937_64 rng(4242);
    for (int iter = 0; iter < 200; ++iter) {
        uint32_t n = 4 + rng() % 9, m = 3 + rng() % 7;
        uint32_t k = 2 + rng() % std::min<uint32_t>(m - 1, 3);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.5);
        CandidateSet w = complete_committee(inst, inst.empty_candidate_set());
        if (check_jr(inst, w)) continue;
        VoterSet cov = coverage(inst, w);
        // maximal 1-cohesive groups are candidate supports; every 2-large one
        // must overlap the covered voters in more than n/k members
        for (uint32_t c = 0; c < m; ++c) {
            uint64_t sz = inst.support_size(c);
            if (sz * k < 2ull * n) continue;
            uint64_t overlap = count_and(inst.supports(c), cov);
            CHECK(overlap * k > n);
        }
    }
}

TEST_CASE("literal cohesion mode demands ceil(alpha) common candidates") {
    // Two candidates approved together by 4 of 6 voters; k = 2, so a 2-JR
    // violation under the literal reading needs ceil(2) = 2 common candidates.
    Instance inst = parse_instance("6 4 2\n0 1\n0 1\n0 1\n0 1\n2\n3\n");
    auto w = cs(inst, {2, 3});
    // exact JR is violated (support 4 >= 3 uncovered)
    REQUIRE(check_jr(inst, w));
    // proof reading at alpha = 2: candidate 0 has 4 uncovered supporters < 6
    CHECK(!check_jr(inst, w, Alpha::of(2)));
    // alpha = 4/3: threshold 4 voters; violated in both readings here
    CHECK(check_jr(inst, w, Alpha::of(4, 3), CohesionMode::ProofReading));
    CHECK(check_jr(inst, w, Alpha::of(4, 3), CohesionMode::Literal));
    // but if the pair stops sharing one candidate, the literal reading passes
    Instance inst2 = parse_instance("6 4 2\n0\n0\n0\n0\n2\n3\n");
    auto w2 = cs(inst2, {2, 3});
    CHECK(check_jr(inst2, w2, Alpha::of(4, 3), CohesionMode::ProofReading));
    CHECK(!check_jr(inst2, w2, Alpha::of(4, 3), CohesionMode::Literal));
}

TEST_CASE("alpha below one is rejected") {
    CHECK_THROWS_AS(Alpha::of(1, 2), std::invalid_argument);
}
