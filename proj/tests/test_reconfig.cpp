#include <doctest.h>

#include <random>

#include "creconf/reconfig.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace creconf;
using testutil::cs;

namespace {

std::vector<CandidateSet> committees_satisfying(const Instance& inst, const Predicate& pred) {
    std::vector<CandidateSet> out;
    for (const auto& s : oracle::all_committees(inst.m(), inst.k())) {
        CandidateSet w = make_candidate_set(inst, {s.begin(), s.end()});
        if (pred.test(inst, w)) out.push_back(w);
    }
    return out;
}

}  // namespace

TEST_CASE("bfs finds the shortest JR path on example 1") {
    Instance inst = testutil::example1();
    auto res = bfs_connect(inst, cs(inst, {0, 2, 3}), cs(inst, {1, 4, 5}), Predicate::jr());
    REQUIRE(res.status == BfsResult::Status::Found);
    CHECK(res.path->length() == 3);
    // the paper's explicit 4-committee path is one witness of length 3
}

TEST_CASE("bfs with identical endpoints") {
    Instance inst = testutil::example1();
    auto res = bfs_connect(inst, cs(inst, {0, 2, 3}), cs(inst, {0, 2, 3}), Predicate::jr());
    REQUIRE(res.status == BfsResult::Status::Found);
    CHECK(res.path->length() == 0);
}

TEST_CASE("bfs on table 2: JR-connected but not in two steps") {
    Instance inst = testutil::vi_table();
    auto res = bfs_connect(inst, cs(inst, {0, 1}), cs(inst, {2, 3}), Predicate::jr());
    REQUIRE(res.status == BfsResult::Status::Found);
    CHECK(res.path->length() == 3);
}

TEST_CASE("bfs rejects endpoints violating the predicate") {
    Instance inst = testutil::example1();
    CHECK_THROWS_AS(bfs_connect(inst, cs(inst, {2, 3, 4}), cs(inst, {0, 2, 3}), Predicate::jr()),
                    std::invalid_argument);
}

TEST_CASE("bfs distinguishes budget exhaustion from disconnection") {
    Instance inst = testutil::example1();
    auto res = bfs_connect(inst, cs(inst, {0, 2, 3}), cs(inst, {1, 4, 5}), Predicate::jr(), 3);
    CHECK(res.status == BfsResult::Status::BudgetExceeded);
}

TEST_CASE("grid choice set is disconnected (full component exhaustion)") {
    Instance inst = parse_instance("4 4 2\n0 2\n0 3\n1 2\n1 3\n");  // r = 2 grid
    auto winners = pav_exact(inst);
    REQUIRE(winners.size() == 2);
    auto pred = Predicate::in_choice_set(winners, "pav");
    auto res = bfs_connect(inst, winners[0], winners[1], pred);
    CHECK(res.status == BfsResult::Status::Disconnected);
}

TEST_CASE("bfs agrees with the naive full-graph oracle") {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 60; ++iter) {
        uint32_t n = 3 + rng() % 8, m = 3 + rng() % 5;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 3);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.45);
        auto jr = committees_satisfying(inst, Predicate::jr());
        if (jr.size() < 2) continue;
        std::vector<std::set<uint32_t>> nodes;
        for (const auto& w : jr) nodes.push_back(testutil::as_set(w));
        for (int pair = 0; pair < 3; ++pair) {
            const auto& a = jr[rng() % jr.size()];
            const auto& b = jr[rng() % jr.size()];
            auto res = bfs_connect(inst, a, b, Predicate::jr());
            int expect = oracle::full_graph_bfs(nodes, testutil::as_set(a), testutil::as_set(b));
            if (res.status == BfsResult::Status::Found) {
                CHECK(expect == static_cast<int>(res.path->length()));
            } else {
                CHECK(res.status == BfsResult::Status::Disconnected);
                CHECK(expect == -1);
            }
        }
    }
}

TEST_CASE("isolation radius basics") {
    Instance inst = parse_instance("4 4 2\n0 2\n0 3\n1 2\n1 3\n");
    auto winners = pav_exact(inst);
    auto pred = Predicate::in_choice_set(winners, "pav");
    SUBCASE("nearest other choice-set member is at distance 2") {
        auto res = isolation_radius(inst, winners[0], pred, 2);
        CHECK(!res.not_isolated);
        CHECK(res.radius == 1);
        CHECK(!res.exhausted_max_r);
    }
    SUBCASE("max_r caps the scan") {
        auto res = isolation_radius(inst, winners[0], pred, 1);
        CHECK(res.radius == 1);
        CHECK(res.exhausted_max_r);
    }
    SUBCASE("a JR neighbor exists, so not isolated under JR") {
        auto res = isolation_radius(inst, winners[0], Predicate::jr(), 1);
        CHECK(res.not_isolated);
    }
    CHECK_THROWS_AS(isolation_radius(inst, cs(inst, {0, 2}), pred, 1), std::invalid_argument);
}

TEST_CASE("proposition: isolation radius of JR committees is at most k-2") {
    std::mt19937_64 rng(3030);
    int tested = 0;
    for (int iter = 0; iter < 120 && tested < 60; ++iter) {
        uint32_t n = 4 + rng() % 12, m = 4 + rng() % 6;
        uint32_t k = 3 + rng() % std::min<uint32_t>(m - 2, 3);
        if (k > m) continue;
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        auto jr = committees_satisfying(inst, Predicate::jr());
        if (jr.size() < 2) continue;
        ++tested;
        for (const auto& w : jr) {
            auto res = isolation_radius(inst, w, Predicate::jr(), inst.k() - 1);
            CHECK((res.not_isolated || res.radius <= inst.k() - 2));
        }
    }
    CHECK(tested >= 30);
}

TEST_CASE("removal order: disjoint equal supports keep the bound tight") {
    Instance inst = parse_instance("6 3 3\n0\n0\n1\n1\n2\n2\n");
    auto order = removal_order(inst, cs(inst, {0, 1, 2}));
    CHECK(order.size() == 3);  // the internal bound assertion did the real work
}

TEST_CASE("removal order bound holds on random committees") {
    std::mt19937_64 rng(4040);
    for (int iter = 0; iter < 500; ++iter) {
        uint32_t n = 3 + rng() % 12, m = 3 + rng() % 8;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 5);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        CandidateSet w = inst.empty_candidate_set();
        std::vector<uint32_t> perm(m);
        for (uint32_t i = 0; i < m; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (uint32_t i = 0; i < k; ++i) w.set(perm[i]);
        auto order = removal_order(inst, w);  // throws if any prefix breaks the bound
        CHECK(order.size() == k);
        // explicit re-check of every prefix
        uint64_t base = coverage(inst, w).count();
        CandidateSet cur = w;
        for (std::size_t s = 0; s < order.size(); ++s) {
            cur.reset(order[s]);
            uint64_t cov = coverage(inst, cur).count();
            CHECK((base - cov) * k <= (s + 1) * static_cast<uint64_t>(n));
        }
    }
}

TEST_CASE("connect_two_jr on example 1") {
    Instance inst = testutil::example1();
    auto w = cs(inst, {0, 2, 3}), w2 = cs(inst, {1, 4, 5});
    Path p = connect_two_jr(inst, w, w2);
    CHECK(p.length() <= 6);
    CHECK(p.committees.front() == w);
    CHECK(p.committees.back() == w2);
    for (const auto& step : p.committees) CHECK(!check_jr(inst, step, Alpha::of(2)));
}

TEST_CASE("connect_two_jr trivial and error cases") {
    Instance inst = testutil::example1();
    auto w = cs(inst, {0, 2, 3});
    Path p = connect_two_jr(inst, w, w);
    CHECK(p.length() == 0);
    CHECK_THROWS_AS(connect_two_jr(inst, cs(inst, {2, 3, 4}), w), std::invalid_argument);
}

TEST_CASE("connect_two_jr over random instances, cross-validated against BFS") {
    std::mt19937_64 rng(5050);
    int connected = 0;
    for (int iter = 0; iter < 120; ++iter) {
        uint32_t n = 4 + rng() % 14, m = 4 + rng() % 6;
        uint32_t k = 2 + rng() % std::min<uint32_t>(m - 1, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.35);
        auto jr = committees_satisfying(inst, Predicate::jr());
        if (jr.size() < 2) continue;
        const auto& a = jr[rng() % jr.size()];
        const auto& b = jr[rng() % jr.size()];
        Path p = connect_two_jr(inst, a, b);  // validates 2-JR per step internally
        CHECK(p.length() <= 2 * inst.k());
        auto res = bfs_connect(inst, a, b, Predicate::jr(Alpha::of(2)));
        REQUIRE(res.status == BfsResult::Status::Found);
        CHECK(res.path->length() <= p.length());
        ++connected;
    }
    CHECK(connected >= 40);
}

TEST_CASE("four_ejr_core is small and clean") {
    std::mt19937_64 rng(6060);
    for (int iter = 0; iter < 150; ++iter) {
        uint32_t n = 4 + rng() % 16, m = 4 + rng() % 8;
        uint32_t k = 2 + rng() % std::min<uint32_t>(m - 1, 5);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        CandidateSet core = four_ejr_core(inst);
        CHECK(core.count() <= inst.k() / 4);
        CHECK(!check_ejr(inst, core, Alpha::of(4)));
    }
}

TEST_CASE("connect_ejr_4approx over random instances") {
    std::mt19937_64 rng(7070);
    int connected = 0;
    for (int iter = 0; iter < 200 && connected < 60; ++iter) {
        uint32_t n = 4 + rng() % 20, m = 4 + rng() % 8;
        uint32_t k = 2 + rng() % std::min<uint32_t>(m - 1, 5);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        auto ejr = committees_satisfying(inst, Predicate::ejr());
        if (ejr.size() < 2) continue;
        const auto& a = ejr[rng() % ejr.size()];
        const auto& b = ejr[rng() % ejr.size()];
        if (a == b) continue;
        Path p = connect_ejr_4approx(inst, a, b);  // per-step alpha=4 checks inside
        CHECK(p.committees.front() == a);
        CHECK(p.committees.back() == b);
        ++connected;
    }
    CHECK(connected >= 40);
}

TEST_CASE("connect_ejr_4approx trivial case") {
    Instance inst = testutil::example1();
    auto w = cs(inst, {0, 2, 3});
    CHECK(connect_ejr_4approx(inst, w, w).length() == 0);
}

TEST_CASE("connect_to_affordable_jr: MES core qualifies immediately") {
    std::mt19937_64 rng(8080);
    for (int iter = 0; iter < 50; ++iter) {
        uint32_t n = 3 + rng() % 10, m = 3 + rng() % 6;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.45);
        auto out = mes(inst);
        auto target = connect_to_affordable_jr(inst, out.committee, RuleTag::Mes);
        CHECK(target.path.length() == 0);
        CHECK(target.core == out.core);
        CHECK(target.payments.valid_for(inst, target.core));
    }
}

TEST_CASE("connect_to_affordable_jr on the table 1 CCAV committee") {
    Instance inst = testutil::ccav_table();
    auto w = cs(inst, {0, 1, 2});
    auto target = connect_to_affordable_jr(inst, w, RuleTag::Ccav);
    CHECK(target.path.committees.front() == w);
    CHECK(is_affordable(inst, target.core));
    CHECK(!check_jr(inst, target.core));
    CHECK(target.core.is_subset_of(target.path.committees.back()));
    // the certificate pins the only affordable JR subcommittee here: {c4}
    CHECK(target.core.test(3));
}

TEST_CASE("connect_to_affordable_jr across all rules on random instances") {
    std::mt19937_64 rng(9090);
    for (int iter = 0; iter < 60; ++iter) {
        uint32_t n = 3 + rng() % 12, m = 3 + rng() % 6;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        for (RuleTag tag : {RuleTag::Mes, RuleTag::Gjcr, RuleTag::GreedyEjr, RuleTag::SeqCcav,
                            RuleTag::SeqPhragmen, RuleTag::Ccav, RuleTag::Pav}) {
            CandidateSet w = run_rule(inst, tag).committee;
            auto target = connect_to_affordable_jr(inst, w, tag);
            CHECK(is_affordable(inst, target.core));
            CHECK(!check_jr(inst, target.core));
            CHECK(target.core.is_subset_of(target.path.committees.back()));
            CHECK(target.payments.valid_for(inst, target.core));
        }
    }
}

TEST_CASE("connect_to_affordable_jr rejects mismatched committees") {
    Instance inst = testutil::ccav_table();
    // {c1,c2,c4} is not a CCAV winner (coverage 5 < 6)
    CHECK_THROWS_AS(connect_to_affordable_jr(inst, cs(inst, {0, 1, 3}), RuleTag::Ccav),
                    std::invalid_argument);
}

TEST_CASE("connect_affordable basics") {
    Instance inst = parse_instance("4 4 2\n0 2\n0 2\n1 3\n1 3\n");
    SUBCASE("identical cores") {
        auto p = connect_affordable(inst, cs(inst, {0, 1}), cs(inst, {0, 1}));
        CHECK(p.length() == 0);
    }
    SUBCASE("disjoint full-size cores use the pigeonhole ejection") {
        auto p = connect_affordable(inst, cs(inst, {0, 1}), cs(inst, {2, 3}));
        CHECK(p.committees.front() == cs(inst, {0, 1}));
        CHECK(p.committees.back() == cs(inst, {2, 3}));
    }
    SUBCASE("nested cores") {
        Instance inst2 = parse_instance("4 4 2\n0 1\n0 1\n0\n0\n");
        auto p = connect_affordable(inst2, cs(inst2, {0}), cs(inst2, {0, 1}));
        CHECK(p.committees.back() == cs(inst2, {0, 1}));
    }
    SUBCASE("invalid certificates are rejected") {
        CHECK_THROWS_AS(connect_affordable(inst, cs(inst, {0}), cs(inst, {1, 2})),
                        std::invalid_argument);
    }
}

TEST_CASE("connect_affordable across rule cores on random instances") {
    std::mt19937_64 rng(111213);
    int done = 0;
    for (int iter = 0; iter < 80 && done < 40; ++iter) {
        uint32_t n = 3 + rng() % 12, m = 3 + rng() % 6;
        uint32_t k = 2 + rng() % std::min<uint32_t>(m - 1, 3);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.45);
        CandidateSet a = mes(inst).core;
        RuleOutput ph = seq_phragmen(inst);
        Rational cutoff = rat(k, n);
        CandidateSet b = inst.empty_candidate_set();
        for (const auto& e : ph.trace)
            if (*e.event <= cutoff) b.set(e.candidate);
        if (check_jr(inst, a) || check_jr(inst, b)) continue;  // cores are JR by theory
        auto p = connect_affordable(inst, a, b);
        CHECK(p.committees.size() >= 1);
        ++done;
    }
    CHECK(done >= 30);
}

TEST_CASE("connect_rule_outputs keeps every step JR") {
    Instance inst = testutil::ccav_table();
    auto wp = pav_exact(inst).front();
    auto wc = ccav_exact(inst).front();
    Path p = connect_rule_outputs(inst, wp, RuleTag::Pav, wc, RuleTag::Ccav);
    CHECK(p.committees.front() == wp);
    CHECK(p.committees.back() == wc);
    for (const auto& step : p.committees) CHECK(!check_jr(inst, step));
}

TEST_CASE("connect_rule_outputs over random instances and rule pairs") {
    std::mt19937_64 rng(141516);
    for (int iter = 0; iter < 40; ++iter) {
        uint32_t n = 3 + rng() % 10, m = 3 + rng() % 6;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        RuleTag tags[] = {RuleTag::Mes, RuleTag::SeqPhragmen, RuleTag::GreedyEjr, RuleTag::Pav};
        RuleTag f = tags[rng() % 4], f2 = tags[rng() % 4];
        CandidateSet w = run_rule(inst, f).committee;
        CandidateSet w2 = run_rule(inst, f2).committee;
        Path p = connect_rule_outputs(inst, w, f, w2, f2);  // validates JR per step
        CHECK(p.committees.front() == w);
        CHECK(p.committees.back() == w2);
    }
}

TEST_CASE("non_isolation_witness: m == k means only one committee") {
    Instance inst = parse_instance("4 3 3\n0 1 2\n0 1\n2\n0 2\n");
    auto res = non_isolation_witness(inst, cs(inst, {0, 1, 2}), RuleTag::Pav, IsolationAxiom::Ejr);
    CHECK(!res.neighbor);
    CHECK(res.method == "only-committee");
}

TEST_CASE("non_isolation_witness on the grid PAV committee") {
    Instance inst = parse_instance("9 6 3\n0 3\n0 4\n0 5\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n");
    auto rows = pav_exact(inst).front();
    for (auto axiom : {IsolationAxiom::Ejr, IsolationAxiom::EjrPlus}) {
        auto res = non_isolation_witness(inst, rows, RuleTag::Pav, axiom);
        REQUIRE(res.neighbor);
        CHECK(distance(rows, *res.neighbor) == 1);
        if (axiom == IsolationAxiom::EjrPlus)
            CHECK(!check_ejr_plus(inst, *res.neighbor));
        else
            CHECK(!check_ejr(inst, *res.neighbor));
    }
}

TEST_CASE("non_isolation_witness across rules on random instances") {
    std::mt19937_64 rng(171819);
    int produced = 0;
    for (int iter = 0; iter < 150; ++iter) {
        uint32_t n = 3 + rng() % 12, m = 3 + rng() % 7;
        uint32_t k = 1 + rng() % std::min<uint32_t>(m, 4);
        Instance inst = testutil::random_instance(rng, n, m, k, 0.4);
        for (RuleTag tag : {RuleTag::Pav, RuleTag::Mes, RuleTag::Gjcr}) {
            CandidateSet w = run_rule(inst, tag).committee;
            for (auto axiom : {IsolationAxiom::Ejr, IsolationAxiom::EjrPlus}) {
                if (axiom == IsolationAxiom::EjrPlus && check_ejr_plus(inst, w)) continue;
                auto res = non_isolation_witness(inst, w, tag, axiom);
                if (!res.neighbor) continue;  // provably the only axiom-committee
                ++produced;
                CHECK(distance(w, *res.neighbor) == 1);
                if (axiom == IsolationAxiom::EjrPlus)
                    CHECK(!check_ejr_plus(inst, *res.neighbor));
                else
                    CHECK(!check_ejr(inst, *res.neighbor));
            }
        }
    }
    CHECK(produced >= 100);
}

TEST_CASE("non_isolation_witness validates its inputs") {
    Instance inst = testutil::example1();
    CHECK_THROWS_AS(
        non_isolation_witness(inst, cs(inst, {1, 4, 5}), RuleTag::Pav, IsolationAxiom::Ejr),
        std::invalid_argument);  // violates EJR
    CHECK_THROWS_AS(
        non_isolation_witness(inst, cs(inst, {0, 2, 3}), RuleTag::SeqCcav, IsolationAxiom::Ejr),
        std::invalid_argument);  // unsupported rule
}

TEST_CASE("paths carry machine-checkable logs") {
    Instance inst = testutil::example1();
    auto res = bfs_connect(inst, cs(inst, {0, 2, 3}), cs(inst, {1, 4, 5}), Predicate::jr());
    REQUIRE(res.status == BfsResult::Status::Found);
    REQUIRE(res.path->logs.size() == res.path->committees.size());
    for (const auto& log : res.path->logs) {
        CHECK(log.at("satisfied").get<bool>());
        CHECK(log.at("axiom") == "jr");
    }
}
