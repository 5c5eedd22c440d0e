#pragma once

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "creconf/axioms.hpp"
#include "creconf/instance.hpp"
#include "creconf/rules.hpp"

namespace creconf {

// A pure committee predicate with a machine-readable self-description.
// `test` is the fast check; `explain` produces the per-step log entry a Path
// carries for offline re-verification.
struct Predicate {
    std::string name;
    std::function<bool(const Instance&, const CandidateSet&)> test;
    std::function<nlohmann::json(const Instance&, const CandidateSet&)> explain;

    static Predicate jr(const Alpha& alpha = Alpha::exact());
    static Predicate ejr(const Alpha& alpha = Alpha::exact(), uint32_t max_ell = 0);
    static Predicate ejr_plus();
    static Predicate in_choice_set(std::vector<CandidateSet> choice_set, std::string rule);
    static Predicate custom(std::string name,
                            std::function<bool(const Instance&, const CandidateSet&)> fn);
};

// A unit-step committee sequence; logs[i] records the predicate verdict for
// committees[i].
struct Path {
    std::string predicate;
    std::vector<CandidateSet> committees;
    std::vector<nlohmann::json> logs;

    std::size_t length() const { return committees.empty() ? 0 : committees.size() - 1; }
};

// Re-checks unit distances, endpoints and the per-step predicate; fills logs.
// Throws std::logic_error on any violation — constructive connectors call
// this before returning.
void validate_path(const Instance& inst, Path& path, const Predicate& pred,
                   const CandidateSet& from, const CandidateSet& to);

struct BfsResult {
    enum class Status { Found, Disconnected, BudgetExceeded };
    Status status;
    std::optional<Path> path;  // set iff Found
    uint64_t explored = 0;     // distinct committees whose predicate was evaluated
};

// Exact shortest path through pred-satisfying committees. "Disconnected" is
// only reported once the whole component of `from` has been exhausted;
// running out of budget is a distinct outcome.
BfsResult bfs_connect(const Instance& inst, const CandidateSet& from, const CandidateSet& to,
                      const Predicate& pred, uint64_t node_budget = 1'000'000);

struct IsolationResult {
    bool not_isolated = false;   // a pred-committee at distance 1 exists
    uint32_t radius = 0;         // largest r <= max_r with no pred-committee within r
    bool exhausted_max_r = false;  // nothing found up to max_r: radius is a lower bound
};

// Distance-layered neighbor enumeration around w.
IsolationResult isolation_radius(const Instance& inst, const CandidateSet& w,
                                 const Predicate& pred, uint32_t max_r);

// Greedy minimum-coverage-loss removal order c_1..c_k; the returned order
// satisfies |N_{W minus first s}| >= |N_W| - s*n/k for every prefix.
std::vector<uint32_t> removal_order(const Instance& inst, const CandidateSet& w);

// Any two JR committees are connected by at most 2k unit steps that all
// satisfy 2-JR (greedy core construction + bridge).
Path connect_two_jr(const Instance& inst, const CandidateSet& w, const CandidateSet& w2);

// Any two EJR committees are connected within 4-EJR via modified-PAV removals,
// violation-witness insertions and a shared size-⌊k/4⌋ 4-EJR core.
Path connect_ejr_4approx(const Instance& inst, const CandidateSet& w, const CandidateSet& w2);

// Builds a 4-EJR subcommittee of size at most ⌊k/4⌋ (greedy threshold-4ℓn/k
// variant, validated; exhaustive fallback at desk scale).
CandidateSet four_ejr_core(const Instance& inst);

struct AffordableTarget {
    Path path;            // JR-preserving, from W to a committee containing `core`
    CandidateSet core;    // affordable subcommittee satisfying JR
    PaymentSystem payments;
};

// Connects a committee produced by the named rule to a committee containing
// an affordable JR subcommittee. Throws on rule/committee mismatch.
AffordableTarget connect_to_affordable_jr(const Instance& inst, const CandidateSet& w,
                                          RuleTag rule);

// JR path between (completions of) two affordable JR subcommittees.
Path connect_affordable(const Instance& inst, const CandidateSet& aff, const CandidateSet& aff2);

// Composition: rule output -> affordable core -> affordable core -> rule output,
// every intermediate committee satisfying JR.
Path connect_rule_outputs(const Instance& inst, const CandidateSet& w, RuleTag rule,
                          const CandidateSet& w2, RuleTag rule2);

enum class IsolationAxiom { Ejr, EjrPlus };

struct NonIsolationResult {
    // Distance-1 committee satisfying the axiom, absent when no other
    // committee satisfying it exists at all (not isolated by definition).
    std::optional<CandidateSet> neighbor;
    std::string method;
};

// Constructive non-isolation witnesses for PAV/MES/GJCR outputs.
NonIsolationResult non_isolation_witness(const Instance& inst, const CandidateSet& w,
                                         RuleTag rule, IsolationAxiom axiom);

}  // namespace creconf
