#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "creconf/axioms.hpp"
#include "creconf/instance.hpp"
#include "creconf/rational.hpp"

namespace creconf {

// Per-(voter, candidate) payments certifying affordability (Definition of a
// payment system: approvers only, voter totals at most k/n, each charged
// candidate fully funded at cost 1).
struct PaymentSystem {
    std::map<std::pair<uint32_t, uint32_t>, Rational> payments;

    Rational voter_total(uint32_t voter) const;
    Rational candidate_total(uint32_t candidate) const;
    bool valid_for(const Instance& inst, const CandidateSet& charged) const;
};

struct TraceEntry {
    uint32_t candidate;
    // MES: the price q̂; seqPhragmén: purchase time; seqCCAV: coverage gain.
    std::optional<Rational> event;
    std::vector<std::pair<uint32_t, Rational>> charges;
};

struct RuleOutput {
    CandidateSet committee;  // size exactly k
    CandidateSet core;       // the rule's pre-completion subcommittee
    std::optional<PaymentSystem> payments;
    std::vector<TraceEntry> trace;
};

enum class RuleTag { Gjcr, Mes, Pav, Ccav, SeqCcav, GreedyEjr, SeqPhragmen };

std::string rule_name(RuleTag tag);
std::optional<RuleTag> rule_from_name(const std::string& name);

// Greedy Justified Candidate Rule: sweeps ℓ from k down to 1, adding the
// candidate with the largest EJR+ violation and splitting its unit cost over
// the violating voters.
RuleOutput gjcr(const Instance& inst);

// Method of Equal Shares with exact rational prices.
RuleOutput mes(const Instance& inst);

// seqCCAV: greedily add the candidate with the largest coverage gain.
RuleOutput seq_ccav(const Instance& inst);

// GreedyEJR: repeatedly serve the largest cohesive group among the remaining
// voters, then delete it.
RuleOutput greedy_ejr(const Instance& inst);

// seqPhragmén: continuous budgets growing at unit speed, exact event times.
RuleOutput seq_phragmen(const Instance& inst);

// Exact PAV / CCAV: all committees maximizing the respective score.
// Guarded exhaustive search; throws when C(m,k) exceeds the desk-scale limit.
std::vector<CandidateSet> pav_exact(const Instance& inst);
std::vector<CandidateSet> ccav_exact(const Instance& inst);

Rational pav_score(const Instance& inst, const CandidateSet& w);

// Marginal PAV contribution PAV(W) - PAV(W \ {c}); requires c in W.
Rational pav_marginal(const Instance& inst, const CandidateSet& w, uint32_t c);

// Affordability certificate via integral max-flow in units of 1/n; returns
// the recovered payment system, or absent when W is not affordable.
std::optional<PaymentSystem> is_affordable(const Instance& inst, const CandidateSet& w);

// Uniform entry point; for the irresolute rules (PAV, CCAV) the committee is
// the lexicographically first maximizer.
RuleOutput run_rule(const Instance& inst, RuleTag tag);

uint64_t committee_count_guarded(uint32_t m, uint32_t k, uint64_t limit);

}  // namespace creconf
