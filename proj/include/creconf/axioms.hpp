#pragma once

#include <optional>
#include <string>

#include "creconf/instance.hpp"
#include "creconf/rational.hpp"

namespace creconf {

// Approximation factor for the α-variants of the axioms. α = 1 is the exact
// axiom.
struct Alpha {
    Rational value;

    explicit Alpha(Rational v) : value(std::move(v)) {
        if (value < 1) throw std::invalid_argument("alpha must be >= 1");
    }
    static Alpha exact() { return Alpha(Rational(1)); }
    static Alpha of(long num, long den = 1) { return Alpha(rat(num, den)); }
    bool is_exact() const { return value == 1; }
};

// The paper's α-cohesiveness demands |∩ A_v| >= αℓ read literally, while its
// proofs only use ℓ common candidates. Both readings are available; the
// proof-consistent one is the default.
enum class CohesionMode { ProofReading, Literal };

struct JrWitness {
    uint32_t candidate;
    VoterSet group;
};

struct EjrWitness {
    uint32_t ell;
    CandidateSet common;
    VoterSet group;
};

struct EjrPlusWitness {
    uint32_t candidate;  // outside W
    uint32_t ell;
    VoterSet group;
};

// α-JR: absent iff no candidate c has >= α·n/k supporters none of whom
// approves a member of W (ProofReading). Witnesses carry the maximal group
// and the smallest qualifying candidate index.
std::optional<JrWitness> check_jr(const Instance& inst, const CandidateSet& w,
                                  const Alpha& alpha = Alpha::exact(),
                                  CohesionMode mode = CohesionMode::ProofReading);

// α-EJR: absent iff for no ℓ in [max_ell] there is an ℓ-subset T of candidates
// whose common supporters that approve < ℓ members of W number >= α·ℓ·n/k.
// Brute force over candidate ℓ-subsets with intersection-size pruning;
// max_ell caps the sweep (defaults to k when 0).
std::optional<EjrWitness> check_ejr(const Instance& inst, const CandidateSet& w,
                                    const Alpha& alpha = Alpha::exact(), uint32_t max_ell = 0,
                                    CohesionMode mode = CohesionMode::ProofReading);

// EJR+: polynomial check over (candidate outside W, ℓ) pairs.
std::optional<EjrPlusWitness> check_ejr_plus(const Instance& inst, const CandidateSet& w);

}  // namespace creconf
