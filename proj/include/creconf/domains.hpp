#pragma once

#include <optional>
#include <vector>

#include "creconf/instance.hpp"
#include "creconf/reconfig.hpp"

namespace creconf {

// Interval-domain certificate: under `ordering`, every voter's ballot (CI)
// or every candidate's support (VI) occupies consecutive positions. Always
// verified by a direct scan before being handed out.
struct DomainCertificate {
    enum class Kind { CandidateInterval, VoterInterval };
    Kind kind;
    std::vector<uint32_t> ordering;  // candidates (CI) or voters (VI)
};

std::optional<DomainCertificate> recognize_ci(const Instance& inst);
std::optional<DomainCertificate> recognize_vi(const Instance& inst);

// Candidates whose support strictly contains the support of c.
CandidateSet pareto_dominators(const Instance& inst, uint32_t c);

// Candidates not Pareto-dominated by anyone.
CandidateSet pareto_optimal_candidates(const Instance& inst);

// Shortest JR path on the CI domain: exactly distance(w, w2) steps, never
// leaving w ∪ w2.
Path connect_jr_ci(const Instance& inst, const DomainCertificate& cert, const CandidateSet& w,
                   const CandidateSet& w2);

// JR path on the VI domain: dominated members are first replaced by
// dominators, the dominated candidates are dropped from the instance (a VI
// instance without them is CI), and the CI connector finishes the job. With
// fewer than k Pareto-optimal candidates both sides are driven to supersets
// of the Pareto-optimal set instead.
Path connect_jr_vi(const Instance& inst, const DomainCertificate& cert, const CandidateSet& w,
                   const CandidateSet& w2);

}  // namespace creconf
