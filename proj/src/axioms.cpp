#include "creconf/axioms.hpp"

#include <algorithm>

namespace creconf {

namespace {

// Smallest integer g with g*den >= num, clamped to cap+1 when unattainable.
uint64_t ceil_div_clamped(const mpz_class& num, const mpz_class& den, uint64_t cap) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (q > static_cast<unsigned long>(cap)) return cap + 1;
    return q.get_ui();
}

// Group-size threshold for an (α·ℓ)-large group: smallest g with g·k >= αℓn.
uint64_t group_threshold(const Instance& inst, const Alpha& alpha, uint64_t ell) {
    mpz_class num = alpha.value.get_num() * ell * inst.n();
    mpz_class den = alpha.value.get_den() * inst.k();
    return ceil_div_clamped(num, den, inst.n());
}

// Voters approving fewer than `ell` members of w.
VoterSet low_approvers(const Instance& inst, const std::vector<uint32_t>& counts, uint32_t ell) {
    VoterSet low = inst.empty_voter_set();
    for (uint32_t v = 0; v < inst.n(); ++v)
        if (counts[v] < ell) low.set(v);
    return low;
}

// DFS over candidate subsets of size `depth` in lex order, pruning on the
// running (common supporters ∩ eligible-voters) count. Calls leaf(T, group)
// for the first qualifying subset and stops.
struct SubsetScan {
    const Instance& inst;
    const std::vector<uint32_t>& candidates;  // ascending
    const VoterSet& low;
    uint64_t threshold;
    uint32_t depth;

    std::vector<uint32_t> chosen;
    std::optional<std::pair<std::vector<uint32_t>, VoterSet>> hit;

    void run() {
        VoterSet inter = low;
        descend(0, inter);
    }

    void descend(std::size_t from, const VoterSet& inter) {
        if (hit) return;
        if (chosen.size() == depth) {
            if (inter.count() >= threshold) hit.emplace(chosen, inter);
            return;
        }
        for (std::size_t i = from; i + (depth - chosen.size()) <= candidates.size() && !hit; ++i) {
            uint32_t c = candidates[i];
            VoterSet next = inter;
            and_into(next, inst.supports(c));
            if (next.count() < threshold) continue;
            chosen.push_back(c);
            descend(i + 1, next);
            chosen.pop_back();
        }
    }
};

}  // namespace

std::optional<JrWitness> check_jr(const Instance& inst, const CandidateSet& w, const Alpha& alpha,
                                  CohesionMode mode) {
    const uint64_t threshold = group_threshold(inst, alpha, 1);
    if (threshold > inst.n()) return std::nullopt;
    VoterSet uncovered = inst.empty_voter_set();
    {
        VoterSet cov = coverage(inst, w);
        for (uint32_t v = 0; v < inst.n(); ++v)
            if (!cov.test(v)) uncovered.set(v);
    }

    uint32_t need_common = 1;
    if (mode == CohesionMode::Literal) {
        mpz_class c;
        mpz_cdiv_q(c.get_mpz_t(), alpha.value.get_num().get_mpz_t(), alpha.value.get_den().get_mpz_t());
        need_common = static_cast<uint32_t>(std::min<uint64_t>(c.get_ui(), inst.m()));
    }

    if (need_common <= 1) {
        for (uint32_t c = 0; c < inst.m(); ++c) {
            if (inst.support_size(c) < threshold) continue;
            BitRow sup = inst.supports(c);
            if (count_and(sup, uncovered) >= threshold) {
                VoterSet group = uncovered;
                and_into(group, sup);
                return JrWitness{c, std::move(group)};
            }
        }
        return std::nullopt;
    }

    std::vector<uint32_t> eligible;
    for (uint32_t c = 0; c < inst.m(); ++c)
        if (inst.support_size(c) >= threshold) eligible.push_back(c);
    SubsetScan scan{inst, eligible, uncovered, threshold, need_common, {}, {}};
    scan.run();
    if (!scan.hit) return std::nullopt;
    return JrWitness{scan.hit->first.front(), std::move(scan.hit->second)};
}

std::optional<EjrWitness> check_ejr(const Instance& inst, const CandidateSet& w, const Alpha& alpha,
                                    uint32_t max_ell, CohesionMode mode) {
    if (max_ell == 0) max_ell = inst.k();
    if (max_ell > inst.k()) throw std::invalid_argument("check_ejr: max_ell out of range");
    const auto counts = approved_counts(inst, w);

    for (uint32_t ell = 1; ell <= max_ell; ++ell) {
        const uint64_t threshold = group_threshold(inst, alpha, ell);
        if (threshold > inst.n()) break;  // thresholds grow with ell

        uint32_t need_common = ell;
        if (mode == CohesionMode::Literal) {
            mpz_class c;
            mpz_class num = alpha.value.get_num() * ell;
            mpz_cdiv_q(c.get_mpz_t(), num.get_mpz_t(), alpha.value.get_den().get_mpz_t());
            uint64_t nc = std::min<uint64_t>(c.get_ui(), inst.m() + 1);
            need_common = static_cast<uint32_t>(nc);
        }
        if (need_common > inst.m()) continue;

        VoterSet low = low_approvers(inst, counts, ell);
        if (low.count() < threshold) continue;

        std::vector<uint32_t> eligible;
        for (uint32_t c = 0; c < inst.m(); ++c)
            if (inst.support_size(c) >= threshold) eligible.push_back(c);
        if (eligible.size() < need_common) continue;

        SubsetScan scan{inst, eligible, low, threshold, need_common, {}, {}};
        scan.run();
        if (scan.hit) {
            return EjrWitness{ell, make_candidate_set(inst, scan.hit->first),
                              std::move(scan.hit->second)};
        }
    }
    return std::nullopt;
}

std::optional<EjrPlusWitness> check_ejr_plus(const Instance& inst, const CandidateSet& w) {
    const auto counts = approved_counts(inst, w);
    for (uint32_t ell = 1; ell <= inst.k(); ++ell) {
        const uint64_t threshold =
            ceil_div_clamped(mpz_class(ell) * inst.n(), mpz_class(inst.k()), inst.n());
        if (threshold > inst.n()) break;
        VoterSet low = low_approvers(inst, counts, ell);
        if (low.count() < threshold) continue;
        for (uint32_t c = 0; c < inst.m(); ++c) {
            if (w.test(c) || inst.support_size(c) < threshold) continue;
            BitRow sup = inst.supports(c);
            if (count_and(sup, low) >= threshold) {
                VoterSet group = low;
                and_into(group, sup);
                return EjrPlusWitness{c, ell, std::move(group)};
            }
        }
    }
    return std::nullopt;
}

}  // namespace creconf
