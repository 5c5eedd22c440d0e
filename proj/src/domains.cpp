#include "creconf/domains.hpp"

#include <algorithm>
#include <stdexcept>

#include "creconf/pqtree.hpp"

namespace creconf {

namespace {

// row sets must be consecutive under `ordering` of the column universe
bool intervals_ok(const std::vector<std::vector<uint32_t>>& rows,
                  const std::vector<uint32_t>& ordering, uint32_t universe) {
    std::vector<uint32_t> pos(universe);
    for (uint32_t i = 0; i < ordering.size(); ++i) pos[ordering[i]] = i;
    for (const auto& row : rows) {
        if (row.size() <= 1) continue;
        uint32_t lo = universe, hi = 0;
        for (uint32_t x : row) {
            lo = std::min(lo, pos[x]);
            hi = std::max(hi, pos[x]);
        }
        if (hi - lo + 1 != row.size()) return false;
    }
    return true;
}

std::optional<std::vector<uint32_t>> consecutive_ones_order(
    const std::vector<std::vector<uint32_t>>& rows, uint32_t universe) {
    PQTree tree(universe);
    for (const auto& row : rows) {
        if (row.size() <= 1 || row.size() >= universe) continue;
        if (!tree.reduce(row)) return std::nullopt;
    }
    auto ordering = tree.frontier();
    if (!intervals_ok(rows, ordering, universe))
        throw std::logic_error("consecutive-ones ordering failed post-verification");
    return ordering;
}

}  // namespace

std::optional<DomainCertificate> recognize_ci(const Instance& inst) {
    std::vector<std::vector<uint32_t>> rows(inst.n());
    for (uint32_t v = 0; v < inst.n(); ++v) rows[v] = inst.approvals(v).to_indices();
    auto ord = consecutive_ones_order(rows, inst.m());
    if (!ord) return std::nullopt;
    return DomainCertificate{DomainCertificate::Kind::CandidateInterval, std::move(*ord)};
}

std::optional<DomainCertificate> recognize_vi(const Instance& inst) {
    std::vector<std::vector<uint32_t>> rows(inst.m());
    for (uint32_t c = 0; c < inst.m(); ++c) rows[c] = inst.supports(c).to_indices();
    auto ord = consecutive_ones_order(rows, inst.n());
    if (!ord) return std::nullopt;
    return DomainCertificate{DomainCertificate::Kind::VoterInterval, std::move(*ord)};
}

CandidateSet pareto_dominators(const Instance& inst, uint32_t c) {
    if (c >= inst.m()) throw std::invalid_argument("candidate out of range");
    CandidateSet out = inst.empty_candidate_set();
    for (uint32_t other = 0; other < inst.m(); ++other) {
        if (other == c) continue;
        if (row_strict_subset(inst.supports(c), inst.supports(other))) out.set(other);
    }
    return out;
}

CandidateSet pareto_optimal_candidates(const Instance& inst) {
    CandidateSet out = inst.empty_candidate_set();
    for (uint32_t c = 0; c < inst.m(); ++c)
        if (!pareto_dominators(inst, c).any()) out.set(c);
    return out;
}

Path connect_jr_ci(const Instance& inst, const DomainCertificate& cert, const CandidateSet& w,
                   const CandidateSet& w2) {
    if (cert.kind != DomainCertificate::Kind::CandidateInterval ||
        cert.ordering.size() != inst.m())
        throw std::invalid_argument("connect_jr_ci: not a CI certificate for this instance");
    Predicate pred = Predicate::jr();
    if (!pred.test(inst, w) || !pred.test(inst, w2))
        throw std::invalid_argument("connect_jr_ci: endpoints must satisfy JR");

    std::vector<uint32_t> pos(inst.m());
    for (uint32_t i = 0; i < inst.m(); ++i) pos[cert.ordering[i]] = i;

    // First (in CI position) member of `of` missing from `other`.
    auto first_missing = [&](const CandidateSet& of, const CandidateSet& other) {
        uint32_t best = inst.m(), best_pos = inst.m();
        of.for_each([&](uint32_t c) {
            if (!other.test(c) && pos[c] < best_pos) {
                best = c;
                best_pos = pos[c];
            }
        });
        return best;
    };

    std::vector<CandidateSet> fronts{w}, backs{w2};
    CandidateSet front = w, back = w2;
    while (front != back) {
        uint32_t dx = first_missing(front, back);
        uint32_t ey = first_missing(back, front);
        if (pos[dx] < pos[ey]) {
            front.reset(dx);
            front.set(ey);
            fronts.push_back(front);
        } else {
            back.reset(ey);
            back.set(dx);
            backs.push_back(back);
        }
    }

    std::vector<CandidateSet> committees = std::move(fronts);
    for (auto it = backs.rbegin(); it != backs.rend(); ++it) committees.push_back(*it);
    // drop the duplicated meeting point
    for (std::size_t i = 1; i < committees.size(); ++i)
        if (committees[i] == committees[i - 1]) {
            committees.erase(committees.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }

    Path path{pred.name, std::move(committees), {}};
    validate_path(inst, path, pred, w, w2);
    if (path.length() != distance(w, w2))
        throw std::logic_error("CI path is not a shortest path");
    return path;
}

namespace {

// Replaces dominated members by Pareto-optimal candidates until either no
// dominated member remains (stop_at_popt_subset = false requires all of
// `popt` collected instead). Appends one committee per swap.
void pareto_cleanup(const Instance& inst, const CandidateSet& popt,
                    std::vector<CandidateSet>& steps, bool collect_all_popt) {
    CandidateSet cur = steps.back();
    while (true) {
        if (collect_all_popt && popt.is_subset_of(cur)) break;
        CandidateSet dominated = cur - popt;
        if (!collect_all_popt && !dominated.any()) break;
        if (!dominated.any()) throw std::logic_error("pareto cleanup: no dominated member left");
        uint32_t out = dominated.next_set_bit(0);
        CandidateSet doms = pareto_dominators(inst, out);
        doms &= popt;
        doms -= cur;
        uint32_t in;
        if (doms.any()) {
            in = doms.next_set_bit(0);
        } else {
            CandidateSet rest = popt - cur;
            if (!rest.any()) throw std::logic_error("pareto cleanup: no replacement available");
            in = rest.next_set_bit(0);
        }
        cur.reset(out);
        cur.set(in);
        steps.push_back(cur);
    }
}

}  // namespace

Path connect_jr_vi(const Instance& inst, const DomainCertificate& cert, const CandidateSet& w,
                   const CandidateSet& w2) {
    if (cert.kind != DomainCertificate::Kind::VoterInterval || cert.ordering.size() != inst.n())
        throw std::invalid_argument("connect_jr_vi: not a VI certificate for this instance");
    Predicate pred = Predicate::jr();
    if (!pred.test(inst, w) || !pred.test(inst, w2))
        throw std::invalid_argument("connect_jr_vi: endpoints must satisfy JR");

    CandidateSet popt = pareto_optimal_candidates(inst);

    std::vector<CandidateSet> a{w}, b{w2};
    const bool enough_popt = popt.count() >= inst.k();
    pareto_cleanup(inst, popt, a, !enough_popt);
    pareto_cleanup(inst, popt, b, !enough_popt);

    std::vector<CandidateSet> committees = a;
    if (enough_popt) {
        // drop dominated candidates; the remainder is a CI instance
        auto keep = popt.to_indices();
        std::vector<uint32_t> to_new(inst.m(), inst.m());
        for (uint32_t i = 0; i < keep.size(); ++i) to_new[keep[i]] = i;
        std::vector<std::vector<uint32_t>> ballots(inst.n());
        for (uint32_t v = 0; v < inst.n(); ++v)
            inst.approvals(v).for_each([&](uint32_t c) {
                if (to_new[c] != inst.m()) ballots[v].push_back(to_new[c]);
            });
        Instance reduced(static_cast<uint32_t>(keep.size()), inst.k(), ballots);
        auto ci = recognize_ci(reduced);
        if (!ci)
            throw std::logic_error("VI instance without dominated candidates is not CI");
        auto remap = [&](const CandidateSet& s) {
            CandidateSet out = reduced.empty_candidate_set();
            s.for_each([&](uint32_t c) { out.set(to_new[c]); });
            return out;
        };
        Path mid = connect_jr_ci(reduced, *ci, remap(a.back()), remap(b.back()));
        for (std::size_t i = 1; i < mid.committees.size(); ++i) {
            CandidateSet mapped = inst.empty_candidate_set();
            mid.committees[i].for_each([&](uint32_t c) { mapped.set(keep[c]); });
            committees.push_back(mapped);
        }
    } else {
        // both sides now contain every Pareto-optimal candidate; swap freely
        CandidateSet cur = a.back();
        const CandidateSet& goal = b.back();
        while (cur != goal) {
            uint32_t in = (goal - cur).next_set_bit(0);
            CandidateSet removable = (cur - goal) - popt;
            if (!removable.any()) throw std::logic_error("VI bridge: nothing removable");
            cur.reset(removable.next_set_bit(0));
            cur.set(in);
            committees.push_back(cur);
        }
    }
    for (auto it = b.rbegin(); it != b.rend(); ++it) committees.push_back(*it);

    std::vector<CandidateSet> steps;
    for (auto& c : committees)
        if (steps.empty() || steps.back() != c) steps.push_back(std::move(c));
    Path path{pred.name, std::move(steps), {}};
    validate_path(inst, path, pred, w, w2);
    return path;
}

}  // namespace creconf
