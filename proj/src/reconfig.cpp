#include "creconf/reconfig.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace creconf {

namespace {

using nlohmann::json;

json voters_json(const VoterSet& vs) { return json(vs.to_indices()); }

std::vector<uint32_t> sorted_indices(const DynBitset& b) { return b.to_indices(); }

// ---------------------------------------------------------------------------
// Path building machinery shared by all constructive connectors.
// ---------------------------------------------------------------------------

struct SwapPathBuilder {
    const Instance& inst;
    CandidateSet cur;
    std::vector<CandidateSet> committees;

    SwapPathBuilder(const Instance& in, const CandidateSet& start) : inst(in), cur(start) {
        if (cur.count() != inst.k()) throw std::invalid_argument("start is not a committee");
        committees.push_back(cur);
    }

    void swap(uint32_t out, uint32_t in) {
        if (!cur.test(out) || cur.test(in)) throw std::logic_error("invalid swap in path builder");
        cur.reset(out);
        cur.set(in);
        committees.push_back(cur);
    }

    // Swap toward `target` while never removing a member of `keep`.
    void march_to(const CandidateSet& target, const CandidateSet& keep) {
        while (cur != target) {
            uint32_t in = (target - cur).next_set_bit(0);
            CandidateSet removable = (cur - target) - keep;
            if (!removable.any()) throw std::logic_error("march_to: nothing removable");
            swap(removable.next_set_bit(0), static_cast<uint32_t>(in));
        }
    }
};

// Mirrors the subcommittee removal/witness processes of the constructive
// proofs at the committee level. Removals shrink the bookkeeping subcommittee
// only; each witness that is not already on the committee is swapped in for
// the earliest still-present pool candidate (fillers first, then removed
// candidates in removal order). Candidates re-added as witnesses are
// protected from later swap-outs, so the committee always contains the most
// recently restored subcommittee.
CandidateSet run_remove_add(SwapPathBuilder& b, const CandidateSet& sub0,
                            const std::vector<uint32_t>& order,
                            const std::function<std::optional<uint32_t>(const CandidateSet&)>&
                                find_witness) {
    CandidateSet sub = sub0;
    CandidateSet added = b.inst.empty_candidate_set();
    std::vector<uint32_t> pool = sorted_indices(b.cur - sub0);  // completion fillers

    auto add_witness = [&](uint32_t w) {
        if (sub.test(w)) throw std::logic_error("witness already in subcommittee");
        sub.set(w);
        added.set(w);
        if (b.cur.test(w)) return;  // a filler or a not-yet-ejected candidate
        for (uint32_t out : pool) {
            if (b.cur.test(out) && !added.test(out)) {
                b.swap(out, w);
                return;
            }
        }
        throw std::logic_error("no pool candidate available for witness swap");
    };

    for (uint32_t c : order) {
        if (!sub.test(c)) throw std::logic_error("removal order leaves the subcommittee");
        sub.reset(c);
        pool.push_back(c);
        while (auto w = find_witness(sub)) add_witness(*w);
    }
    return sub;
}

std::optional<uint32_t> jr_witness_candidate(const Instance& inst, const CandidateSet& sub,
                                             const Alpha& alpha) {
    auto wit = check_jr(inst, sub, alpha);
    if (!wit) return std::nullopt;
    return wit->candidate;
}

// Smallest-index addable candidate from the lexicographically first α-EJR
// violation.
std::optional<uint32_t> ejr_witness_candidate(const Instance& inst, const CandidateSet& sub,
                                              const Alpha& alpha) {
    auto wit = check_ejr(inst, sub, alpha);
    if (!wit) return std::nullopt;
    for (uint32_t c = wit->common.next_set_bit(0); c < inst.m();
         c = wit->common.next_set_bit(c + 1))
        if (!sub.test(c)) return c;
    throw std::logic_error("EJR witness candidates all inside the subcommittee");
}

void append_reversed(std::vector<CandidateSet>& dst, const std::vector<CandidateSet>& src) {
    for (auto it = src.rbegin(); it != src.rend(); ++it) dst.push_back(*it);
}

Path finish_path(const Instance& inst, std::vector<CandidateSet> committees,
                 const Predicate& pred, const CandidateSet& from, const CandidateSet& to) {
    // collapse duplicates introduced at segment boundaries
    std::vector<CandidateSet> steps;
    for (auto& c : committees)
        if (steps.empty() || steps.back() != c) steps.push_back(std::move(c));
    Path path{pred.name, std::move(steps), {}};
    validate_path(inst, path, pred, from, to);
    return path;
}

// ---------------------------------------------------------------------------
// Modified PAV score machinery (4-EJR connector).
// ---------------------------------------------------------------------------

// Δ_W(sub, c) = Σ_{v ∈ N_c, |A_v∩sub| <= |A_v∩W|} 1/|A_v∩sub|, for c ∈ sub.
Rational modified_marginal(const Instance& inst, const std::vector<uint32_t>& base_counts,
                           const std::vector<uint32_t>& sub_counts, uint32_t c) {
    Rational sum = 0;
    inst.supports(c).for_each([&](uint32_t v) {
        if (sub_counts[v] <= base_counts[v]) sum += rat(1, sub_counts[v]);
    });
    return sum;
}

}  // namespace

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

Predicate Predicate::jr(const Alpha& alpha) {
    std::string name = "jr(alpha=" + fraction_str(alpha.value) + ")";
    return Predicate{
        name,
        [alpha](const Instance& inst, const CandidateSet& w) {
            return !check_jr(inst, w, alpha);
        },
        [alpha](const Instance& inst, const CandidateSet& w) {
            json j{{"axiom", "jr"}, {"alpha", fraction_str(alpha.value)}};
            auto wit = check_jr(inst, w, alpha);
            j["satisfied"] = !wit;
            if (wit)
                j["witness"] = {{"ell", 1},
                                {"candidates", std::vector<uint32_t>{wit->candidate}},
                                {"voters", voters_json(wit->group)}};
            return j;
        }};
}

Predicate Predicate::ejr(const Alpha& alpha, uint32_t max_ell) {
    std::string name = "ejr(alpha=" + fraction_str(alpha.value) + ")";
    return Predicate{
        name,
        [alpha, max_ell](const Instance& inst, const CandidateSet& w) {
            return !check_ejr(inst, w, alpha, max_ell);
        },
        [alpha, max_ell](const Instance& inst, const CandidateSet& w) {
            json j{{"axiom", "ejr"}, {"alpha", fraction_str(alpha.value)}};
            auto wit = check_ejr(inst, w, alpha, max_ell);
            j["satisfied"] = !wit;
            if (wit)
                j["witness"] = {{"ell", wit->ell},
                                {"candidates", wit->common.to_indices()},
                                {"voters", voters_json(wit->group)}};
            return j;
        }};
}

Predicate Predicate::ejr_plus() {
    return Predicate{
        "ejr+",
        [](const Instance& inst, const CandidateSet& w) { return !check_ejr_plus(inst, w); },
        [](const Instance& inst, const CandidateSet& w) {
            json j{{"axiom", "ejr+"}};
            auto wit = check_ejr_plus(inst, w);
            j["satisfied"] = !wit;
            if (wit)
                j["witness"] = {{"ell", wit->ell},
                                {"candidates", std::vector<uint32_t>{wit->candidate}},
                                {"voters", voters_json(wit->group)}};
            return j;
        }};
}

Predicate Predicate::in_choice_set(std::vector<CandidateSet> choice_set, std::string rule) {
    auto shared = std::make_shared<std::vector<CandidateSet>>(std::move(choice_set));
    std::string name = "choice(" + rule + ")";
    auto member = [shared](const Instance&, const CandidateSet& w) {
        return std::find(shared->begin(), shared->end(), w) != shared->end();
    };
    return Predicate{name, member, [member, rule](const Instance& inst, const CandidateSet& w) {
                         return json{{"axiom", "in_choice_set"},
                                     {"rule", rule},
                                     {"satisfied", member(inst, w)}};
                     }};
}

Predicate Predicate::custom(std::string name,
                            std::function<bool(const Instance&, const CandidateSet&)> fn) {
    auto f = fn;
    return Predicate{std::move(name), fn,
                     [f](const Instance& inst, const CandidateSet& w) {
                         return json{{"axiom", "custom"}, {"satisfied", f(inst, w)}};
                     }};
}

void validate_path(const Instance& inst, Path& path, const Predicate& pred,
                   const CandidateSet& from, const CandidateSet& to) {
    if (path.committees.empty()) throw std::logic_error("empty path");
    if (path.committees.front() != from || path.committees.back() != to)
        throw std::logic_error("path endpoints do not match");
    path.logs.clear();
    path.predicate = pred.name;
    for (std::size_t i = 0; i < path.committees.size(); ++i) {
        const auto& w = path.committees[i];
        if (w.count() != inst.k()) throw std::logic_error("path step is not a committee");
        if (i > 0 && distance(path.committees[i - 1], w) != 1)
            throw std::logic_error("path step " + std::to_string(i) + " is not a unit swap");
        json log = pred.explain(inst, w);
        if (!log.value("satisfied", false))
            throw std::logic_error("path step " + std::to_string(i) + " violates " + pred.name);
        path.logs.push_back(std::move(log));
    }
}

// ---------------------------------------------------------------------------
// Exact search
// ---------------------------------------------------------------------------

BfsResult bfs_connect(const Instance& inst, const CandidateSet& from, const CandidateSet& to,
                      const Predicate& pred, uint64_t node_budget) {
    if (from.count() != inst.k() || to.count() != inst.k())
        throw std::invalid_argument("bfs_connect: endpoints must be committees");
    if (!pred.test(inst, from) || !pred.test(inst, to))
        throw std::invalid_argument("bfs_connect: endpoint violates the predicate");

    BfsResult res{BfsResult::Status::Disconnected, std::nullopt, 0};
    std::unordered_map<DynBitset, DynBitset, DynBitsetHash> parent;
    std::deque<CandidateSet> queue;
    std::unordered_set<DynBitset, DynBitsetHash> seen;  // predicate evaluated
    seen.insert(from);
    res.explored = 1;
    queue.push_back(from);

    while (!queue.empty()) {
        CandidateSet w = queue.front();
        queue.pop_front();
        if (w == to) {
            std::vector<CandidateSet> rev{w};
            while (rev.back() != from) rev.push_back(parent.at(rev.back()));
            std::reverse(rev.begin(), rev.end());
            Path path{pred.name, std::move(rev), {}};
            validate_path(inst, path, pred, from, to);
            res.status = BfsResult::Status::Found;
            res.path = std::move(path);
            return res;
        }
        auto members = sorted_indices(w);
        for (uint32_t out : members) {
            for (uint32_t in = 0; in < inst.m(); ++in) {
                if (w.test(in)) continue;
                CandidateSet next = w;
                next.reset(out);
                next.set(in);
                if (seen.count(next)) continue;
                if (res.explored >= node_budget) {
                    res.status = BfsResult::Status::BudgetExceeded;
                    return res;
                }
                seen.insert(next);
                ++res.explored;
                if (!pred.test(inst, next)) continue;
                parent.emplace(next, w);
                queue.push_back(next);
            }
        }
    }
    return res;  // component exhausted without reaching `to`
}

IsolationResult isolation_radius(const Instance& inst, const CandidateSet& w,
                                 const Predicate& pred, uint32_t max_r) {
    if (!pred.test(inst, w)) throw std::invalid_argument("isolation_radius: predicate violated");
    const auto members = sorted_indices(w);
    std::vector<uint32_t> outside;
    for (uint32_t c = 0; c < inst.m(); ++c)
        if (!w.test(c)) outside.push_back(c);

    auto combos = [](std::size_t n, uint32_t d) {
        std::vector<std::vector<uint32_t>> all;
        if (d > n) return all;
        std::vector<uint32_t> idx(d);
        for (uint32_t i = 0; i < d; ++i) idx[i] = i;
        while (true) {
            all.push_back(idx);
            int i = static_cast<int>(d) - 1;
            while (i >= 0 && idx[i] == n - d + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (uint32_t j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
        }
        return all;
    };

    IsolationResult res;
    for (uint32_t d = 1; d <= std::min<uint32_t>(max_r, inst.k()); ++d) {
        for (const auto& outs : combos(members.size(), d)) {
            for (const auto& ins : combos(outside.size(), d)) {
                CandidateSet cand = w;
                for (uint32_t i : outs) cand.reset(members[i]);
                for (uint32_t i : ins) cand.set(outside[i]);
                if (pred.test(inst, cand)) {
                    res.not_isolated = (d == 1);
                    res.radius = d - 1;
                    return res;
                }
            }
        }
    }
    res.radius = max_r;
    res.exhausted_max_r = true;
    return res;
}

std::vector<uint32_t> removal_order(const Instance& inst, const CandidateSet& w) {
    if (w.count() != inst.k()) throw std::invalid_argument("removal_order: |W| must be k");
    CandidateSet cur = w;
    std::vector<uint32_t> order;
    const uint64_t base = coverage(inst, w).count();
    while (cur.any()) {
        uint32_t best = inst.m();
        uint64_t best_cov = 0;
        cur.for_each([&](uint32_t c) {
            CandidateSet rest = cur;
            rest.reset(c);
            uint64_t cov = coverage(inst, rest).count();
            if (best == inst.m() || cov > best_cov) {
                best = c;
                best_cov = cov;
            }
        });
        cur.reset(best);
        order.push_back(best);
        // the guaranteed prefix bound, as an exact integer comparison
        if ((base - best_cov) * inst.k() > static_cast<uint64_t>(order.size()) * inst.n())
            throw std::logic_error("removal_order: coverage bound violated");
    }
    return order;
}

// ---------------------------------------------------------------------------
// 2-JR connector
// ---------------------------------------------------------------------------

namespace {

struct GreedyEndpoint {
    std::vector<CandidateSet> committees;
    CandidateSet core;
    CandidateSet final_committee;
};

GreedyEndpoint two_jr_endpoint(const Instance& inst, const CandidateSet& w) {
    SwapPathBuilder b(inst, w);
    auto order = removal_order(inst, w);
    Alpha two = Alpha::of(2);
    CandidateSet core = run_remove_add(b, w, order, [&](const CandidateSet& sub) {
        return jr_witness_candidate(inst, sub, two);
    });
    if (core.count() * 2 > inst.k())
        throw std::logic_error("2-JR greedy core exceeds k/2");
    return {std::move(b.committees), std::move(core), b.cur};
}

}  // namespace

Path connect_two_jr(const Instance& inst, const CandidateSet& w, const CandidateSet& w2) {
    Predicate pred = Predicate::jr(Alpha::of(2));
    if (check_jr(inst, w) || check_jr(inst, w2))
        throw std::invalid_argument("connect_two_jr: endpoints must satisfy JR");
    if (w == w2) return finish_path(inst, {w}, pred, w, w2);

    GreedyEndpoint a = two_jr_endpoint(inst, w);
    GreedyEndpoint c = two_jr_endpoint(inst, w2);

    // Bridge: pull the far core in while keeping ours, then march onto the
    // far committee while keeping the far core.
    SwapPathBuilder b(inst, a.final_committee);
    CandidateSet want = c.core - b.cur;
    for (uint32_t in = want.next_set_bit(0); in < inst.m(); in = want.next_set_bit(in + 1)) {
        CandidateSet removable = (b.cur - a.core) - c.core;
        if (!removable.any()) throw std::logic_error("2-JR bridge: cores do not fit");
        b.swap(removable.next_set_bit(0), in);
    }
    b.march_to(c.final_committee, c.core);

    std::vector<CandidateSet> committees = a.committees;
    committees.insert(committees.end(), b.committees.begin(), b.committees.end());
    append_reversed(committees, c.committees);

    Path path = finish_path(inst, std::move(committees), pred, w, w2);
    if (path.length() > 2 * static_cast<std::size_t>(inst.k()))
        throw std::logic_error("2-JR path longer than 2k");
    return path;
}

// ---------------------------------------------------------------------------
// 4-EJR connector
// ---------------------------------------------------------------------------

CandidateSet four_ejr_core(const Instance& inst) {
    const uint32_t n = inst.n(), m = inst.m(), k = inst.k();
    CandidateSet core = inst.empty_candidate_set();
    VoterSet remaining = inst.empty_voter_set();
    for (uint32_t v = 0; v < n; ++v) remaining.set(v);

    while (true) {
        uint32_t found_ell = 0;
        VoterSet found_inter = inst.empty_voter_set();
        for (uint32_t ell = k; ell >= 1 && found_ell == 0; --ell) {
            uint64_t need = (4ull * ell * n + k - 1) / k;
            if (need > remaining.count()) continue;
            std::vector<uint32_t> eligible;
            for (uint32_t c = 0; c < m; ++c)
                if (count_and(inst.supports(c), remaining) >= need) eligible.push_back(c);
            if (eligible.size() < ell) continue;
            std::vector<uint32_t> chosen;
            std::function<bool(std::size_t, const VoterSet&)> rec =
                [&](std::size_t from, const VoterSet& inter) -> bool {
                if (chosen.size() == ell) {
                    found_inter = inter;
                    return true;
                }
                for (std::size_t i = from; i + (ell - chosen.size()) <= eligible.size(); ++i) {
                    VoterSet next = inter;
                    and_into(next, inst.supports(eligible[i]));
                    if (next.count() < need) continue;
                    chosen.push_back(eligible[i]);
                    if (rec(i + 1, next)) return true;
                    chosen.pop_back();
                }
                return false;
            };
            if (rec(0, remaining)) found_ell = ell;
        }
        if (found_ell == 0) break;

        CandidateSet common(inst.m());
        bool first = true;
        found_inter.for_each([&](uint32_t v) {
            if (first) {
                common = inst.approvals(v).to_bitset();
                first = false;
            } else {
                common &= inst.approvals(v).to_bitset();
            }
        });
        uint32_t added = 0;
        for (uint32_t c = common.next_set_bit(0); c < m && added < found_ell;
             c = common.next_set_bit(c + 1), ++added)
            core.set(c);
        remaining -= found_inter;
    }

    if (core.count() <= k / 4 && !check_ejr(inst, core, Alpha::of(4))) return core;

    // Exhaustive fallback over size-⌊k/4⌋ subcommittees (the greedy variant is
    // not guaranteed by the paper).
    uint32_t target = k / 4;
    committee_count_guarded(m, target, 2'000'000);
    std::vector<uint32_t> idx(target);
    for (uint32_t i = 0; i < target; ++i) idx[i] = i;
    while (true) {
        CandidateSet cand = make_candidate_set(inst, idx);
        if (!check_ejr(inst, cand, Alpha::of(4))) return cand;
        int i = static_cast<int>(target) - 1;
        while (i >= 0 && idx[i] == m - target + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (uint32_t j = i + 1; j < target; ++j) idx[j] = idx[j - 1] + 1;
    }
    throw std::logic_error("no 4-EJR subcommittee of size floor(k/4) found");
}

namespace {

GreedyEndpoint four_ejr_endpoint(const Instance& inst, const CandidateSet& w,
                                 const CandidateSet& core4) {
    const uint32_t k = inst.k();
    Alpha four = Alpha::of(4);

    // removal order: greedy minimum modified-PAV marginal over W-only prefixes
    std::vector<uint32_t> order;
    {
        const auto base_counts = approved_counts(inst, w);
        CandidateSet sub = w;
        uint32_t removals = 2 * k / 3;
        for (uint32_t i = 0; i < removals; ++i) {
            auto sub_counts = approved_counts(inst, sub);
            uint32_t best = inst.m();
            Rational best_delta;
            sub.for_each([&](uint32_t c) {
                Rational d = modified_marginal(inst, base_counts, sub_counts, c);
                if (best == inst.m() || d < best_delta) {
                    best = c;
                    best_delta = d;
                }
            });
            order.push_back(best);
            sub.reset(best);
        }
    }

    SwapPathBuilder b(inst, w);
    CandidateSet hat = run_remove_add(b, w, order, [&](const CandidateSet& sub) {
        return ejr_witness_candidate(inst, sub, four);
    });

    // Phase B: collect the shared 4-EJR core; at most one member of the
    // restored subcommittee may be dropped, and only by the final swap.
    CandidateSet missing = core4 - b.cur;
    std::size_t left = missing.count();
    for (uint32_t in = missing.next_set_bit(0); in < inst.m();
         in = missing.next_set_bit(in + 1), --left) {
        CandidateSet removable = (b.cur - core4) - hat;
        if (!removable.any()) {
            if (left != 1) throw std::logic_error("4-EJR endpoint: core does not fit");
            removable = b.cur - core4;
            if (!removable.any()) throw std::logic_error("4-EJR endpoint: nothing removable");
        }
        b.swap(removable.next_set_bit(0), in);
    }
    if (!core4.is_subset_of(b.cur)) throw std::logic_error("4-EJR endpoint: core not reached");
    return {std::move(b.committees), core4, b.cur};
}

}  // namespace

Path connect_ejr_4approx(const Instance& inst, const CandidateSet& w, const CandidateSet& w2) {
    Predicate pred = Predicate::ejr(Alpha::of(4));
    if (check_ejr(inst, w) || check_ejr(inst, w2))
        throw std::invalid_argument("connect_ejr_4approx: endpoints must satisfy EJR");
    if (w == w2) return finish_path(inst, {w}, pred, w, w2);

    CandidateSet core4 = four_ejr_core(inst);
    GreedyEndpoint a = four_ejr_endpoint(inst, w, core4);
    GreedyEndpoint c = four_ejr_endpoint(inst, w2, core4);

    SwapPathBuilder b(inst, a.final_committee);
    b.march_to(c.final_committee, core4);

    std::vector<CandidateSet> committees = a.committees;
    committees.insert(committees.end(), b.committees.begin(), b.committees.end());
    append_reversed(committees, c.committees);
    return finish_path(inst, std::move(committees), pred, w, w2);
}

// ---------------------------------------------------------------------------
// Affordable subcommittees
// ---------------------------------------------------------------------------

namespace {

// The subcommittee-extension procedure: drives `sub` (JR, coverage at least
// (|sub|-1)n/k) to an affordable JR subcommittee containing the affordable
// seed `x`, recording committee-level swaps in the builder.
CandidateSet run_extension(const Instance& inst, SwapPathBuilder& b, const CandidateSet& sub,
                           const CandidateSet& x) {
    CandidateSet xstar = x;
    CandidateSet rest = sub - x;
    for (uint32_t c = rest.next_set_bit(0); c < inst.m(); c = rest.next_set_bit(c + 1)) {
        CandidateSet trial = xstar;
        trial.set(c);
        if (is_affordable(inst, trial)) xstar = std::move(trial);
    }

    auto order = sorted_indices(sub - xstar);
    Alpha one = Alpha::exact();
    CandidateSet result = run_remove_add(b, sub, order, [&](const CandidateSet& s) {
        return jr_witness_candidate(inst, s, one);
    });
    if (!is_affordable(inst, result))
        throw std::logic_error("extension result not affordable");
    if (check_jr(inst, result)) throw std::logic_error("extension result violates JR");
    return result;
}

// Connects b.cur (a committee containing the affordable JR subcommittee
// `from`) to some committee containing `to`, all steps JR.
void connect_affordable_from(const Instance& inst, SwapPathBuilder& b, CandidateSet from,
                             const CandidateSet& to) {
    const uint32_t k = inst.k(), n = inst.n();
    while (true) {
        if (from == to || to.is_subset_of(from)) return;  // b.cur already contains `to`
        CandidateSet x = from & to;
        if (x == from) {
            // from ⊂ to: supersets of `from` stay JR, march the rest in
            CandidateSet target = b.cur;
            (to - b.cur).for_each([&](uint32_t in) {
                CandidateSet removable = (target - to);
                target.reset(removable.next_set_bit(0));
                target.set(in);
            });
            b.march_to(target, from);
            return;
        }

        uint32_t cprime = (to - x).next_set_bit(0);
        CandidateSet w = from;
        if (from.count() < k) {
            w.set(cprime);
            if (!b.cur.test(cprime)) {
                CandidateSet removable = b.cur - from;
                removable.reset(cprime);
                if (!removable.any()) throw std::logic_error("no room to add c'");
                b.swap(removable.next_set_bit(0), cprime);
            }
        } else {
            // pigeonhole ejection: some member of from \ x is uniquely
            // approved by fewer than n/k voters outside N_{x ∪ {c'}}
            if (b.cur != from) throw std::logic_error("full core must equal the committee");
            CandidateSet xc = x;
            xc.set(cprime);
            VoterSet vprime = coverage(inst, from);
            vprime -= coverage(inst, xc);
            CandidateSet fx = from - x;
            std::vector<uint64_t> unique_count(inst.m(), 0);
            vprime.for_each([&](uint32_t v) {
                if (count_and(inst.approvals(v), fx) == 1) {
                    CandidateSet only = inst.approvals(v).to_bitset();
                    only &= fx;
                    ++unique_count[only.next_set_bit(0)];
                }
            });
            uint32_t eject = inst.m();
            for (uint32_t c = fx.next_set_bit(0); c < inst.m(); c = fx.next_set_bit(c + 1))
                if (unique_count[c] * k < n) {
                    eject = c;
                    break;
                }
            if (eject == inst.m()) throw std::logic_error("pigeonhole ejection failed");
            w.reset(eject);
            w.set(cprime);
            b.swap(eject, cprime);
        }

        if (coverage(inst, w).count() * k < (w.count() - 1) * static_cast<uint64_t>(n))
            throw std::logic_error("extension precondition violated");
        if (check_jr(inst, w)) throw std::logic_error("intermediate W violates JR");

        CandidateSet xc = x;
        xc.set(cprime);
        from = run_extension(inst, b, w, xc);
    }
}

struct AffordableImpl {
    CandidateSet core;
    PaymentSystem payments;
};

AffordableImpl affordable_target_impl(const Instance& inst, SwapPathBuilder& b,
                                      const CandidateSet& w, RuleTag tag) {
    const uint32_t k = inst.k(), n = inst.n();
    auto certify = [&](const CandidateSet& core) {
        auto ps = is_affordable(inst, core);
        if (!ps) throw std::logic_error("rule core is not affordable");
        if (check_jr(inst, core)) throw std::logic_error("rule core violates JR");
        return AffordableImpl{core, std::move(*ps)};
    };

    switch (tag) {
        case RuleTag::Mes:
        case RuleTag::Gjcr:
        case RuleTag::GreedyEjr: {
            RuleOutput out = run_rule(inst, tag);
            if (!out.core.is_subset_of(w))
                throw std::invalid_argument("committee does not extend the rule's core");
            return certify(out.core);
        }
        case RuleTag::SeqPhragmen: {
            RuleOutput out = seq_phragmen(inst);
            Rational cutoff = rat(k, n);
            CandidateSet prefix = inst.empty_candidate_set();
            for (const auto& e : out.trace)
                if (*e.event <= cutoff) prefix.set(e.candidate);
            if (!prefix.is_subset_of(w))
                throw std::invalid_argument("committee does not extend the time-k/n prefix");
            return certify(prefix);
        }
        case RuleTag::SeqCcav: {
            RuleOutput out = seq_ccav(inst);
            CandidateSet prefix = inst.empty_candidate_set();
            for (const auto& e : out.trace) {
                if (e.event->get_num() * k < n) break;  // gain < n/k
                prefix.set(e.candidate);
            }
            if (!prefix.is_subset_of(w))
                throw std::invalid_argument("committee does not extend the seqCCAV prefix");
            return certify(prefix);
        }
        case RuleTag::Ccav: {
            uint64_t best = coverage(inst, ccav_exact(inst).front()).count();
            if (coverage(inst, w).count() != best)
                throw std::invalid_argument("committee is not a CCAV winner");
            // order members by minimum unique coverage within the remainder
            std::vector<uint32_t> order;
            std::vector<uint64_t> unique;
            CandidateSet rem = w;
            while (rem.any()) {
                uint32_t best_c = inst.m();
                uint64_t best_u = 0;
                rem.for_each([&](uint32_t c) {
                    CandidateSet others = rem;
                    others.reset(c);
                    uint64_t u = count_andnot(inst.supports(c), coverage(inst, others));
                    if (best_c == inst.m() || u < best_u) {
                        best_c = c;
                        best_u = u;
                    }
                });
                order.push_back(best_c);
                unique.push_back(best_u);
                rem.reset(best_c);
            }
            if (unique[0] * k >= n) return certify(w);  // every member uniquely n/k-approved
            std::size_t cut = 0;  // last index with unique coverage below n/k
            for (std::size_t s = 0; s < order.size(); ++s)
                if (unique[s] * k < n) cut = s + 1;
            order.resize(cut);
            Alpha one = Alpha::exact();
            CandidateSet core = run_remove_add(b, w, order, [&](const CandidateSet& s) {
                return jr_witness_candidate(inst, s, one);
            });
            return certify(core);
        }
        case RuleTag::Pav: {
            if (pav_score(inst, w) != pav_score(inst, pav_exact(inst).front()))
                throw std::invalid_argument("committee is not a PAV winner");
            CandidateSet sub = w;
            if (coverage(inst, sub).count() * k < static_cast<uint64_t>(k - 1) * n) {
                // shed low-marginal candidates until the coverage condition holds
                std::vector<uint32_t> order;
                CandidateSet probe = w;
                while (probe.any()) {
                    uint32_t best = inst.m();
                    Rational best_delta;
                    probe.for_each([&](uint32_t c) {
                        Rational d = pav_marginal(inst, probe, c);
                        if (best == inst.m() || d < best_delta) {
                            best = c;
                            best_delta = d;
                        }
                    });
                    probe.reset(best);
                    order.push_back(best);
                    uint64_t cov = coverage(inst, probe).count();
                    if (cov * k >= static_cast<uint64_t>(k - order.size() - 1) * n) break;
                }
                Alpha one = Alpha::exact();
                sub = run_remove_add(b, w, order, [&](const CandidateSet& s) {
                    return jr_witness_candidate(inst, s, one);
                });
                if (coverage(inst, sub).count() * k < (sub.count() - 1) * static_cast<uint64_t>(n))
                    throw std::logic_error("PAV shedding missed the coverage bound");
            }
            CandidateSet core = run_extension(inst, b, sub, inst.empty_candidate_set());
            auto ps = is_affordable(inst, core);
            if (!ps) throw std::logic_error("PAV extension core not affordable");
            if (check_jr(inst, core)) throw std::logic_error("PAV extension core violates JR");
            return AffordableImpl{core, std::move(*ps)};
        }
    }
    throw std::logic_error("unknown rule");
}

}  // namespace

AffordableTarget connect_to_affordable_jr(const Instance& inst, const CandidateSet& w,
                                          RuleTag rule) {
    if (w.count() != inst.k()) throw std::invalid_argument("W must be a committee");
    SwapPathBuilder b(inst, w);
    AffordableImpl impl = affordable_target_impl(inst, b, w, rule);
    Path path = finish_path(inst, b.committees, Predicate::jr(), w, b.cur);
    if (!impl.core.is_subset_of(b.cur))
        throw std::logic_error("affordable core not contained in the final committee");
    return AffordableTarget{std::move(path), std::move(impl.core), std::move(impl.payments)};
}

Path connect_affordable(const Instance& inst, const CandidateSet& aff, const CandidateSet& aff2) {
    for (const auto* s : {&aff, &aff2}) {
        if (!is_affordable(inst, *s))
            throw std::invalid_argument("connect_affordable: certificate invalid");
        if (check_jr(inst, *s))
            throw std::invalid_argument("connect_affordable: subcommittee violates JR");
    }
    CandidateSet start = complete_committee(inst, aff);
    CandidateSet goal = complete_committee(inst, aff2);
    SwapPathBuilder b(inst, start);
    connect_affordable_from(inst, b, aff, aff2);
    b.march_to(goal, aff2);
    return finish_path(inst, b.committees, Predicate::jr(), start, goal);
}

Path connect_rule_outputs(const Instance& inst, const CandidateSet& w, RuleTag rule,
                          const CandidateSet& w2, RuleTag rule2) {
    SwapPathBuilder b(inst, w);
    AffordableImpl first = affordable_target_impl(inst, b, w, rule);

    SwapPathBuilder b2(inst, w2);
    AffordableImpl second = affordable_target_impl(inst, b2, w2, rule2);

    connect_affordable_from(inst, b, first.core, second.core);
    b.march_to(b2.cur, second.core);

    std::vector<CandidateSet> committees = b.committees;
    append_reversed(committees, b2.committees);
    return finish_path(inst, std::move(committees), Predicate::jr(), w, w2);
}

// ---------------------------------------------------------------------------
// Non-isolation witnesses
// ---------------------------------------------------------------------------

namespace {

bool axiom_holds(const Instance& inst, const CandidateSet& w, IsolationAxiom axiom) {
    if (axiom == IsolationAxiom::EjrPlus) return !check_ejr_plus(inst, w);
    return !check_ejr(inst, w);
}

std::optional<CandidateSet> neighbor_scan(const Instance& inst, const CandidateSet& w,
                                          IsolationAxiom axiom) {
    auto members = sorted_indices(w);
    for (uint32_t out : members) {
        for (uint32_t in = 0; in < inst.m(); ++in) {
            if (w.test(in)) continue;
            CandidateSet cand = w;
            cand.reset(out);
            cand.set(in);
            if (axiom_holds(inst, cand, axiom)) return cand;
        }
    }
    return std::nullopt;
}

// EJR+ violation candidates (other than `skip`) for the subcommittee.
std::optional<uint32_t> ejr_plus_violator(const Instance& inst, const CandidateSet& sub,
                                          uint32_t skip) {
    const auto counts = approved_counts(inst, sub);
    for (uint32_t c = 0; c < inst.m(); ++c) {
        if (sub.test(c) || c == skip) continue;
        for (uint32_t ell = 1; ell <= inst.k(); ++ell) {
            uint64_t cnt = 0;
            inst.supports(c).for_each([&](uint32_t v) {
                if (counts[v] < ell) ++cnt;
            });
            if (cnt * inst.k() >= static_cast<uint64_t>(ell) * inst.n()) return c;
        }
    }
    return std::nullopt;
}

}  // namespace

NonIsolationResult non_isolation_witness(const Instance& inst, const CandidateSet& w,
                                         RuleTag rule, IsolationAxiom axiom) {
    if (rule != RuleTag::Pav && rule != RuleTag::Mes && rule != RuleTag::Gjcr)
        throw std::invalid_argument("non_isolation_witness: rule must be PAV, MES or GJCR");
    if (w.count() != inst.k()) throw std::invalid_argument("W must be a committee");
    if (!axiom_holds(inst, w, axiom))
        throw std::invalid_argument("W violates the requested axiom");

    if (inst.m() == inst.k()) return {std::nullopt, "only-committee"};

    uint32_t smallest_outside = 0;
    while (w.test(smallest_outside)) ++smallest_outside;

    // a removable candidate keeps the axiom: swap in anything
    for (uint32_t c = w.next_set_bit(0); c < inst.m(); c = w.next_set_bit(c + 1)) {
        CandidateSet sub = w;
        sub.reset(c);
        if (axiom_holds(inst, sub, axiom)) {
            CandidateSet res = sub;
            res.set(smallest_outside);
            return {res, "shrink-and-extend"};
        }
    }

    // few approved candidates: C_a must equal W here, try the lemma swaps
    uint64_t approved = 0;
    for (uint32_t c = 0; c < inst.m(); ++c)
        if (inst.support_size(c) > 0) ++approved;
    if (approved <= inst.k()) {
        for (uint32_t c = w.next_set_bit(0); c < inst.m(); c = w.next_set_bit(c + 1)) {
            CandidateSet cand = w;
            cand.reset(c);
            cand.set(smallest_outside);
            if (axiom_holds(inst, cand, axiom)) return {cand, "few-real-candidates"};
        }
        return {std::nullopt, "unique-axiom-committee"};
    }

    auto constructed = [&]() -> std::optional<CandidateSet> {
        if (rule == RuleTag::Pav) {
            if (pav_score(inst, w) != pav_score(inst, pav_exact(inst).front()))
                throw std::invalid_argument("committee is not a PAV winner");
            if (coverage(inst, w).count() != inst.n()) return std::nullopt;
            uint32_t cstar = inst.m();
            for (uint32_t c = 0; c < inst.m() && cstar == inst.m(); ++c)
                if (!w.test(c) && inst.support_size(c) > 0) cstar = c;
            if (cstar == inst.m()) return std::nullopt;
            uint32_t vstar = inst.supports(cstar).to_indices().front();
            CandidateSet approved_members = inst.approvals(vstar).to_bitset();
            approved_members &= w;
            if (!approved_members.any()) return std::nullopt;
            uint32_t c = approved_members.next_set_bit(0);
            CandidateSet sub = w;
            sub.reset(c);
            if (auto cp = ejr_plus_violator(inst, sub, c)) {
                CandidateSet res = sub;
                res.set(*cp);
                return res;
            }
            CandidateSet res = sub;
            res.set(cstar);
            return res;
        }
        // MES / GJCR
        RuleOutput out = run_rule(inst, rule);
        if (out.committee != w)
            throw std::invalid_argument("committee is not the rule's output");
        for (std::size_t t = out.trace.size(); t-- > 0;) {
            uint32_t best_c = inst.m();
            for (const auto& [v, pay] : out.trace[t].charges) {
                CandidateSet outside = inst.approvals(v).to_bitset();
                outside -= w;
                if (outside.any()) best_c = std::min(best_c, (uint32_t)outside.next_set_bit(0));
            }
            if (best_c != inst.m()) {
                CandidateSet res = w;
                res.reset(out.trace[t].candidate);
                res.set(best_c);
                return res;
            }
        }
        return std::nullopt;
    }();

    if (constructed && axiom_holds(inst, *constructed, axiom)) {
        std::string method = rule == RuleTag::Pav ? "pav-swap" : "payment-swap";
        return {*constructed, std::move(method)};
    }
    if (auto found = neighbor_scan(inst, w, axiom)) return {*found, "neighbor-scan"};
    throw std::logic_error("no non-isolation witness found, contradicting the theorem");
}

}  // namespace creconf
