#include "creconf/rules.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "creconf/maxflow.hpp"

namespace creconf {

namespace {

constexpr uint64_t kEnumerationLimit = 10'000'000;

void assert_invariant(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("rule invariant violated: ") + what);
}

uint32_t worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COMMITTEE_RECONFIG_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

// Lexicographically next k-combination of [0, m); false when exhausted.
bool next_combination(std::vector<uint32_t>& idx, uint32_t m) {
    const int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    return true;
}

// Exhaustive argmax over all committees with a uint64 score; returns all
// maximizers in enumeration (lexicographic) order. Partitioned across
// workers by contiguous rank ranges, merged deterministically.
std::vector<CandidateSet> exhaustive_argmax(
    const Instance& inst, const std::function<uint64_t(const std::vector<uint32_t>&)>& score) {
    const uint32_t m = inst.m(), k = inst.k();
    const uint64_t total = committee_count_guarded(m, k, kEnumerationLimit);

    struct Local {
        uint64_t best = 0;
        bool seen = false;
        std::vector<std::vector<uint32_t>> argmax;
    };

    const uint32_t workers = static_cast<uint32_t>(
        std::min<uint64_t>(worker_count(), std::max<uint64_t>(1, total / 4096)));
    std::vector<Local> locals(std::max(1u, workers));

    // Unrank a lexicographic combination.
    auto unrank = [&](uint64_t rank) {
        std::vector<uint32_t> idx(k);
        uint32_t c = 0;
        for (uint32_t slot = 0; slot < k; ++slot) {
            while (true) {
                if (c >= m) throw std::logic_error("combination unrank out of range");
                // combinations putting candidate c at this slot
                uint32_t remaining = k - slot - 1, pool = m - c - 1;
                uint64_t block = 0;
                if (pool >= remaining) {
                    block = 1;
                    for (uint32_t i = 0; i < remaining; ++i) block = block * (pool - i) / (i + 1);
                }
                if (rank < block) break;
                rank -= block;
                ++c;
            }
            idx[slot] = c++;
        }
        return idx;
    };

    auto work = [&](uint32_t wi) {
        uint64_t begin = total * wi / locals.size();
        uint64_t end = total * (wi + 1) / locals.size();
        if (begin >= end) return;
        std::vector<uint32_t> idx = unrank(begin);
        Local& loc = locals[wi];
        for (uint64_t r = begin; r < end; ++r) {
            uint64_t s = score(idx);
            if (!loc.seen || s > loc.best) {
                loc.seen = true;
                loc.best = s;
                loc.argmax.clear();
            }
            if (s == loc.best) loc.argmax.push_back(idx);
            if (r + 1 < end) next_combination(idx, m);
        }
    };

    if (locals.size() == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (uint32_t wi = 0; wi < locals.size(); ++wi) pool.emplace_back(work, wi);
        for (auto& t : pool) t.join();
    }

    uint64_t best = 0;
    bool seen = false;
    for (const auto& loc : locals)
        if (loc.seen && (!seen || loc.best > best)) {
            best = loc.best;
            seen = true;
        }
    std::vector<CandidateSet> out;
    for (const auto& loc : locals)
        if (loc.seen && loc.best == best)
            for (const auto& idx : loc.argmax) out.push_back(make_candidate_set(inst, idx));
    return out;
}

// Scaled-integer harmonic weights: weight[x] = lcm(1..k) * H(x). Falls back
// to 0 (signalling "use rationals") on overflow.
std::vector<uint64_t> scaled_harmonic(uint32_t k, uint32_t n) {
    uint64_t l = 1;
    for (uint32_t i = 2; i <= k; ++i) {
        uint64_t g = std::gcd(l, static_cast<uint64_t>(i));
        uint64_t nl = l / g;
        if (nl > UINT64_MAX / i) return {};
        l = nl * i;
    }
    std::vector<uint64_t> w(k + 1, 0);
    for (uint32_t x = 1; x <= k; ++x) w[x] = w[x - 1] + l / x;
    // total score is at most n * w[k]
    if (n != 0 && w[k] > UINT64_MAX / n) return {};
    return w;
}

}  // namespace

uint64_t committee_count_guarded(uint32_t m, uint32_t k, uint64_t limit) {
    if (k > m) throw std::invalid_argument("k > m");
    mpz_class exact;
    mpz_bin_uiui(exact.get_mpz_t(), m, k);
    if (exact > static_cast<unsigned long>(limit))
        throw std::runtime_error("instance too large for exhaustive search: C(m,k) > " +
                                 std::to_string(limit));
    return exact.get_ui();
}

Rational PaymentSystem::voter_total(uint32_t voter) const {
    Rational sum = 0;
    for (const auto& [key, val] : payments)
        if (key.first == voter) sum += val;
    return sum;
}

Rational PaymentSystem::candidate_total(uint32_t candidate) const {
    Rational sum = 0;
    for (const auto& [key, val] : payments)
        if (key.second == candidate) sum += val;
    return sum;
}

bool PaymentSystem::valid_for(const Instance& inst, const CandidateSet& charged) const {
    std::vector<Rational> by_voter(inst.n(), Rational(0));
    std::map<uint32_t, Rational> by_cand;
    for (const auto& [key, val] : payments) {
        auto [v, c] = key;
        if (v >= inst.n() || c >= inst.m()) return false;
        if (val <= 0) return false;
        if (!inst.approvals(v).test(c)) return false;
        if (!charged.test(c)) return false;
        by_voter[v] += val;
        by_cand[c] += val;
    }
    Rational budget = rat(inst.k(), inst.n());
    for (uint32_t v = 0; v < inst.n(); ++v)
        if (by_voter[v] > budget) return false;
    bool all_funded = true;
    charged.for_each([&](uint32_t c) {
        auto it = by_cand.find(c);
        if (it == by_cand.end() || it->second != 1) all_funded = false;
    });
    return all_funded;
}

std::string rule_name(RuleTag tag) {
    switch (tag) {
        case RuleTag::Gjcr: return "gjcr";
        case RuleTag::Mes: return "mes";
        case RuleTag::Pav: return "pav";
        case RuleTag::Ccav: return "ccav";
        case RuleTag::SeqCcav: return "seqccav";
        case RuleTag::GreedyEjr: return "greedyejr";
        case RuleTag::SeqPhragmen: return "seqphragmen";
    }
    return "?";
}

std::optional<RuleTag> rule_from_name(const std::string& name) {
    for (RuleTag t : {RuleTag::Gjcr, RuleTag::Mes, RuleTag::Pav, RuleTag::Ccav, RuleTag::SeqCcav,
                      RuleTag::GreedyEjr, RuleTag::SeqPhragmen})
        if (rule_name(t) == name) return t;
    return std::nullopt;
}

RuleOutput gjcr(const Instance& inst) {
    const uint32_t n = inst.n(), m = inst.m(), k = inst.k();
    RuleOutput out{inst.empty_candidate_set(), inst.empty_candidate_set(), PaymentSystem{}, {}};
    std::vector<Rational> spent(n, Rational(0));

    for (uint32_t ell = k; ell >= 1; --ell) {
        while (true) {
            auto counts = approved_counts(inst, out.core);
            VoterSet low = inst.empty_voter_set();
            for (uint32_t v = 0; v < n; ++v)
                if (counts[v] < ell) low.set(v);
            uint32_t best = m;
            uint64_t best_size = 0;
            for (uint32_t c = 0; c < m; ++c) {
                if (out.core.test(c)) continue;
                uint64_t sz = count_and(inst.supports(c), low);
                if (sz * k >= static_cast<uint64_t>(ell) * n && sz > best_size) {
                    best = c;
                    best_size = sz;
                }
            }
            if (best == m) break;
            VoterSet group = low;
            and_into(group, inst.supports(best));
            Rational share = rat(1, static_cast<long>(best_size));
            TraceEntry entry{best, std::nullopt, {}};
            group.for_each([&](uint32_t v) {
                spent[v] += share;
                entry.charges.emplace_back(v, share);
                out.payments->payments[{v, best}] = share;
            });
            out.core.set(best);
            out.trace.push_back(std::move(entry));
        }
    }

    Rational budget = rat(k, n);
    for (uint32_t v = 0; v < n; ++v) assert_invariant(spent[v] <= budget, "gjcr voter over budget");
    assert_invariant(out.core.count() <= k, "gjcr core larger than k");
    assert_invariant(!check_ejr_plus(inst, out.core), "gjcr core fails EJR+");
    out.committee = complete_committee(inst, out.core);
    return out;
}

RuleOutput mes(const Instance& inst) {
    const uint32_t n = inst.n(), m = inst.m(), k = inst.k();
    RuleOutput out{inst.empty_candidate_set(), inst.empty_candidate_set(), PaymentSystem{}, {}};
    std::vector<Rational> budget(n, rat(k, n));

    while (out.core.count() < k) {
        uint32_t best = m;
        Rational best_price;
        for (uint32_t c = 0; c < m; ++c) {
            if (out.core.test(c) || inst.support_size(c) == 0) continue;
            std::vector<Rational> bs;
            Rational total = 0;
            inst.supports(c).for_each([&](uint32_t v) {
                bs.push_back(budget[v]);
                total += budget[v];
            });
            if (total < 1) continue;
            std::sort(bs.begin(), bs.end());
            // smallest q with sum(min(b, q)) = 1, solved on the right segment
            Rational prefix = 0;
            Rational price;
            for (std::size_t i = 0; i < bs.size(); ++i) {
                Rational q = (Rational(1) - prefix) / static_cast<long>(bs.size() - i);
                if (q <= bs[i]) {
                    price = q;
                    break;
                }
                prefix += bs[i];
            }
            if (best == m || price < best_price) {
                best = c;
                best_price = price;
            }
        }
        if (best == m) break;
        TraceEntry entry{best, best_price, {}};
        inst.supports(best).for_each([&](uint32_t v) {
            Rational pay = std::min(budget[v], best_price);
            if (pay > 0) {
                budget[v] -= pay;
                entry.charges.emplace_back(v, pay);
                out.payments->payments[{v, best}] = pay;
            }
        });
        out.core.set(best);
        out.trace.push_back(std::move(entry));
    }

    out.committee = complete_committee(inst, out.core);
    assert_invariant(out.payments->valid_for(inst, out.core), "mes payments invalid");
    return out;
}

RuleOutput seq_ccav(const Instance& inst) {
    const uint32_t m = inst.m(), k = inst.k();
    RuleOutput out{inst.empty_candidate_set(), inst.empty_candidate_set(), std::nullopt, {}};
    VoterSet covered = inst.empty_voter_set();
    for (uint32_t step = 0; step < k; ++step) {
        uint32_t best = m;
        uint64_t best_gain = 0;
        for (uint32_t c = 0; c < m; ++c) {
            if (out.core.test(c)) continue;
            uint64_t gain = count_andnot(inst.supports(c), covered);
            if (best == m || gain > best_gain) {
                best = c;
                best_gain = gain;
            }
        }
        out.core.set(best);
        or_into(covered, inst.supports(best));
        out.trace.push_back({best, Rational(static_cast<long>(best_gain)), {}});
    }
    out.committee = out.core;
    return out;
}

RuleOutput greedy_ejr(const Instance& inst) {
    const uint32_t n = inst.n(), m = inst.m(), k = inst.k();
    RuleOutput out{inst.empty_candidate_set(), inst.empty_candidate_set(), std::nullopt, {}};
    VoterSet remaining(inst.empty_voter_set());
    for (uint32_t v = 0; v < n; ++v) remaining.set(v);

    while (true) {
        uint32_t found_ell = 0;
        std::vector<uint32_t> found_subset;
        VoterSet found_inter = inst.empty_voter_set();
        for (uint32_t ell = k; ell >= 1 && found_ell == 0; --ell) {
            uint64_t need = (static_cast<uint64_t>(ell) * n + k - 1) / k;
            if (need > remaining.count()) continue;
            std::vector<uint32_t> eligible;
            for (uint32_t c = 0; c < m; ++c)
                if (count_and(inst.supports(c), remaining) >= need) eligible.push_back(c);
            if (eligible.size() < ell) continue;
            // lexicographically first ℓ-subset whose common support is ℓ-large
            std::vector<uint32_t> chosen;
            std::function<bool(std::size_t, const VoterSet&)> rec =
                [&](std::size_t from, const VoterSet& inter) -> bool {
                if (chosen.size() == ell) {
                    found_subset = chosen;
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

        // full common approval set of the group, add its ℓ smallest members
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
             c = common.next_set_bit(c + 1)) {
            out.core.set(c);
            out.trace.push_back({c, Rational(static_cast<long>(found_ell)), {}});
            ++added;
        }
        remaining -= found_inter;
    }

    assert_invariant(out.core.count() <= k, "greedy_ejr core larger than k");
    assert_invariant(!check_ejr(inst, out.core), "greedy_ejr output fails EJR");
    out.committee = complete_committee(inst, out.core);
    return out;
}

RuleOutput seq_phragmen(const Instance& inst) {
    const uint32_t n = inst.n(), m = inst.m(), k = inst.k();
    RuleOutput out{inst.empty_candidate_set(), inst.empty_candidate_set(), std::nullopt, {}};
    std::vector<Rational> last_reset(n, Rational(0));

    for (uint32_t step = 0; step < k; ++step) {
        uint32_t best = m;
        Rational best_time;
        for (uint32_t c = 0; c < m; ++c) {
            if (out.core.test(c) || inst.support_size(c) == 0) continue;
            Rational reset_sum = 0;
            inst.supports(c).for_each([&](uint32_t v) { reset_sum += last_reset[v]; });
            Rational t = (Rational(1) + reset_sum) / static_cast<long>(inst.support_size(c));
            if (best == m || t < best_time) {
                best = c;
                best_time = t;
            }
        }
        if (best == m) break;  // nobody left to buy anything
        TraceEntry entry{best, best_time, {}};
        inst.supports(best).for_each([&](uint32_t v) {
            Rational pay = best_time - last_reset[v];
            if (pay > 0) entry.charges.emplace_back(v, pay);
            last_reset[v] = best_time;
        });
        out.core.set(best);
        out.trace.push_back(std::move(entry));
    }
    out.committee = complete_committee(inst, out.core);
    return out;
}

std::vector<CandidateSet> pav_exact(const Instance& inst) {
    const auto weights = scaled_harmonic(inst.k(), inst.n());
    if (!weights.empty()) {
        auto score = [&](const std::vector<uint32_t>& idx) {
            CandidateSet w = make_candidate_set(inst, idx);
            uint64_t s = 0;
            for (uint32_t v = 0; v < inst.n(); ++v) s += weights[count_and(inst.approvals(v), w)];
            return s;
        };
        return exhaustive_argmax(inst, score);
    }
    // rational fallback for extreme k (still guarded by the enumeration limit)
    committee_count_guarded(inst.m(), inst.k(), kEnumerationLimit);
    std::vector<uint32_t> idx(inst.k());
    for (uint32_t i = 0; i < inst.k(); ++i) idx[i] = i;
    std::vector<CandidateSet> best;
    Rational best_score;
    do {
        CandidateSet w = make_candidate_set(inst, idx);
        Rational s = pav_score(inst, w);
        if (best.empty() || s > best_score) {
            best_score = s;
            best.clear();
        }
        if (s == best_score) best.push_back(w);
    } while (next_combination(idx, inst.m()));
    return best;
}

std::vector<CandidateSet> ccav_exact(const Instance& inst) {
    auto score = [&](const std::vector<uint32_t>& idx) {
        CandidateSet w = make_candidate_set(inst, idx);
        return static_cast<uint64_t>(coverage(inst, w).count());
    };
    return exhaustive_argmax(inst, score);
}

Rational pav_score(const Instance& inst, const CandidateSet& w) {
    std::vector<Rational> harmonic(inst.k() + 1, Rational(0));
    for (uint32_t i = 1; i <= inst.k(); ++i) harmonic[i] = harmonic[i - 1] + rat(1, i);
    Rational sum = 0;
    for (uint32_t v = 0; v < inst.n(); ++v) sum += harmonic[count_and(inst.approvals(v), w)];
    return sum;
}

Rational pav_marginal(const Instance& inst, const CandidateSet& w, uint32_t c) {
    if (!w.test(c)) throw std::invalid_argument("pav_marginal: candidate not in W");
    Rational sum = 0;
    inst.supports(c).for_each([&](uint32_t v) {
        sum += rat(1, static_cast<long>(count_and(inst.approvals(v), w)));
    });
    return sum;
}

std::optional<PaymentSystem> is_affordable(const Instance& inst, const CandidateSet& w) {
    const uint32_t n = inst.n();
    const auto members = w.to_indices();
    if (members.size() > inst.k())
        throw std::invalid_argument("is_affordable: subcommittee larger than k");
    if (members.empty()) return PaymentSystem{};

    // units of 1/n: voters may spend k, each member must collect n
    const int source = 0, sink = 1 + static_cast<int>(n) + static_cast<int>(members.size());
    MaxFlow flow(sink + 1);
    for (uint32_t v = 0; v < n; ++v) flow.add_edge(source, 1 + v, inst.k());
    std::map<std::pair<uint32_t, uint32_t>, int> edge_ids;
    for (std::size_t i = 0; i < members.size(); ++i) {
        uint32_t c = members[i];
        int cnode = 1 + static_cast<int>(n) + static_cast<int>(i);
        inst.supports(c).for_each(
            [&](uint32_t v) { edge_ids[{v, c}] = flow.add_edge(1 + v, cnode, n); });
        flow.add_edge(cnode, sink, n);
    }
    int64_t got = flow.run(source, sink);
    if (got != static_cast<int64_t>(members.size()) * n) return std::nullopt;

    PaymentSystem ps;
    for (const auto& [key, eid] : edge_ids) {
        int64_t f = flow.flow_on(eid);
        if (f > 0) ps.payments[key] = rat(f, n);
    }
    return ps;
}

RuleOutput run_rule(const Instance& inst, RuleTag tag) {
    switch (tag) {
        case RuleTag::Gjcr: return gjcr(inst);
        case RuleTag::Mes: return mes(inst);
        case RuleTag::SeqCcav: return seq_ccav(inst);
        case RuleTag::GreedyEjr: return greedy_ejr(inst);
        case RuleTag::SeqPhragmen: return seq_phragmen(inst);
        case RuleTag::Pav: {
            auto all = pav_exact(inst);
            return RuleOutput{all.front(), all.front(), std::nullopt, {}};
        }
        case RuleTag::Ccav: {
            auto all = ccav_exact(inst);
            return RuleOutput{all.front(), all.front(), std::nullopt, {}};
        }
    }
    throw std::logic_error("unknown rule");
}

}  // namespace creconf
