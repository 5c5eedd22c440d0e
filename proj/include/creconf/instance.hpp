#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "creconf/bitset.hpp"

namespace creconf {

// Read-only view of one row in the flat approval/support storage.
// Rows are word-aligned so candidate supports stay at one machine word
// on instances with few voters even when there are millions of candidates.
struct BitRow {
    const DynBitset::word_t* words = nullptr;
    std::size_t nwords = 0;
    std::size_t nbits = 0;

    bool test(std::size_t i) const {
        return (words[i / DynBitset::kWordBits] >> (i % DynBitset::kWordBits)) & 1;
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < nwords; ++i) c += static_cast<std::size_t>(std::popcount(words[i]));
        return c;
    }
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t wi = 0; wi < nwords; ++wi) {
            DynBitset::word_t w = words[wi];
            while (w) {
                fn(static_cast<uint32_t>(wi * DynBitset::kWordBits + std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }
    std::vector<uint32_t> to_indices() const {
        std::vector<uint32_t> out;
        for_each([&](uint32_t i) { out.push_back(i); });
        return out;
    }
    DynBitset to_bitset() const {
        DynBitset b(nbits);
        for (std::size_t i = 0; i < nwords; ++i) b.words()[i] = words[i];
        return b;
    }
};

inline void or_into(DynBitset& dst, BitRow row) {
    for (std::size_t i = 0; i < row.nwords; ++i) dst.words()[i] |= row.words[i];
}
inline void and_into(DynBitset& dst, BitRow row) {
    for (std::size_t i = 0; i < row.nwords; ++i) dst.words()[i] &= row.words[i];
}
inline std::size_t count_and(BitRow row, const DynBitset& b) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < row.nwords; ++i)
        c += static_cast<std::size_t>(std::popcount(row.words[i] & b.words()[i]));
    return c;
}
inline std::size_t count_andnot(BitRow row, const DynBitset& b) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < row.nwords; ++i)
        c += static_cast<std::size_t>(std::popcount(row.words[i] & ~b.words()[i]));
    return c;
}
inline bool intersects(BitRow row, const DynBitset& b) {
    for (std::size_t i = 0; i < row.nwords; ++i)
        if (row.words[i] & b.words()[i]) return true;
    return false;
}
// supports(a) strictly contained in supports(b)?
inline bool row_strict_subset(BitRow a, BitRow b) {
    bool proper = false;
    for (std::size_t i = 0; i < a.nwords; ++i) {
        if (a.words[i] & ~b.words[i]) return false;
        if (b.words[i] & ~a.words[i]) proper = true;
    }
    return proper;
}

// Candidate sets and voter sets share the bitset representation; the aliases
// only document intent. A Committee is a CandidateSet of cardinality exactly k,
// a Subcommittee one of cardinality at most k.
using CandidateSet = DynBitset;
using VoterSet = DynBitset;

// An immutable approval election: n voters, m candidates, committee size k.
// The per-candidate support index is derived at construction and kept
// consistent with the approval data; all reads are safe to share across
// threads.
class Instance {
public:
    Instance(uint32_t m, uint32_t k, const std::vector<std::vector<uint32_t>>& ballots);

    uint32_t n() const { return n_; }
    uint32_t m() const { return m_; }
    uint32_t k() const { return k_; }

    BitRow approvals(uint32_t voter) const {
        return {approvals_.data() + static_cast<std::size_t>(voter) * wpc_, wpc_, m_};
    }
    BitRow supports(uint32_t candidate) const {
        return {supports_.data() + static_cast<std::size_t>(candidate) * wpv_, wpv_, n_};
    }
    uint32_t support_size(uint32_t candidate) const { return support_size_[candidate]; }
    uint32_t ballot_size(uint32_t voter) const { return ballot_size_[voter]; }

    std::size_t voter_words() const { return wpv_; }
    std::size_t candidate_words() const { return wpc_; }

    CandidateSet empty_candidate_set() const { return CandidateSet(m_); }
    VoterSet empty_voter_set() const { return VoterSet(n_); }

    bool operator==(const Instance& o) const {
        return n_ == o.n_ && m_ == o.m_ && k_ == o.k_ && approvals_ == o.approvals_;
    }

private:
    uint32_t n_ = 0, m_ = 0, k_ = 0;
    std::size_t wpc_ = 0;  // words per candidate-set row
    std::size_t wpv_ = 0;  // words per voter-set row
    std::vector<DynBitset::word_t> approvals_;  // n rows of wpc_ words
    std::vector<DynBitset::word_t> supports_;   // m rows of wpv_ words
    std::vector<uint32_t> support_size_;
    std::vector<uint32_t> ballot_size_;
};

// Instance text format (UTF-8): first line "n m k"; then n ballot lines of
// whitespace-separated 0-based candidate indices (an empty line is an empty
// ballot). '#' starts a comment line. Errors carry the offending line number.
Instance parse_instance(std::istream& in);
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);

// JSON mirror: {"n":…, "m":…, "k":…, "approvals":[[…],…]}.
Instance parse_instance_json(const std::string& text);
std::string serialize_instance_json(const Instance& inst);

// Auto-detects JSON (first non-space byte '{') vs. plain text.
Instance parse_instance_auto(const std::string& text);

// N_W: voters approving at least one member of W.
VoterSet coverage(const Instance& inst, const CandidateSet& w);

// Symmetric-difference distance per side: |W \ W2|. Requires |W| = |W2|.
std::size_t distance(const CandidateSet& w, const CandidateSet& w2);

// Extends a subcommittee to size k with the smallest-index missing candidates.
CandidateSet complete_committee(const Instance& inst, const CandidateSet& sub);

CandidateSet make_candidate_set(const Instance& inst, const std::vector<uint32_t>& idx);
VoterSet make_voter_set(const Instance& inst, const std::vector<uint32_t>& idx);

// Per-voter |A_v ∩ W|, shared by the axiom checkers and rules.
std::vector<uint32_t> approved_counts(const Instance& inst, const CandidateSet& w);

}  // namespace creconf
