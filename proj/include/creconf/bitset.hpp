#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace creconf {

// Dense bitset over a fixed universe [0, size), packed into 64-bit words.
// Committees, subcommittees and voter groups all use this representation;
// the universe size is fixed when the owning Instance is parsed.
class DynBitset {
public:
    using word_t = uint64_t;
    static constexpr std::size_t kWordBits = 64;

    DynBitset() = default;
    explicit DynBitset(std::size_t nbits)
        : words_((nbits + kWordBits - 1) / kWordBits, 0), nbits_(nbits) {}

    static DynBitset from_indices(std::size_t nbits, const std::vector<uint32_t>& idx) {
        DynBitset b(nbits);
        for (uint32_t i : idx) b.set(i);
        return b;
    }

    std::size_t size() const { return nbits_; }
    std::size_t word_count() const { return words_.size(); }
    const word_t* words() const { return words_.data(); }
    word_t* words() { return words_.data(); }

    void set(std::size_t i) {
        check_index(i);
        words_[i / kWordBits] |= word_t{1} << (i % kWordBits);
    }
    void reset(std::size_t i) {
        check_index(i);
        words_[i / kWordBits] &= ~(word_t{1} << (i % kWordBits));
    }
    bool test(std::size_t i) const {
        check_index(i);
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1;
    }

    void clear() { std::fill(words_.begin(), words_.end(), word_t{0}); }

    std::size_t count() const {
        std::size_t c = 0;
        for (word_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool any() const {
        for (word_t w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    // First set bit at or after `from`; size() if none.
    std::size_t next_set_bit(std::size_t from) const {
        if (from >= nbits_) return nbits_;
        std::size_t wi = from / kWordBits;
        word_t w = words_[wi] & (~word_t{0} << (from % kWordBits));
        while (true) {
            if (w) return wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
            if (++wi == words_.size()) return nbits_;
            w = words_[wi];
        }
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            word_t w = words_[wi];
            while (w) {
                fn(static_cast<uint32_t>(wi * kWordBits + std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

    std::vector<uint32_t> to_indices() const {
        std::vector<uint32_t> out;
        out.reserve(count());
        for_each([&](uint32_t i) { out.push_back(i); });
        return out;
    }

    DynBitset& operator|=(const DynBitset& o) {
        check_match(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    DynBitset& operator&=(const DynBitset& o) {
        check_match(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    DynBitset& operator-=(const DynBitset& o) {  // set difference
        check_match(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    friend DynBitset operator|(DynBitset a, const DynBitset& b) { return a |= b; }
    friend DynBitset operator&(DynBitset a, const DynBitset& b) { return a &= b; }
    friend DynBitset operator-(DynBitset a, const DynBitset& b) { return a -= b; }

    bool operator==(const DynBitset& o) const { return nbits_ == o.nbits_ && words_ == o.words_; }
    bool operator!=(const DynBitset& o) const { return !(*this == o); }
    // Lexicographic on the index sequence, for canonical tie-breaking.
    bool operator<(const DynBitset& o) const { return to_indices() < o.to_indices(); }

    bool is_subset_of(const DynBitset& o) const {
        check_match(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    bool intersects(const DynBitset& o) const {
        check_match(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    std::size_t count_and(const DynBitset& o) const {
        check_match(o);
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
        return c;
    }
    std::size_t count_andnot(const DynBitset& o) const {
        check_match(o);
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(std::popcount(words_[i] & ~o.words_[i]));
        return c;
    }

private:
    void check_index(std::size_t i) const {
        if (i >= nbits_) throw std::out_of_range("DynBitset: index out of range");
    }
    void check_match(const DynBitset& o) const {
        if (nbits_ != o.nbits_) throw std::invalid_argument("DynBitset: universe size mismatch");
    }

    std::vector<word_t> words_;
    std::size_t nbits_ = 0;
};

struct DynBitsetHash {
    std::size_t operator()(const DynBitset& b) const {
        // FNV-1a over the words
        uint64_t h = 1469598103934665603ULL;
        for (std::size_t i = 0; i < b.word_count(); ++i) {
            h ^= b.words()[i];
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace creconf
