#include "creconf/instance.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace creconf {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

}  // namespace

Instance::Instance(uint32_t m, uint32_t k, const std::vector<std::vector<uint32_t>>& ballots) {
    if (ballots.empty()) throw std::invalid_argument("instance needs at least one voter");
    if (k < 1 || k > m) throw std::invalid_argument("committee size k must satisfy 1 <= k <= m");
    n_ = static_cast<uint32_t>(ballots.size());
    m_ = m;
    k_ = k;
    wpc_ = (static_cast<std::size_t>(m_) + DynBitset::kWordBits - 1) / DynBitset::kWordBits;
    wpv_ = (static_cast<std::size_t>(n_) + DynBitset::kWordBits - 1) / DynBitset::kWordBits;
    approvals_.assign(static_cast<std::size_t>(n_) * wpc_, 0);
    supports_.assign(static_cast<std::size_t>(m_) * wpv_, 0);
    support_size_.assign(m_, 0);
    ballot_size_.assign(n_, 0);

    for (uint32_t v = 0; v < n_; ++v) {
        auto* row = approvals_.data() + static_cast<std::size_t>(v) * wpc_;
        for (uint32_t c : ballots[v]) {
            if (c >= m_) throw std::invalid_argument("candidate index out of range in ballot");
            auto& word = row[c / DynBitset::kWordBits];
            DynBitset::word_t bit = DynBitset::word_t{1} << (c % DynBitset::kWordBits);
            if (word & bit) throw std::invalid_argument("duplicate candidate in ballot");
            word |= bit;
            supports_[static_cast<std::size_t>(c) * wpv_ + v / DynBitset::kWordBits] |=
                DynBitset::word_t{1} << (v % DynBitset::kWordBits);
            ++support_size_[c];
            ++ballot_size_[v];
        }
    }
}

Instance parse_instance(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    auto next_data_line = [&](bool required) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash == 0) continue;  // whole-line comment
            return true;
        }
        if (required) parse_fail(lineno + 1, "unexpected end of input");
        return false;
    };

    if (!next_data_line(true)) parse_fail(1, "empty input");
    long n = -1, m = -1, k = -1;
    {
        std::istringstream hs(line);
        if (!(hs >> n >> m >> k)) parse_fail(lineno, "malformed header, expected 'n m k'");
        std::string rest;
        if (hs >> rest) parse_fail(lineno, "trailing tokens after header");
        if (n < 1) parse_fail(lineno, "voter count must be >= 1");
        if (m < 1) parse_fail(lineno, "candidate count must be >= 1");
        if (k < 1) parse_fail(lineno, "committee size must be >= 1");
        if (k > m) parse_fail(lineno, "k > m");
    }

    std::vector<std::vector<uint32_t>> ballots;
    ballots.reserve(static_cast<std::size_t>(n));
    for (long v = 0; v < n; ++v) {
        if (!next_data_line(true)) break;
        std::vector<uint32_t> ballot;
        std::istringstream bs(line);
        long c;
        while (bs >> c) {
            if (c < 0 || c >= m) parse_fail(lineno, "candidate index " + std::to_string(c) + " out of range");
            if (std::find(ballot.begin(), ballot.end(), static_cast<uint32_t>(c)) != ballot.end())
                parse_fail(lineno, "duplicate candidate " + std::to_string(c) + " in ballot");
            ballot.push_back(static_cast<uint32_t>(c));
        }
        if (!bs.eof()) parse_fail(lineno, "non-numeric token in ballot");
        ballots.push_back(std::move(ballot));
    }

    // Anything left must be comments or blank lines.
    while (next_data_line(false)) {
        bool blank = std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); });
        if (!blank) parse_fail(lineno, "trailing content after last ballot");
    }

    return Instance(static_cast<uint32_t>(m), static_cast<uint32_t>(k), ballots);
}

Instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
}

std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << inst.n() << ' ' << inst.m() << ' ' << inst.k() << '\n';
    for (uint32_t v = 0; v < inst.n(); ++v) {
        bool first = true;
        inst.approvals(v).for_each([&](uint32_t c) {
            if (!first) out << ' ';
            out << c;
            first = false;
        });
        out << '\n';
    }
    return out.str();
}

Instance parse_instance_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    uint32_t m = j.at("m").get<uint32_t>();
    uint32_t k = j.at("k").get<uint32_t>();
    auto ballots = j.at("approvals").get<std::vector<std::vector<uint32_t>>>();
    if (j.contains("n") && j.at("n").get<std::size_t>() != ballots.size())
        throw std::invalid_argument("json instance: 'n' disagrees with approvals length");
    return Instance(m, k, ballots);
}

std::string serialize_instance_json(const Instance& inst) {
    nlohmann::json j;
    j["n"] = inst.n();
    j["m"] = inst.m();
    j["k"] = inst.k();
    auto arr = nlohmann::json::array();
    for (uint32_t v = 0; v < inst.n(); ++v) arr.push_back(inst.approvals(v).to_indices());
    j["approvals"] = std::move(arr);
    return j.dump();
}

Instance parse_instance_auto(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        if (ch == '{') return parse_instance_json(text);
        break;
    }
    return parse_instance(text);
}

VoterSet coverage(const Instance& inst, const CandidateSet& w) {
    VoterSet cov = inst.empty_voter_set();
    w.for_each([&](uint32_t c) { or_into(cov, inst.supports(c)); });
    return cov;
}

std::size_t distance(const CandidateSet& w, const CandidateSet& w2) {
    if (w.count() != w2.count())
        throw std::invalid_argument("distance: committees differ in cardinality");
    return w.count_andnot(w2);
}

CandidateSet complete_committee(const Instance& inst, const CandidateSet& sub) {
    CandidateSet w = sub;
    std::size_t have = w.count();
    if (have > inst.k()) throw std::invalid_argument("subcommittee larger than k");
    for (uint32_t c = 0; c < inst.m() && have < inst.k(); ++c) {
        if (!w.test(c)) {
            w.set(c);
            ++have;
        }
    }
    return w;
}

CandidateSet make_candidate_set(const Instance& inst, const std::vector<uint32_t>& idx) {
    for (uint32_t c : idx)
        if (c >= inst.m()) throw std::invalid_argument("candidate index out of range");
    return DynBitset::from_indices(inst.m(), idx);
}

VoterSet make_voter_set(const Instance& inst, const std::vector<uint32_t>& idx) {
    for (uint32_t v : idx)
        if (v >= inst.n()) throw std::invalid_argument("voter index out of range");
    return DynBitset::from_indices(inst.n(), idx);
}

std::vector<uint32_t> approved_counts(const Instance& inst, const CandidateSet& w) {
    std::vector<uint32_t> counts(inst.n());
    for (uint32_t v = 0; v < inst.n(); ++v)
        counts[v] = static_cast<uint32_t>(count_and(inst.approvals(v), w));
    return counts;
}

}  // namespace creconf
