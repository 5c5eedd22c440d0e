#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "creconf/instance.hpp"

namespace creconf {

// SAT-Reconfiguration input: a CNF over `num_vars` variables (literals are
// ±(var+1) as in DIMACS) plus two satisfying assignments.
struct SatReconfigInstance {
    uint32_t num_vars = 0;
    std::vector<std::vector<int32_t>> clauses;
    std::vector<bool> phi1, phi2;
};

// DIMACS-like text: optional comments ('c'), a "p cnf <vars> <clauses>"
// header, zero-terminated clause lines, then two assignment lines
// "v <b1> ... <bn>" (0/1 per variable) for phi1 and phi2.
SatReconfigInstance parse_sat_reconfig(const std::string& text);
std::string serialize_sat_reconfig(const SatReconfigInstance& sri);

bool assignment_satisfies(const SatReconfigInstance& sri, const std::vector<bool>& phi);

struct JrReconfigInstance {
    Instance instance;
    CandidateSet committee1;
    CandidateSet committee2;
    // index layout, useful to callers and fixtures
    uint32_t clause_count = 0;       // after padding
    uint32_t literal_cand_base = 0;  // c_x = base + 2*var, c_not_x = base + 2*var + 1
    uint32_t special_cand_base = 0;
    uint32_t dummy_cand_base = 0;
};

// The committee-space image of the SAT-Reconfiguration instance: clause,
// literal, greedy, special and non-special dummy voters; clause, literal,
// special and non-special dummy candidates; k = b + (a+27)/8 and n/k = 10.
// Clauses are padded by cloning the first clause until 8 divides a+27.
// Both returned committees are verified to satisfy JR.
JrReconfigInstance sat_to_jr_reconfig(const SatReconfigInstance& sri);

// Assignment-space BFS over single bit flips; requires num_vars <= 20.
bool sat_reconfig_connected(const SatReconfigInstance& sri);

}  // namespace creconf
