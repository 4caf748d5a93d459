#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "weq/core.h"

namespace weq {

// Node type codes are part of the weight-file contract; do not renumber.
enum class NodeType : std::uint8_t {
    Equals = 0,
    Letter = 1,
    Variable = 2,
    LetterBit0 = 3,
    LetterBit1 = 4,
    VariableBit0 = 5,
    VariableBit1 = 6,
};

inline constexpr int kNodeTypeCount = 7;

struct EquationGraph {
    std::vector<std::uint8_t> nodes;  // NodeType codes
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::uint32_t root = 0;

    // Number of letter and variable nodes, i.e. the equation length.
    std::size_t termCount() const;

    friend bool operator==(const EquationGraph&, const EquationGraph&) = default;
};

using OccurrenceCounts = std::unordered_map<Term, std::size_t, TermHash>;

OccurrenceCounts occurrenceCounts(const Formula& f);

// Root '=' node, the two sides as linked chains, then one binary chain per
// distinct term (most significant bit first) whose head points at every
// occurrence of the term. Throws Error if a term is missing from `counts`.
EquationGraph encodeEquation(const WordEquation& e, const OccurrenceCounts& counts);

std::vector<EquationGraph> encodeFormula(const Formula& f);

// Binary digits of n, most significant first, no leading zeros (n >= 1).
std::vector<int> binaryDigits(std::size_t n);

// {"nodes":[...],"edges":[[s,d],...],"root":r}
std::string graphToJson(const EquationGraph& g);
EquationGraph graphFromJson(const std::string& text);

}  // namespace weq
