#pragma once

// Independent reference implementations used only by tests.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "weq/calculus.h"
#include "weq/core.h"
#include "weq/gcn.h"
#include "weq/graph.h"

namespace oracle {

// Equations as plain strings: lowercase = letter, uppercase = variable.
struct StrEq {
    std::string lhs, rhs;
};
using StrSystem = std::vector<StrEq>;

// Letters map to 'a'+id, variables to 'A'+id (ids must stay below 26).
StrSystem toStrings(const weq::Formula& f);
std::string wordString(const weq::Word& w);

enum class Verdict { Sat, Unsat, Unknown };

// Breadth-first Nielsen search with a visited-state set. Substitutions reuse
// the variable name (X -> aX), so no fresh variables are needed. States longer
// than maxSymbols are dropped; any drop turns an UNSAT verdict into UNKNOWN.
Verdict bfsNielsen(const StrSystem& sys, std::size_t stateCap = 100000,
                   std::size_t maxSymbols = 64);

// Every assignment of the given variables to words over `letters` with length
// at most maxLen, in a fixed order.
std::vector<std::map<char, std::string>> allAssignments(const std::string& vars,
                                                        const std::string& letters,
                                                        std::size_t maxLen);

std::string substitute(const std::string& w, const std::map<char, std::string>& a);
bool holds(const StrSystem& sys, const std::map<char, std::string>& a);

// Bounded solution set of f: assignments of `vars` (names via toStrings order)
// with |value| <= maxLen that satisfy f, as sorted strings "X=..;Y=..".
std::vector<std::string> boundedSolutions(const weq::Formula& f, const std::string& vars,
                                          const std::string& letters, std::size_t maxLen);

// Random formula with at most `maxEqs` equations, `maxVars` variables,
// `maxLetters` letters and sides of length <= maxSide.
weq::Formula randomSmallFormula(std::mt19937_64& rng, std::size_t maxEqs, std::size_t maxVars,
                                std::size_t maxLetters, std::size_t maxSide);

// Dense-matrix GCN forward pass (Eigen), written from the definitions.
std::vector<double> denseEmbed(const weq::EquationGraph& g, const weq::gcn::ModelWeights& w);
std::vector<double> denseScores(const std::vector<weq::EquationGraph>& graphs,
                                const weq::gcn::ModelWeights& w);

// Random valid graph with `nodes` nodes: one '=' root, random types and edges.
weq::EquationGraph randomGraph(std::mt19937_64& rng, std::size_t nodes);

// The same graph with node indices permuted; the root stays a '=' node.
weq::EquationGraph relabel(const weq::EquationGraph& g, const std::vector<std::uint32_t>& perm);

// Compares the bounded solutions of a premise (values of length <= maxLen)
// with the union of its children's, mapped back through each child's
// substitution. Empty string when they agree, otherwise a description.
std::string preservationMismatch(const weq::Formula& premise, const weq::BranchOutcome& out,
                                 std::size_t maxLen);

weq::Formula fig1();

// SAT when an assignment with values of length <= maxLen satisfies f,
// otherwise the BFS verdict.
Verdict decideSmall(const weq::Formula& f, std::size_t maxLen = 2);

struct BruteMus {
    std::optional<std::vector<std::size_t>> subset;
    std::size_t undecided = 0;
};

// Decides all 2^n subsets and returns the smallest UNSAT one, ties broken
// lexicographically.
BruteMus bruteForceMus(const weq::Formula& f);

// X = a, Y = b, X = b; variants > 0 add satisfiable distractors over Z, W,
// shuffle the conjuncts and permute the letter and variable names.
weq::Formula plantedMus(std::uint64_t variant);

}  // namespace oracle
