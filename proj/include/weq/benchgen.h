#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "weq/core.h"

namespace weq {

enum class Benchmark { A1, A2, B, C };

std::string_view toString(Benchmark b);
std::optional<Benchmark> parseBenchmark(std::string_view name);

struct GenParams {
    std::uint32_t alphabetSize = 6;
    std::uint32_t variablePoolSize = 10;
    std::uint32_t maxBaseLength = 60;
    std::uint32_t minReplacements = 0, maxReplacements = 5;  // n
    std::uint32_t minWidth = 1, maxWidth = 5;                // m
    std::uint32_t minEquations = 1, maxEquations = 100;
    bool freshVariables = true;

    static GenParams preset(Benchmark b);  // A1, A2, B
    void validate() const;
};

// Letters are named a..z, variables X0..X{pool-1}.
SymbolTablePtr makeSymbols(const GenParams& p);

// s = s over random letters, then n single-side substring replacements by
// m variables each (variables unused in the equation when fresh).
WordEquation genEquationA(const GenParams& p, std::mt19937_64& rng);

Formula genProblem(const GenParams& p, std::mt19937_64& rng);
Formula genProblem(Benchmark b, std::mt19937_64& rng);

struct CParams {
    std::uint32_t minN = 1, maxN = 10;
    std::uint32_t maxConjuncts = 100;
};

// Template equation over Z1..Zn with every b replaced by one side of an A1
// equation; the A1 equations used are conjoined after it.
WordEquation cTemplate(std::uint32_t n, Term a, Term b, std::uint32_t firstVariable);
Formula genProblemC(std::mt19937_64& rng, const CParams& p = {});

// Problem `index` of a benchmark under `seed`; independent of generation order.
Formula genIndexed(Benchmark b, std::uint64_t seed, std::uint64_t index);

}  // namespace weq
