#include "weq/benchgen.h"

#include <algorithm>
#include <cctype>

#include "weq/rng.h"

namespace weq {

namespace {

template <class T>
T draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return static_cast<T>(uniformInt(rng, lo, hi));
}

}  // namespace

std::string_view toString(Benchmark b) {
    switch (b) {
    case Benchmark::A1: return "A1";
    case Benchmark::A2: return "A2";
    case Benchmark::B: return "B";
    case Benchmark::C: return "C";
    }
    return "A1";
}

std::optional<Benchmark> parseBenchmark(std::string_view name) {
    std::string upper(name);
    for (char& c : upper)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (Benchmark b : {Benchmark::A1, Benchmark::A2, Benchmark::B, Benchmark::C})
        if (upper == toString(b))
            return b;
    return std::nullopt;
}

GenParams GenParams::preset(Benchmark b) {
    GenParams p;
    switch (b) {
    case Benchmark::A1:
    case Benchmark::C:
        break;
    case Benchmark::A2:
        p.alphabetSize = 26;
        p.variablePoolSize = 100;
        p.maxReplacements = 16;
        p.maxWidth = 1;
        break;
    case Benchmark::B:
        p.alphabetSize = 10;
        p.variablePoolSize = 10;
        p.maxBaseLength = 50;
        p.maxWidth = 1;
        p.minEquations = 2;
        p.maxEquations = 50;
        p.freshVariables = false;
        break;
    }
    return p;
}

void GenParams::validate() const {
    if (alphabetSize == 0 || alphabetSize > 26)
        throw ConfigError("alphabet size must be in [1,26]");
    if (maxBaseLength == 0)
        throw ConfigError("maximum base length must be positive");
    if (minReplacements > maxReplacements || minWidth > maxWidth || minEquations > maxEquations)
        throw ConfigError("empty parameter range");
    if (minWidth == 0)
        throw ConfigError("replacement width must be positive");
    if (minEquations == 0)
        throw ConfigError("a problem needs at least one equation");
    if (variablePoolSize == 0 && maxReplacements > 0)
        throw ConfigError("replacements need a non-empty variable pool");
}

SymbolTablePtr makeSymbols(const GenParams& p) {
    auto symbols = std::make_shared<SymbolTable>();
    for (std::uint32_t i = 0; i < p.alphabetSize; ++i)
        symbols->addLetter(std::string(1, static_cast<char>('a' + i)));
    for (std::uint32_t i = 0; i < p.variablePoolSize; ++i)
        symbols->addVariable("X" + std::to_string(i));
    return symbols;
}

WordEquation genEquationA(const GenParams& p, std::mt19937_64& rng) {
    const auto baseLength = draw<std::uint32_t>(rng, 1, p.maxBaseLength);
    Word s;
    for (std::uint32_t i = 0; i < baseLength; ++i)
        s.push_back(Term::letter(draw<std::uint32_t>(rng, 0, p.alphabetSize - 1)));
    WordEquation e{s, s, 0};

    std::vector<std::uint32_t> unused(p.variablePoolSize);
    for (std::uint32_t i = 0; i < p.variablePoolSize; ++i)
        unused[i] = i;
    const auto n = draw<std::uint32_t>(rng, p.minReplacements, p.maxReplacements);
    for (std::uint32_t step = 0; step < n; ++step) {
        Word& side = draw<int>(rng, 0, 1) == 0 ? e.lhs : e.rhs;
        const std::uint64_t len = side.size();
        // (start, length >= 1) pairs, enumerated by index.
        const std::uint64_t pairs = len * (len + 1) / 2;
        std::uint64_t k = draw<std::uint64_t>(rng, 0, pairs - 1);
        std::uint64_t start = 0;
        while (k >= len - start) {
            k -= len - start;
            ++start;
        }
        const std::uint64_t runLength = k + 1;
        const auto m = draw<std::uint32_t>(rng, p.minWidth, p.maxWidth);
        Word vars;
        if (p.freshVariables) {
            if (unused.size() < m)
                break;
            for (std::uint32_t j = 0; j < m; ++j) {
                auto pick = draw<std::size_t>(rng, 0, unused.size() - 1);
                vars.push_back(Term::variable(unused[pick]));
                unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(pick));
            }
        } else {
            for (std::uint32_t j = 0; j < m; ++j)
                vars.push_back(
                    Term::variable(draw<std::uint32_t>(rng, 0, p.variablePoolSize - 1)));
        }
        auto first = side.begin() + static_cast<std::ptrdiff_t>(start);
        first = side.erase(first, first + static_cast<std::ptrdiff_t>(runLength));
        side.insert(first, vars.begin(), vars.end());
    }
    return e;
}

Formula genProblem(const GenParams& p, std::mt19937_64& rng) {
    p.validate();
    const auto k = draw<std::uint32_t>(rng, p.minEquations, p.maxEquations);
    std::vector<WordEquation> eqs;
    eqs.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        eqs.push_back(genEquationA(p, rng));
        eqs.back().rankToken = i;
    }
    return Formula::fromEquations(makeSymbols(p), std::move(eqs));
}

Formula genProblem(Benchmark b, std::mt19937_64& rng) {
    if (b == Benchmark::C)
        return genProblemC(rng);
    return genProblem(GenParams::preset(b), rng);
}

WordEquation cTemplate(std::uint32_t n, Term a, Term b, std::uint32_t firstVariable) {
    auto z = [&](std::uint32_t i) { return Term::variable(firstVariable + i - 1); };
    WordEquation e;
    e.lhs = {z(n), a, z(n)};
    e.rhs = {a, z(n)};
    for (std::uint32_t i = n - 1; i >= 1; --i) {
        e.lhs.insert(e.lhs.end(), {b, z(i)});
        e.rhs.insert(e.rhs.end(), {z(i), z(i), b});
    }
    e.rhs.insert(e.rhs.end(), {a, a});
    return e;
}

Formula genProblemC(std::mt19937_64& rng, const CParams& cp) {
    const GenParams p = GenParams::preset(Benchmark::A1);
    const auto n = draw<std::uint32_t>(rng, cp.minN, cp.maxN);
    auto symbols = std::make_shared<SymbolTable>(*makeSymbols(p));
    const std::uint32_t firstZ = symbols->numVariables();
    for (std::uint32_t i = 1; i <= n; ++i)
        symbols->addVariable("Z" + std::to_string(i));
    const Term a = Term::letter(0), b = Term::letter(1);

    WordEquation tmpl = cTemplate(n, a, b, firstZ);
    std::vector<WordEquation> parts;
    auto splice = [&](Word& side) {
        Word out;
        for (Term t : side) {
            if (t != b || 1 + parts.size() >= cp.maxConjuncts) {
                out.push_back(t);
                continue;
            }
            WordEquation e = genEquationA(p, rng);
            const Word& chosen = draw<int>(rng, 0, 1) == 0 ? e.lhs : e.rhs;
            out.insert(out.end(), chosen.begin(), chosen.end());
            parts.push_back(std::move(e));
        }
        side = std::move(out);
    };
    splice(tmpl.lhs);
    splice(tmpl.rhs);

    std::vector<WordEquation> eqs{std::move(tmpl)};
    for (auto& e : parts)
        eqs.push_back(std::move(e));
    for (std::uint32_t i = 0; i < eqs.size(); ++i)
        eqs[i].rankToken = i;
    return Formula::fromEquations(std::move(symbols), std::move(eqs));
}

Formula genIndexed(Benchmark b, std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(seq);
    return genProblem(b, rng);
}

}  // namespace weq
