#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.h"
#include "weq/benchgen.h"
#include "weq/calculus.h"
#include "weq/gcn.h"
#include "weq/graph.h"
#include "weq/mus.h"
#include "weq/ranking.h"
#include "weq/solver.h"

using namespace weq;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome fig1Unsat() {
    std::string detail;
    bool pass = true;
    for (RankStrategy s : {RankStrategy::RE1, RankStrategy::RE2}) {
        SolveConfig cfg;
        cfg.strategy = s;
        SolveResult r = splitEquations(oracle::fig1(), cfg);
        pass = pass && r.status == Status::Unsat && r.elapsed <= 1.0 && r.splits <= 200;
        detail += fmt("%s=%s splits=%llu time=%.4fs ", std::string(toString(s)).c_str(),
                      std::string(toString(r.status)).c_str(), static_cast<unsigned long long>(r.splits),
                      r.elapsed);
    }
    return {pass, detail};
}

Outcome branchCardinality() {
    std::mt19937_64 rng(2024);
    std::size_t applications = 0, r7 = 0, r8 = 0, violations = 0;
    while (applications < 2000) {
        Formula f = oracle::randomSmallFormula(rng, 3, 3, 3, 5);
        auto [g, st] = simplifyAndCheck(f);
        if (st != Status::Unknown)
            continue;
        for (bool suffix : {false, true}) {
            BranchOutcome out = applyRules(g, CalculusOptions{suffix});
            ++applications;
            if (out.rule.rule == Rule::R7) {
                ++r7;
                violations += out.children.size() != 2;
            } else if (out.rule.rule == Rule::R8) {
                ++r8;
                violations += out.children.size() != 3;
            }
        }
    }
    return {violations == 0 && r7 > 0 && r8 > 0,
            fmt("applications=%zu R7=%zu R8=%zu violations=%zu", applications, r7, r8, violations)};
}

Outcome soundnessSat() {
    const auto start = std::chrono::steady_clock::now();
    std::size_t sat = 0, unsat = 0, unknown = 0, bad = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        Formula f = genIndexed(Benchmark::A1, 2024, i);
        SolveConfig cfg;
        cfg.timeoutSeconds = 5;
        SolveResult r = splitEquations(f, cfg);
        if (r.status == Status::Sat) {
            ++sat;
            bad += !r.witness || !checkWitness(f, *r.witness);
        } else if (r.status == Status::Unsat) {
            ++unsat;
        } else {
            ++unknown;
        }
    }
    const double total = seconds(start);
    return {bad == 0 && total < 600.0,
            fmt("sat=%zu unsat=%zu unknown=%zu bad_witnesses=%zu total=%.1fs", sat, unsat, unknown, bad,
                total)};
}

Outcome oracleEquivalence() {
    std::mt19937_64 rng(404);
    std::size_t both = 0, disagreements = 0;
    const std::size_t instances = 400;
    for (std::size_t i = 0; i < instances; ++i) {
        Formula f = oracle::randomSmallFormula(rng, 2, 2, 2, 4);
        SolveConfig cfg;
        cfg.maxSplits = 3000;
        cfg.timeoutSeconds = 30;
        SolveResult r = splitEquations(f, cfg);
        oracle::Verdict v = oracle::bfsNielsen(oracle::toStrings(f));
        if (r.status == Status::Unknown || v == oracle::Verdict::Unknown)
            continue;
        ++both;
        disagreements += (r.status == Status::Sat) != (v == oracle::Verdict::Sat);
    }
    return {disagreements == 0 && both > 0,
            fmt("instances=%zu both_decided=%zu disagreements=%zu", instances, both, disagreements)};
}

Outcome preservation() {
    std::mt19937_64 rng(99);
    std::size_t premises = 0, counterexamples = 0;
    while (premises < 240) {
        Formula f = oracle::randomSmallFormula(rng, 2, 2, 2, 4);
        auto [g, st] = simplifyAndCheck(f);
        if (st != Status::Unknown)
            continue;
        for (bool suffix : {false, true})
            counterexamples += !oracle::preservationMismatch(g, applyRules(g, CalculusOptions{suffix}), 3).empty();
        ++premises;
    }
    return {counterexamples == 0, fmt("premises=%zu counterexamples=%zu", premises, counterexamples)};
}

Outcome musPlanted() {
    SolveConfig cfg;
    cfg.timeoutSeconds = 5;
    InternalOracle internal(cfg);
    std::size_t ok = 0;
    const std::size_t total = 51;
    for (std::uint64_t v = 0; v < total; ++v) {
        Formula f = oracle::plantedMus(v);
        auto r = findMus(f, internal);
        oracle::BruteMus brute = oracle::bruteForceMus(f);
        if (!r || !brute.subset || *brute.subset != r->subset)
            continue;
        bool minimal = oracle::decideSmall(f.subset(r->subset)) == oracle::Verdict::Unsat;
        for (std::size_t drop = 0; minimal && drop < r->subset.size(); ++drop) {
            std::vector<std::size_t> proper = r->subset;
            proper.erase(proper.begin() + static_cast<std::ptrdiff_t>(drop));
            minimal = oracle::decideSmall(f.subset(proper)) == oracle::Verdict::Sat;
        }
        ok += minimal;
    }
    return {ok == total, fmt("variants=%zu verified=%zu", total, ok)};
}

Outcome priorityAndFig2() {
    Formula p = parseProblem(
        "Variables {X,Y,U,V}\nTerminals {a,b}\n"
        "Equation: =\n"
        "Equation: = X Y\n"
        "Equation: a U = b V\n"
        "Equation: a U = a V\n"
        "Equation: X b = b X X\n");
    const std::vector<int> expected{1, 2, 3, 4, 5};
    std::string got;
    bool pass = true;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const int prio = priorityOf(p[i]);
        pass = pass && prio == expected[i];
        got += std::to_string(prio);
    }

    Formula f = parseProblem("Variables {X,Y}\nTerminals {a}\nEquation: X a X = Y\nEquation: a a a = X a Y\n");
    OccurrenceCounts c = occurrenceCounts(f);
    const std::size_t x = c.at(*f.symbols().find("X")), y = c.at(*f.symbols().find("Y")),
                      a = c.at(*f.symbols().find("a"));
    auto chain = [](std::size_t n) {
        std::string s;
        for (int d : binaryDigits(n))
            s += static_cast<char>('0' + d);
        return s;
    };
    pass = pass && x == 3 && y == 2 && a == 5 && chain(x) == "11" && chain(y) == "10" && chain(a) == "101";

    // Every chain node of the first graph carries a digit of one of the counts.
    const EquationGraph g = encodeFormula(f)[0];
    std::size_t bitNodes = 0;
    for (std::uint8_t t : g.nodes)
        bitNodes += t >= 3;
    pass = pass && bitNodes == 7;
    return {pass, fmt("priorities=%s counts X:%zu Y:%zu a:%zu chains %s/%s/%s chain_nodes=%zu", got.c_str(), x, y, a,
                      chain(x).c_str(), chain(y).c_str(), chain(a).c_str(), bitNodes)};
}

Outcome gcnForward() {
    std::mt19937_64 rng(123);
    double worst = 0;
    std::size_t relabelMismatch = 0, cacheMismatch = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t m = 1 + static_cast<std::size_t>(i) % 4;
        const std::size_t rounds = 1 + static_cast<std::size_t>(i) % 3;
        gcn::ModelWeights w = gcn::ModelWeights::random(1, m, rounds, 0, 1000 + static_cast<std::uint64_t>(i));
        EquationGraph g = oracle::randomGraph(rng, 1 + static_cast<std::size_t>(i) % 8);
        const gcn::Vector got = gcn::embedGraph(g, w);
        const std::vector<double> want = oracle::denseEmbed(g, w);
        for (std::size_t k = 0; k < got.size(); ++k)
            worst = std::max(worst, std::abs(got[k] - want[k]));

        std::vector<std::uint32_t> perm(g.nodes.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        relabelMismatch += gcn::embedGraph(oracle::relabel(g, perm), w) != got;
    }

    auto w = std::make_shared<gcn::ModelWeights>(gcn::ModelWeights::random(2, 4, 3, 0, 12));
    gcn::GcnScorer cached(w, 2, true), plain(w, 2, false);
    for (int i = 0; i < 100; ++i) {
        Formula f = oracle::randomSmallFormula(rng, 5, 3, 2, 5);
        std::vector<std::size_t> idx(f.size());
        std::iota(idx.begin(), idx.end(), 0);
        cacheMismatch += cached.score(f, idx) != plain.score(f, idx);
        cacheMismatch += cached.score(f, idx) != plain.score(f, idx);
    }
    return {worst <= 1e-6 && relabelMismatch == 0 && cacheMismatch == 0,
            fmt("fixtures=100 max_abs_diff=%.2e relabel_mismatches=%zu cache_mismatches=%zu", worst,
                relabelMismatch, cacheMismatch)};
}

Outcome generators() {
    std::size_t nonLinear = 0;
    for (Benchmark b : {Benchmark::A1, Benchmark::A2}) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(b) + 10);
        GenParams p = GenParams::preset(b);
        for (int i = 0; i < 10000; ++i)
            nonLinear += !isLinear(genEquationA(p, rng));
    }

    std::mt19937_64 rng(12);
    std::size_t withRepeat = 0, outOfRange = 0;
    const std::size_t bTotal = 500;
    for (std::size_t i = 0; i < bTotal; ++i) {
        Formula f = genProblem(Benchmark::B, rng);
        outOfRange += f.size() < 2 || f.size() > 50;
        bool repeat = false;
        for (const auto& e : f.equations()) {
            std::map<Term, int> n;
            for (const Word* side : {&e->lhs, &e->rhs})
                for (Term t : *side)
                    repeat = repeat || (t.isVariable() && ++n[t] >= 2);
        }
        withRepeat += repeat;
    }
    for (int i = 0; i < 500; ++i) {
        Formula a1 = genProblem(Benchmark::A1, rng);
        Formula a2 = genProblem(Benchmark::A2, rng);
        outOfRange += a1.size() < 1 || a1.size() > 100 || a2.size() < 1 || a2.size() > 100;
    }

    std::size_t missingTemplate = 0;
    for (int i = 0; i < 300; ++i) {
        Formula f = genProblemC(rng);
        outOfRange += f.size() < 1 || f.size() > 100;
        missingTemplate += f.size() == 0 || isLinear(f[0]) || f[0].lhs.empty() ||
                           f.symbols().name(f[0].lhs.front())[0] != 'Z';
    }

    std::size_t differing = 0;
    for (Benchmark b : {Benchmark::A1, Benchmark::A2, Benchmark::B, Benchmark::C})
        for (std::uint64_t i = 0; i < 25; ++i)
            differing += serializeProblem(genIndexed(b, 42, i)) != serializeProblem(genIndexed(b, 42, i));

    const bool pass = nonLinear == 0 && withRepeat * 2 >= bTotal && missingTemplate == 0 && outOfRange == 0 &&
                      differing == 0;
    return {pass, fmt("a_nonlinear=%zu/20000 b_repeat=%zu/%zu c_missing_template=%zu out_of_range=%zu "
                      "regeneration_diffs=%zu",
                      nonLinear, withRepeat, bTotal, missingTemplate, outOfRange, differing)};
}

Outcome throughput() {
    GenParams p = GenParams::preset(Benchmark::A1);
    p.minEquations = p.maxEquations = 100;
    std::mt19937_64 rng(7);
    std::uint64_t splits = 0;
    double elapsed = 0, slowest = 1e18;
    const int instances = 20;
    for (int i = 0; i < instances; ++i) {
        Formula f = genProblem(p, rng);
        SolveConfig cfg;
        cfg.strategy = RankStrategy::RE1;
        cfg.timeoutSeconds = 2;
        SolveResult r = splitEquations(f, cfg);
        splits += r.splits;
        elapsed += r.elapsed;
        if (r.elapsed >= 0.05)
            slowest = std::min(slowest, static_cast<double>(r.splits) / r.elapsed);
    }
    const double rate = static_cast<double>(splits) / elapsed;
    const bool pass = rate >= 5000 && (slowest > 1e17 || slowest >= 5000);
    return {pass, fmt("instances=%d splits=%llu time=%.2fs rate=%.0f/s slowest_long_run=%.0f/s", instances,
                      static_cast<unsigned long long>(splits), elapsed, rate, slowest > 1e17 ? rate : slowest)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"fig1-unsat", fig1Unsat},
        {"branch-cardinality", branchCardinality},
        {"soundness-sat", soundnessSat},
        {"oracle-equivalence", oracleEquivalence},
        {"solution-preservation", preservation},
        {"mus-planted", musPlanted},
        {"priority-and-occurrence", priorityAndFig2},
        {"gcn-forward", gcnForward},
        {"generators", generators},
        {"throughput", throughput},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        failed += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
