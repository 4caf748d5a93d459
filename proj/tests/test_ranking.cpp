#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.h"
#include "weq/ranking.h"

using namespace weq;

namespace {

Formula parse(const std::string& s) { return parseProblem(s); }

// Scores equations by a fixed table keyed on rank token.
class TableScorer : public ConjunctScorer {
public:
    explicit TableScorer(std::vector<double> byToken) : byToken_(std::move(byToken)) {}
    std::vector<double> score(const Formula& f, std::span<const std::size_t> idx) override {
        ++calls;
        std::vector<double> out;
        for (std::size_t i : idx)
            out.push_back(byToken_.at(f[i].rankToken));
        return out;
    }
    int calls = 0;

private:
    std::vector<double> byToken_;
};

// Prefers longer equations.
class LengthScorer : public ConjunctScorer {
public:
    std::vector<double> score(const Formula& f, std::span<const std::size_t> idx) override {
        ++calls;
        std::vector<double> out;
        for (std::size_t i : idx)
            out.push_back(static_cast<double>(f[i].length()));
        return out;
    }
    int calls = 0;
};

std::vector<std::string> texts(const Formula& f) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < f.size(); ++i)
        out.push_back(equationToString(f[i], f.symbols()));
    return out;
}

Formula manyPriority5(std::size_t n) {
    std::string text = "Variables {X,Y}\nTerminals {a,b}\n";
    for (std::size_t i = 0; i < n; ++i) {
        text += "Equation: X";
        for (std::size_t k = 0; k < i % 4; ++k)
            text += " a";
        text += " = b Y\n";
    }
    return parse(text);
}

}  // namespace

TEST(Priority, Table) {
    Formula f = parse(
        "Variables {X,Y}\nTerminals {a,b}\n"
        "Equation: =\n"
        "Equation: X a =\n"
        "Equation: = b\n"
        "Equation: a X = b Y\n"
        "Equation: X a = Y b\n"
        "Equation: a X = a Y\n"
        "Equation: X b = b X X\n"
        "Equation: X = a\n"
        "Equation: X Y = Y X\n");
    const std::vector<int> expected{1, 2, 2, 3, 3, 4, 5, 5, 5};
    for (std::size_t i = 0; i < f.size(); ++i)
        EXPECT_EQ(priorityOf(f[i]), expected[i]) << equationToString(f[i], f.symbols());
}

TEST(Priority, MatchesDefinitionOnRandomEquations) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        Formula f = oracle::randomSmallFormula(rng, 1, 3, 3, 4);
        const oracle::StrEq e = oracle::toStrings(f)[0];
        auto letter = [](char c) { return c >= 'a' && c <= 'z'; };
        int want;
        if (e.lhs.empty() && e.rhs.empty())
            want = 1;
        else if (e.lhs.empty() || e.rhs.empty())
            want = 2;
        else if ((letter(e.lhs.front()) && letter(e.rhs.front()) && e.lhs.front() != e.rhs.front()) ||
                 (letter(e.lhs.back()) && letter(e.rhs.back()) && e.lhs.back() != e.rhs.back()))
            want = 3;
        else if (letter(e.lhs.front()) && e.lhs.front() == e.rhs.front())
            want = 4;
        else
            want = 5;
        EXPECT_EQ(priorityOf(f[0]), want) << e.lhs << "=" << e.rhs;
    }
}

TEST(Rank, RE1OnFig1) {
    RankContext ctx;
    RankResult r = rankEqs(oracle::fig1(), RankStrategy::RE1, ctx);
    EXPECT_EQ(texts(r.formula), (std::vector<std::string>{"\"\" = \"\"", "X b = b X X", "X = a"}));
    EXPECT_EQ(r.order, (std::vector<std::size_t>{1, 0, 2}));
    EXPECT_FALSE(r.usedModel);
    EXPECT_EQ(ctx.rankCalls, 1u);
}

TEST(Rank, ShorterFirstWithinPriority) {
    Formula f = parse("Variables {X}\nTerminals {a,b}\nEquation: a a X = b\nEquation: a = b\nEquation: X = a X a\n");
    RankContext ctx;
    RankResult r = rankEqs(f, RankStrategy::RE1, ctx);
    EXPECT_EQ(r.order, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(Rank, RE3SortsByScore) {
    Formula f = parse("Variables {X,Y}\nTerminals {a,b}\nEquation: X a = Y\nEquation: Y b = X\n");
    TableScorer scorer({0.3, 0.7});
    RankContext ctx;
    RankResult r = rankEqs(f, RankStrategy::RE3, ctx, &scorer);
    EXPECT_EQ(r.order, (std::vector<std::size_t>{1, 0}));
    EXPECT_TRUE(r.usedModel);
    // Tokens are restamped so the new order persists.
    EXPECT_EQ(r.formula[0].rankToken, 0u);
    EXPECT_EQ(r.formula[1].rankToken, 1u);
    EXPECT_EQ(scorer.calls, 1);
}

TEST(Rank, RE3TiesKeepTokenOrder) {
    Formula f = manyPriority5(5);
    TableScorer scorer({0.5, 0.5, 0.9, 0.5, 0.1});
    RankContext ctx;
    RankResult r = rankEqs(f, RankStrategy::RE3, ctx, &scorer);
    EXPECT_EQ(r.order, (std::vector<std::size_t>{2, 0, 1, 3, 4}));
}

TEST(Rank, SingleEquationUnchanged) {
    Formula f = parse("Variables {X}\nTerminals {a}\nEquation: X a = a X\n");
    LengthScorer scorer;
    for (int s = 1; s <= 7; ++s) {
        RankContext ctx(3);
        RankResult r = rankEqs(f, static_cast<RankStrategy>(s), ctx, &scorer);
        EXPECT_EQ(r.formula, f);
        EXPECT_FALSE(r.usedModel);
    }
    EXPECT_EQ(scorer.calls, 0);
}

TEST(Rank, RE2DeterministicPerSeed) {
    Formula f = manyPriority5(12);
    auto run = [&](std::uint64_t seed) {
        RankContext ctx(seed);
        std::vector<std::vector<std::size_t>> orders;
        for (int i = 0; i < 5; ++i)
            orders.push_back(rankEqs(f, RankStrategy::RE2, ctx).order);
        return orders;
    };
    EXPECT_EQ(run(1), run(1));
    EXPECT_NE(run(1), run(2));
}

TEST(Rank, RequiresModel) {
    Formula f = manyPriority5(3);
    for (int s = 3; s <= 7; ++s) {
        RankContext ctx;
        EXPECT_THROW(rankEqs(f, static_cast<RankStrategy>(s), ctx), ConfigError);
    }
    RankContext ctx;
    EXPECT_NO_THROW(rankEqs(f, RankStrategy::RE2, ctx));
}

TEST(Rank, RE4MixesModelAndShuffle) {
    Formula f = manyPriority5(6);
    LengthScorer scorer;
    RankContext ctx(8);
    int model = 0;
    for (int i = 0; i < 400; ++i)
        model += rankEqs(f, RankStrategy::RE4, ctx, &scorer).usedModel;
    EXPECT_GT(model, 150);
    EXPECT_LT(model, 250);

    RankParams never;
    never.gnnProbability = 0.0;
    RankContext ctx2(8);
    for (int i = 0; i < 50; ++i)
        EXPECT_FALSE(rankEqs(f, RankStrategy::RE4, ctx2, &scorer, never).usedModel);
}

TEST(Rank, RE5UsesModelOnce) {
    Formula single = parse("Variables {X}\nTerminals {a}\nEquation: =\nEquation: X a = a X\n");
    Formula f = manyPriority5(4);
    LengthScorer scorer;
    RankContext ctx;
    EXPECT_FALSE(rankEqs(single, RankStrategy::RE5, ctx, &scorer).usedModel);
    EXPECT_TRUE(rankEqs(f, RankStrategy::RE5, ctx, &scorer).usedModel);
    for (int i = 0; i < 20; ++i)
        EXPECT_FALSE(rankEqs(f, RankStrategy::RE5, ctx, &scorer).usedModel);
    EXPECT_EQ(scorer.calls, 1);
    EXPECT_EQ(ctx.modelCalls, 1u);
}

TEST(Rank, RE6Period) {
    Formula f = manyPriority5(4);
    LengthScorer scorer;
    RankParams p;
    p.gnnPeriod = 7;
    RankContext ctx;
    std::vector<int> used;
    for (int i = 0; i < 30; ++i)
        if (rankEqs(f, RankStrategy::RE6, ctx, &scorer, p).usedModel)
            used.push_back(i);
    EXPECT_EQ(used, (std::vector<int>{0, 7, 14, 21, 28}));
    EXPECT_LE(ctx.modelCalls, (ctx.rankCalls + p.gnnPeriod - 1) / p.gnnPeriod);
}

TEST(Rank, RE7FiresAfterStagnation) {
    Formula f = manyPriority5(4);
    LengthScorer scorer;
    RankParams p;
    p.stagnationLimit = 5;
    RankContext ctx;
    std::vector<int> used;
    for (int i = 0; i < 20; ++i)
        if (rankEqs(f, RankStrategy::RE7, ctx, &scorer, p).usedModel)
            used.push_back(i);
    EXPECT_EQ(used, (std::vector<int>{5, 11, 17}));
}

TEST(Rank, RE7ResetsWhenFirstShrinks) {
    LengthScorer scorer;
    RankParams p;
    p.stagnationLimit = 3;
    RankContext ctx;
    int used = 0;
    // The leftmost equation shrinks on every call.
    for (int len = 30; len > 10; --len) {
        std::string text = "Variables {X,Y}\nTerminals {a,b}\nEquation: X";
        for (int k = 0; k < len; ++k)
            text += " a";
        text += " = b Y\nEquation: Y a a a a a a a a a a a a a a a a a a a a a a a a a a a a a a a a a a = b X\n";
        used += rankEqs(parse(text), RankStrategy::RE7, ctx, &scorer, p).usedModel;
    }
    EXPECT_EQ(used, 0);
}

TEST(Rank, ParamsValidation) {
    RankParams p;
    EXPECT_NO_THROW(validate(p));
    p.gnnProbability = 1.5;
    EXPECT_THROW(validate(p), ConfigError);
    p = {};
    p.gnnPeriod = 0;
    EXPECT_THROW(validate(p), ConfigError);
    p = {};
    p.stagnationLimit = 0;
    EXPECT_THROW(validate(p), ConfigError);
}

TEST(Rank, StrategyNames) {
    for (int s = 1; s <= 7; ++s) {
        auto id = static_cast<RankStrategy>(s);
        EXPECT_EQ(parseRankStrategy(toString(id)), id);
    }
    EXPECT_EQ(parseRankStrategy("RE3"), RankStrategy::RE3);
    EXPECT_EQ(parseRankStrategy("re8"), std::nullopt);
}

TEST(Rank, PermutationAndStablePrefix) {
    std::mt19937_64 rng(31);
    LengthScorer scorer;
    for (int i = 0; i < 400; ++i) {
        Formula f = oracle::randomSmallFormula(rng, 8, 3, 2, 4);
        RankContext base;
        RankResult r1 = rankEqs(f, RankStrategy::RE1, base);
        for (int s = 1; s <= 7; ++s) {
            RankContext ctx(static_cast<std::uint64_t>(i));
            RankResult r = rankEqs(f, static_cast<RankStrategy>(s), ctx, &scorer);
            std::vector<std::size_t> sorted = r.order;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t k = 0; k < sorted.size(); ++k)
                ASSERT_EQ(sorted[k], k);
            for (std::size_t k = 0; k < f.size(); ++k) {
                EXPECT_EQ(r.formula[k].lhs, f[r.order[k]].lhs);
                EXPECT_EQ(r.formula[k].rhs, f[r.order[k]].rhs);
                if (priorityOf(f[r1.order[k]]) < 5) {
                    EXPECT_EQ(r.order[k], r1.order[k]);
                }
            }
            for (std::size_t k = 1; k < f.size(); ++k)
                EXPECT_LE(priorityOf(r.formula[k - 1]), priorityOf(r.formula[k]));
        }
    }
}
