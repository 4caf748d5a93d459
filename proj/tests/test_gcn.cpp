#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "oracles.h"
#include "weq/gcn.h"

using namespace weq;
using namespace weq::gcn;

namespace {

ModelWeights zeroWeights(int task, std::size_t m, std::size_t rounds, std::size_t nLimit = 0) {
    ModelWeights w = ModelWeights::random(task, m, rounds, nLimit, 1);
    for (auto& row : w.embedding)
        std::fill(row.begin(), row.end(), 0.0);
    auto zero = [](Mlp& mlp) {
        for (auto& layer : mlp.layers) {
            for (auto& r : layer.w)
                std::fill(r.begin(), r.end(), 0.0);
            std::fill(layer.b.begin(), layer.b.end(), 0.0);
        }
    };
    for (auto& mlp : w.roundMlps)
        zero(mlp);
    zero(w.head);
    return w;
}

void expectNear(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-6) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

const char* kMinimal = R"({"version":1,"task":1,"m":2,"T":1,
  "embedding":[[1,0],[0,1],[1,1],[0,0],[1,0],[0,1],[1,1]],
  "rounds":[{"layers":[{"w":[[1,0],[0,1]],"b":[0,0]}]}],
  "head":{"layers":[{"w":[[1,0],[0,1]],"b":[0,0]}]}})";

std::vector<EquationGraph> fig2Graphs() {
    return encodeFormula(parseProblem(
        "Variables {X,Y}\nTerminals {a}\nEquation: X a X = Y\nEquation: a a a = X a Y\n"));
}

}  // namespace

TEST(Weights, MinimalLoads) {
    ModelWeights w = parseWeights(kMinimal);
    EXPECT_EQ(w.m, 2u);
    EXPECT_EQ(w.rounds, 1u);
    EXPECT_EQ(w.task, 1);
    EXPECT_EQ(w.embedding.size(), 7u);
}

TEST(Weights, ShapeErrors) {
    std::string sixRows = kMinimal;
    sixRows.replace(sixRows.find("[1,0],[0,1],[1,1],[0,0]"), 6, "");
    EXPECT_THROW(parseWeights(sixRows), Error);

    std::string badVersion = kMinimal;
    badVersion.replace(badVersion.find("\"version\":1"), 11, "\"version\":2");
    EXPECT_THROW(parseWeights(badVersion), Error);

    std::string noHead = kMinimal;
    noHead = noHead.substr(0, noHead.find(",\n  \"head\"")) + "}";
    EXPECT_THROW(parseWeights(noHead), Error);

    std::string badHead = kMinimal;
    badHead.replace(badHead.rfind("\"b\":[0,0]"), 9, "\"b\":[0,0,0]");
    EXPECT_THROW(parseWeights(badHead), Error);

    std::string badTask = kMinimal;
    badTask.replace(badTask.find("\"task\":1"), 8, "\"task\":4");
    EXPECT_THROW(parseWeights(badTask), Error);

    EXPECT_THROW(parseWeights("not json"), Error);
    EXPECT_THROW(loadWeights("/nonexistent/weights.json"), Error);
}

TEST(Weights, Task3NeedsLimit) {
    ModelWeights w = ModelWeights::random(3, 3, 1, 4, 9);
    std::string text = weightsToJson(w);
    EXPECT_NE(text.find("\"n_limit\":4"), std::string::npos);
    EXPECT_EQ(parseWeights(text).nLimit, 4u);
    w.nLimit = 0;
    EXPECT_THROW(w.validate(), Error);
}

TEST(Weights, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "weq_test_weights.json";
    for (int task = 1; task <= 3; ++task) {
        ModelWeights w = ModelWeights::random(task, 4, 2, 3, 77);
        saveWeights(w, path.string());
        ModelWeights v = loadWeights(path.string());
        EXPECT_EQ(v.embedding, w.embedding);
        EXPECT_EQ(v.head.layers.size(), w.head.layers.size());
        auto graphs = fig2Graphs();
        EXPECT_EQ(scoreConjuncts(graphs, v, task), scoreConjuncts(graphs, w, task));
    }
    std::filesystem::remove(path);
}

TEST(Embed, ZeroWeightsGiveZero) {
    ModelWeights w = zeroWeights(1, 4, 2);
    for (const auto& g : fig2Graphs())
        EXPECT_EQ(embedGraph(g, w), Vector(4, 0.0));
}

TEST(Embed, SingleNode) {
    ModelWeights w = ModelWeights::random(1, 3, 1, 0, 5);
    EquationGraph g{{0}, {}, 0};
    Vector expected = w.roundMlps[0].forward(w.embedding[0]);
    for (double& x : expected)
        x = std::max(0.0, x);
    expectNear(embedGraph(g, w), expected, 1e-12);
}

TEST(Embed, MatchesDenseOracle) {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 100; ++i) {
        const std::size_t m = 1 + i % 4;
        const std::size_t rounds = 1 + i % 3;
        ModelWeights w = ModelWeights::random(1, m, rounds, 0, 1000 + i);
        EquationGraph g = oracle::randomGraph(rng, 1 + i % 6);
        expectNear(embedGraph(g, w), oracle::denseEmbed(g, w));
    }
}

TEST(Embed, RelabelInvariant) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        ModelWeights w = ModelWeights::random(1, 3, 2, 0, i);
        EquationGraph g = oracle::randomGraph(rng, 2 + i % 10);
        std::vector<std::uint32_t> perm(g.nodes.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        EXPECT_EQ(embedGraph(g, w), embedGraph(oracle::relabel(g, perm), w));
    }
}

TEST(Embed, CacheReturnsSameVector) {
    ModelWeights w = ModelWeights::random(1, 3, 2, 0, 3);
    EmbeddingCache cache;
    auto graphs = fig2Graphs();
    Vector a = embedGraph(graphs[0], w, &cache);
    EXPECT_EQ(cache.size(), 1u);
    Vector b = embedGraph(graphs[0], w, &cache);
    EXPECT_EQ(a, b);
    EXPECT_EQ(cache.hits(), 1u);
    EXPECT_EQ(a, embedGraph(graphs[0], w));
}

TEST(Score, Task1ZeroHeadIsHalf) {
    ModelWeights w = ModelWeights::random(1, 3, 2, 0, 4);
    for (auto& layer : w.head.layers) {
        for (auto& r : layer.w)
            std::fill(r.begin(), r.end(), 0.0);
        std::fill(layer.b.begin(), layer.b.end(), 0.0);
    }
    for (double s : scoreConjuncts(fig2Graphs(), w, 1))
        EXPECT_DOUBLE_EQ(s, 0.5);
}

TEST(Score, AllTasksMatchDenseOracle) {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 60; ++i) {
        const int task = 1 + i % 3;
        const std::size_t count = 1 + i % 5;
        ModelWeights w = ModelWeights::random(task, 2 + i % 3, 1 + i % 2, 3, 500 + i);
        std::vector<EquationGraph> graphs;
        for (std::size_t k = 0; k < count; ++k)
            graphs.push_back(oracle::randomGraph(rng, 1 + (k * 7 + i) % 6));
        std::vector<double> got = scoreConjuncts(graphs, w, task);
        expectNear(got, oracle::denseScores(graphs, w));
        for (double s : got) {
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 1.0);
        }
    }
}

TEST(Score, Task3PaddingAndTrimming) {
    ModelWeights w = ModelWeights::random(3, 3, 2, 5, 21);
    auto graphs = fig2Graphs();
    graphs.push_back(EquationGraph{{0}, {}, 0});
    std::vector<double> s = scoreConjuncts(graphs, w, 3);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 1.0, 1e-12);
    for (double x : s)
        EXPECT_GT(x, 0.0);

    ModelWeights small = ModelWeights::random(3, 3, 2, 2, 21);
    std::vector<double> t = scoreConjuncts(graphs, small, 3);
    // Only two slots: the 6-term equation is the longest and gets trimmed.
    EXPECT_EQ(t[1], 0.0);
    EXPECT_NEAR(t[0] + t[2], 1.0, 1e-12);
}

TEST(Score, Task1IgnoresUnrelatedConjunct) {
    ModelWeights w = ModelWeights::random(1, 4, 2, 0, 6);
    auto graphs = fig2Graphs();
    std::vector<double> one = scoreConjuncts(std::span(graphs).first(1), w, 1);
    std::vector<double> two = scoreConjuncts(graphs, w, 1);
    EXPECT_EQ(one[0], two[0]);
}

TEST(Score, TaskMismatchAndEmpty) {
    ModelWeights w = ModelWeights::random(2, 3, 1, 0, 1);
    auto graphs = fig2Graphs();
    EXPECT_THROW(scoreConjuncts(graphs, w, 1), Error);
    EXPECT_THROW(scoreConjuncts({}, w, 2), Error);
    EXPECT_THROW(GcnScorer(std::make_shared<ModelWeights>(w), 3), ConfigError);
}

TEST(Scorer, CacheOnOffIdentical) {
    auto w = std::make_shared<ModelWeights>(ModelWeights::random(2, 4, 2, 0, 12));
    GcnScorer cached(w, 2, true), plain(w, 2, false);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        Formula f = oracle::randomSmallFormula(rng, 5, 3, 2, 5);
        std::vector<std::size_t> idx(f.size());
        std::iota(idx.begin(), idx.end(), 0);
        EXPECT_EQ(cached.score(f, idx), plain.score(f, idx));
        EXPECT_EQ(cached.score(f, idx), plain.score(f, idx));
    }
    EXPECT_GT(cached.cache().hits(), 0u);
    EXPECT_EQ(plain.cache().size(), 0u);
}

TEST(Scorer, MatchesEncodedScoring) {
    auto w = std::make_shared<ModelWeights>(ModelWeights::random(3, 3, 2, 4, 13));
    GcnScorer scorer(w, 3);
    Formula f = parseProblem("Variables {X,Y}\nTerminals {a,b}\nEquation: X a = b Y\nEquation: Y Y = X\nEquation: a X b = X b a\n");
    std::vector<std::size_t> idx{0, 2};
    auto graphs = encodeFormula(f);
    std::vector<EquationGraph> picked{graphs[0], graphs[2]};
    expectNear(scorer.score(f, idx), oracle::denseScores(picked, *w), 1e-9);
}

TEST(CacheKey, DistinguishesCounts) {
    Formula f = parseProblem("Variables {X}\nTerminals {a}\nEquation: X a = a X\nEquation: X = a\n");
    Formula g = parseProblem("Variables {X}\nTerminals {a}\nEquation: X a = a X\nEquation: X = X\n");
    EXPECT_NE(equationKey(f[0], occurrenceCounts(f)), equationKey(g[0], occurrenceCounts(g)));
    Formula h = parseProblem("Variables {Y}\nTerminals {b}\nEquation: Y b = b Y\nEquation: Y = b\n");
    EXPECT_EQ(equationKey(f[0], occurrenceCounts(f)), equationKey(h[0], occurrenceCounts(h)));
}
