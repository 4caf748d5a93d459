#include "weq/gcn.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "weq/json.h"
#include "weq/rng.h"

namespace weq::gcn {

namespace {

double relu(double x) { return x > 0.0 ? x : 0.0; }

// Sum of a multiset of values that does not depend on the order they arrive in.
double orderIndependentSum(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values)
        s += v;
    return s;
}

Vector affine(const DenseLayer& layer, const Vector& x) {
    Vector y(layer.b);
    for (std::size_t r = 0; r < layer.w.size(); ++r) {
        const Vector& row = layer.w[r];
        double acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c)
            acc += row[c] * x[c];
        y[r] += acc;
    }
    return y;
}

void softmaxInPlace(std::vector<double>& z) {
    if (z.empty())
        return;
    double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : z)
        v /= sum;
}

void checkMlp(const Mlp& mlp, std::size_t in, std::size_t out, const std::string& what) {
    if (mlp.layers.empty())
        throw Error(what + ": no layers");
    std::size_t expected = in;
    for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
        const DenseLayer& layer = mlp.layers[i];
        const std::string where = what + " layer " + std::to_string(i);
        if (layer.w.empty())
            throw Error(where + ": empty weight matrix");
        for (const Vector& row : layer.w)
            if (row.size() != expected)
                throw Error(where + ": expected " + std::to_string(expected) + " inputs, got " +
                            std::to_string(row.size()));
        if (layer.b.size() != layer.w.size())
            throw Error(where + ": bias has " + std::to_string(layer.b.size()) +
                        " entries for " + std::to_string(layer.w.size()) + " outputs");
        expected = layer.w.size();
    }
    if (expected != out)
        throw Error(what + ": expected " + std::to_string(out) + " outputs, got " +
                    std::to_string(expected));
}

DenseLayer randomLayer(std::size_t in, std::size_t out, std::mt19937_64& rng) {
    DenseLayer layer;
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    layer.w.assign(out, Vector(in));
    layer.b.assign(out, 0.0);
    for (auto& row : layer.w)
        for (double& v : row)
            v = (2.0 * uniformReal(rng) - 1.0) * scale;
    for (double& v : layer.b)
        v = (2.0 * uniformReal(rng) - 1.0) * scale;
    return layer;
}

Mlp randomMlp(std::size_t in, std::size_t hidden, std::size_t out, std::mt19937_64& rng) {
    Mlp mlp;
    mlp.layers.push_back(randomLayer(in, hidden, rng));
    mlp.layers.push_back(randomLayer(hidden, out, rng));
    return mlp;
}

std::size_t headInputs(const ModelWeights& w) {
    switch (w.task) {
    case 1: return w.m;
    case 2: return 2 * w.m;
    default: return w.nLimit * w.m;
    }
}

std::size_t headOutputs(const ModelWeights& w) { return w.task == 3 ? w.nLimit : 2; }

// --- JSON ------------------------------------------------------------------

Mlp mlpFromJson(const nlohmann::json& j) {
    Mlp mlp;
    for (const auto& lj : j.at("layers")) {
        DenseLayer layer;
        layer.w = lj.at("w").get<std::vector<Vector>>();
        layer.b = lj.at("b").get<Vector>();
        mlp.layers.push_back(std::move(layer));
    }
    return mlp;
}

nlohmann::ordered_json mlpToJson(const Mlp& mlp) {
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& layer : mlp.layers)
        layers.push_back({{"w", layer.w}, {"b", layer.b}});
    return {{"layers", std::move(layers)}};
}

}  // namespace

Vector Mlp::forward(const Vector& x) const {
    Vector h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        h = affine(layers[i], h);
        if (i + 1 < layers.size())
            for (double& v : h)
                v = relu(v);
    }
    return h;
}

void ModelWeights::validate() const {
    if (version != 1)
        throw Error("unsupported weight file version " + std::to_string(version));
    if (task < 1 || task > 3)
        throw Error("task must be 1, 2 or 3");
    if (m == 0)
        throw Error("hidden width m must be positive");
    if (task == 3 && nLimit == 0)
        throw Error("task 3 requires n_limit >= 1");
    if (embedding.size() != static_cast<std::size_t>(kNodeTypeCount))
        throw Error("embedding must have " + std::to_string(kNodeTypeCount) + " rows, got " +
                    std::to_string(embedding.size()));
    for (const Vector& row : embedding)
        if (row.size() != m)
            throw Error("embedding row width " + std::to_string(row.size()) + " != m");
    if (roundMlps.size() != rounds)
        throw Error("expected " + std::to_string(rounds) + " round MLPs, got " +
                    std::to_string(roundMlps.size()));
    for (std::size_t t = 0; t < roundMlps.size(); ++t)
        checkMlp(roundMlps[t], m, m, "round " + std::to_string(t + 1));
    checkMlp(head, headInputs(*this), headOutputs(*this), "head");
}

ModelWeights ModelWeights::random(int task, std::size_t m, std::size_t rounds,
                                  std::size_t nLimit, std::uint64_t seed, std::size_t hidden) {
    std::mt19937_64 rng(seed);
    if (hidden == 0)
        hidden = m;
    ModelWeights w;
    w.task = task;
    w.m = m;
    w.rounds = rounds;
    w.nLimit = task == 3 ? nLimit : 0;
    w.embedding.assign(kNodeTypeCount, Vector(m));
    for (auto& row : w.embedding)
        for (double& v : row)
            v = 2.0 * uniformReal(rng) - 1.0;
    for (std::size_t t = 0; t < rounds; ++t)
        w.roundMlps.push_back(randomMlp(m, hidden, m, rng));
    w.head = randomMlp(headInputs(w), hidden, headOutputs(w), rng);
    w.validate();
    return w;
}

ModelWeights parseWeights(const std::string& jsonText) {
    ModelWeights w;
    try {
        auto j = nlohmann::json::parse(jsonText);
        w.version = j.at("version").get<int>();
        if (w.version != 1)
            throw Error("unsupported weight file version " + std::to_string(w.version));
        w.task = j.at("task").get<int>();
        w.m = j.at("m").get<std::size_t>();
        w.rounds = j.at("T").get<std::size_t>();
        if (j.contains("n_limit") && !j.at("n_limit").is_null())
            w.nLimit = j.at("n_limit").get<std::size_t>();
        w.embedding = j.at("embedding").get<std::vector<Vector>>();
        for (const auto& r : j.at("rounds"))
            w.roundMlps.push_back(mlpFromJson(r));
        w.head = mlpFromJson(j.at("head"));
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed weight file: ") + ex.what());
    }
    w.validate();
    return w;
}

ModelWeights loadWeights(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read weight file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseWeights(buf.str());
}

std::string weightsToJson(const ModelWeights& w) {
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (const auto& mlp : w.roundMlps)
        rounds.push_back(mlpToJson(mlp));
    nlohmann::ordered_json j{{"version", w.version}, {"task", w.task}, {"m", w.m}, {"T", w.rounds}};
    if (w.task == 3)
        j["n_limit"] = w.nLimit;
    j["embedding"] = w.embedding;
    j["rounds"] = std::move(rounds);
    j["head"] = mlpToJson(w.head);
    return j.dump();
}

void saveWeights(const ModelWeights& w, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write weight file '" + path + "'");
    out << weightsToJson(w) << '\n';
}

// --- cache -----------------------------------------------------------------

std::size_t CacheKeyHash::operator()(const CacheKey& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ k.size();
    for (std::uint32_t v : k) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
}

const Vector* EmbeddingCache::find(const CacheKey& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) {
        ++misses_;
        return nullptr;
    }
    ++hits_;
    return &it->second;
}

const Vector& EmbeddingCache::insert(CacheKey key, Vector value) {
    return map_.insert_or_assign(std::move(key), std::move(value)).first->second;
}

CacheKey equationKey(const WordEquation& e, const OccurrenceCounts& counts) {
    // The graph is determined by the term pattern of the equation (terms up to
    // renaming) plus the occurrence count of each distinct term.
    CacheKey key;
    key.reserve(2 + 2 * e.length());
    key.push_back(static_cast<std::uint32_t>(e.lhs.size()));
    key.push_back(static_cast<std::uint32_t>(e.rhs.size()));
    std::vector<Term> distinct;
    for (const Word* side : {&e.lhs, &e.rhs}) {
        for (Term t : *side) {
            auto it = std::find(distinct.begin(), distinct.end(), t);
            auto local = static_cast<std::uint32_t>(it - distinct.begin());
            if (it == distinct.end())
                distinct.push_back(t);
            key.push_back((local << 1) | (t.isVariable() ? 1u : 0u));
        }
    }
    for (Term t : distinct) {
        auto it = counts.find(t);
        key.push_back(it == counts.end() ? 0u : static_cast<std::uint32_t>(it->second));
    }
    return key;
}

CacheKey graphKey(const EquationGraph& g) {
    CacheKey key;
    key.reserve(2 + g.nodes.size() + 2 * g.edges.size());
    key.push_back(static_cast<std::uint32_t>(g.nodes.size()));
    key.push_back(g.root);
    key.insert(key.end(), g.nodes.begin(), g.nodes.end());
    for (const auto& [s, d] : g.edges) {
        key.push_back(s);
        key.push_back(d);
    }
    return key;
}

// --- forward ---------------------------------------------------------------

Vector embedGraph(const EquationGraph& g, const ModelWeights& w, EmbeddingCache* cache) {
    CacheKey key;
    if (cache) {
        key = graphKey(g);
        if (const Vector* hit = cache->find(key))
            return *hit;
    }

    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::uint32_t>> closed(n);
    for (std::size_t v = 0; v < n; ++v)
        closed[v].push_back(static_cast<std::uint32_t>(v));
    for (const auto& [s, d] : g.edges) {
        if (s == d)
            continue;
        closed[s].push_back(d);
        closed[d].push_back(s);
    }
    for (auto& nb : closed) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    std::vector<Vector> h(n);
    for (std::size_t v = 0; v < n; ++v)
        h[v] = w.embedding.at(g.nodes[v]);

    std::vector<double> scratch;
    for (std::size_t t = 0; t < w.rounds; ++t) {
        std::vector<Vector> next(n);
        for (std::size_t v = 0; v < n; ++v) {
            Vector mean(w.m);
            for (std::size_t k = 0; k < w.m; ++k) {
                scratch.clear();
                for (std::uint32_t u : closed[v])
                    scratch.push_back(h[u][k]);
                mean[k] = orderIndependentSum(scratch) / static_cast<double>(closed[v].size());
            }
            Vector out = w.roundMlps[t].forward(mean);
            for (double& x : out)
                x = relu(x);
            next[v] = std::move(out);
        }
        h = std::move(next);
    }

    Vector readout(w.m, 0.0);
    if (n > 0) {
        for (std::size_t k = 0; k < w.m; ++k) {
            scratch.clear();
            for (std::size_t v = 0; v < n; ++v)
                scratch.push_back(h[v][k]);
            readout[k] = orderIndependentSum(scratch) / static_cast<double>(n);
        }
    }
    if (cache)
        return cache->insert(std::move(key), std::move(readout));
    return readout;
}

std::vector<double> scoreEmbeddings(std::span<const Vector> embeddings,
                                    std::span<const std::size_t> lengths, const ModelWeights& w,
                                    int task) {
    if (task != w.task)
        throw Error("weights were trained for task " + std::to_string(w.task) + ", not task " +
                    std::to_string(task));
    if (embeddings.empty())
        throw Error("nothing to score");
    const std::size_t n = embeddings.size();
    std::vector<double> scores(n, 0.0);

    if (task == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            Vector z = w.head.forward(embeddings[i]);
            softmaxInPlace(z);
            scores[i] = z[0];
        }
        return scores;
    }

    if (task == 2) {
        Vector global(w.m, 0.0);
        std::vector<double> scratch;
        for (std::size_t k = 0; k < w.m; ++k) {
            scratch.clear();
            for (const Vector& e : embeddings)
                scratch.push_back(e[k]);
            global[k] = orderIndependentSum(scratch) / static_cast<double>(n);
        }
        for (std::size_t i = 0; i < n; ++i) {
            Vector input(embeddings[i]);
            input.insert(input.end(), global.begin(), global.end());
            Vector z = w.head.forward(input);
            softmaxInPlace(z);
            scores[i] = z[0];
        }
        return scores;
    }

    // Task 3: shortest nLimit equations fill the fixed slots, the rest score 0.
    if (lengths.size() != n)
        throw Error("task 3 scoring needs one length per equation");
    std::vector<std::size_t> slots(n);
    std::iota(slots.begin(), slots.end(), 0);
    std::stable_sort(slots.begin(), slots.end(),
                     [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
    if (slots.size() > w.nLimit)
        slots.resize(w.nLimit);

    static const EquationGraph kPad{{0}, {}, 0};
    const Vector pad = embedGraph(kPad, w);
    Vector input;
    input.reserve(w.nLimit * w.m);
    for (std::size_t s = 0; s < w.nLimit; ++s) {
        const Vector& e = s < slots.size() ? embeddings[slots[s]] : pad;
        input.insert(input.end(), e.begin(), e.end());
    }
    Vector logits = w.head.forward(input);
    logits.resize(slots.size());  // pad slots are masked out of the softmax
    softmaxInPlace(logits);
    for (std::size_t s = 0; s < slots.size(); ++s)
        scores[slots[s]] = logits[s];
    return scores;
}

std::vector<double> scoreConjuncts(std::span<const EquationGraph> graphs, const ModelWeights& w,
                                   int task, EmbeddingCache* cache) {
    std::vector<Vector> embeddings;
    std::vector<std::size_t> lengths;
    embeddings.reserve(graphs.size());
    for (const auto& g : graphs) {
        embeddings.push_back(embedGraph(g, w, cache));
        lengths.push_back(g.termCount());
    }
    return scoreEmbeddings(embeddings, lengths, w, task);
}

GcnScorer::GcnScorer(std::shared_ptr<const ModelWeights> weights, int task, bool useCache)
    : weights_(std::move(weights)), task_(task), useCache_(useCache) {
    if (!weights_)
        throw ConfigError("GCN scorer needs weights");
    if (weights_->task != task_)
        throw ConfigError("model was trained for task " + std::to_string(weights_->task) +
                          " but task " + std::to_string(task_) + " was requested");
}

std::vector<double> GcnScorer::score(const Formula& f, std::span<const std::size_t> indices) {
    const OccurrenceCounts counts = occurrenceCounts(f);
    std::vector<Vector> embeddings;
    std::vector<std::size_t> lengths;
    embeddings.reserve(indices.size());
    for (std::size_t idx : indices) {
        const WordEquation& e = f[idx];
        lengths.push_back(e.length());
        if (useCache_) {
            CacheKey key = equationKey(e, counts);
            if (const Vector* hit = cache_.find(key)) {
                embeddings.push_back(*hit);
                continue;
            }
            embeddings.push_back(
                cache_.insert(std::move(key), embedGraph(encodeEquation(e, counts), *weights_)));
        } else {
            embeddings.push_back(embedGraph(encodeEquation(e, counts), *weights_));
        }
    }
    return scoreEmbeddings(embeddings, lengths, *weights_, task_);
}

}  // namespace weq::gcn
