#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "weq/graph.h"
#include "weq/ranking.h"

namespace weq::gcn {

using Vector = std::vector<double>;

struct DenseLayer {
    std::vector<Vector> w;  // rows = outputs, columns = inputs
    Vector b;

    std::size_t inputs() const { return w.empty() ? 0 : w.front().size(); }
    std::size_t outputs() const { return w.size(); }
};

// Affine layers with ReLU between them; the last layer is linear.
struct Mlp {
    std::vector<DenseLayer> layers;

    std::size_t inputs() const { return layers.empty() ? 0 : layers.front().inputs(); }
    std::size_t outputs() const { return layers.empty() ? 0 : layers.back().outputs(); }
    Vector forward(const Vector& x) const;
};

struct ModelWeights {
    int version = 1;
    int task = 1;
    std::size_t m = 0;          // hidden width
    std::size_t rounds = 0;     // message-passing rounds T
    std::size_t nLimit = 0;     // task 3 only
    std::vector<Vector> embedding;  // kNodeTypeCount rows of width m
    std::vector<Mlp> roundMlps;     // T entries, m -> m
    Mlp head;                       // task 1: m->2, task 2: 2m->2, task 3: n*m -> n

    // Throws Error describing the first shape inconsistency.
    void validate() const;

    // Deterministic random initialization (for fixtures and smoke runs).
    static ModelWeights random(int task, std::size_t m, std::size_t rounds, std::size_t nLimit,
                               std::uint64_t seed, std::size_t hidden = 0);
};

ModelWeights loadWeights(const std::string& path);
ModelWeights parseWeights(const std::string& jsonText);
std::string weightsToJson(const ModelWeights& w);
void saveWeights(const ModelWeights& w, const std::string& path);

using CacheKey = std::vector<std::uint32_t>;

struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const noexcept;
};

// Readout vectors keyed by equation shape plus occurrence counts of its terms.
class EmbeddingCache {
public:
    const Vector* find(const CacheKey& key) const;
    const Vector& insert(CacheKey key, Vector value);
    std::size_t size() const { return map_.size(); }
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    void clear() { map_.clear(); }

private:
    std::unordered_map<CacheKey, Vector, CacheKeyHash> map_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

CacheKey equationKey(const WordEquation& e, const OccurrenceCounts& counts);
CacheKey graphKey(const EquationGraph& g);

// Mean readout of the node vectors after w.rounds GCN rounds.
Vector embedGraph(const EquationGraph& g, const ModelWeights& w, EmbeddingCache* cache = nullptr);

// Scores from precomputed readouts; `lengths` are the equation lengths (task 3 trimming).
std::vector<double> scoreEmbeddings(std::span<const Vector> embeddings,
                                    std::span<const std::size_t> lengths, const ModelWeights& w,
                                    int task);

std::vector<double> scoreConjuncts(std::span<const EquationGraph> graphs, const ModelWeights& w,
                                   int task, EmbeddingCache* cache = nullptr);

// Ranking adapter: encodes the selected conjuncts with whole-formula occurrence
// counts and scores them. Owns the per-solve embedding cache.
class GcnScorer : public ConjunctScorer {
public:
    GcnScorer(std::shared_ptr<const ModelWeights> weights, int task, bool useCache = true);

    std::vector<double> score(const Formula& f, std::span<const std::size_t> indices) override;

    const EmbeddingCache& cache() const { return cache_; }

private:
    std::shared_ptr<const ModelWeights> weights_;
    int task_;
    bool useCache_;
    EmbeddingCache cache_;
};

}  // namespace weq::gcn
