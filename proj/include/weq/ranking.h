#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "weq/core.h"

namespace weq {

enum class RankStrategy { RE1 = 1, RE2, RE3, RE4, RE5, RE6, RE7 };

std::string_view toString(RankStrategy s);
std::optional<RankStrategy> parseRankStrategy(std::string_view name);
bool requiresModel(RankStrategy s);

struct RankParams {
    double gnnProbability = 0.5;       // RE4
    std::uint64_t gnnPeriod = 5000;    // RE6
    std::uint64_t stagnationLimit = 1000;  // RE7
};

void validate(const RankParams& p);

// Scores a selection of conjuncts of a formula; higher means "process earlier".
// Occurrence information is taken from the whole formula.
class ConjunctScorer {
public:
    virtual ~ConjunctScorer() = default;
    virtual std::vector<double> score(const Formula& f, std::span<const std::size_t> indices) = 0;
};

// Per-solve policy state.
struct RankContext {
    explicit RankContext(std::uint64_t seed = 0) : rng(seed) {}

    std::uint64_t rankCalls = 0;
    std::uint64_t modelCalls = 0;
    bool modelInvokedOnce = false;          // RE5
    std::size_t lastFirstLength = 0;        // RE7
    std::uint64_t stagnation = 0;           // RE7
    std::mt19937_64 rng;
};

// 1: eps = eps; 2: exactly one side empty; 3: distinct leading letters or
// distinct trailing letters; 4: equal leading letters; 5: anything else.
int priorityOf(const WordEquation& e);

struct RankResult {
    Formula formula;
    // order[i] is the input index of the equation placed at position i.
    std::vector<std::size_t> order;
    bool usedModel = false;
};

// Stable reordering by (priority, length for priorities 1-4, rank token); the
// priority-5 block is ordered per strategy. When the block is reordered by a
// model or by shuffling, its rank tokens are restamped with the new order so
// that children inherit it.
RankResult rankEqs(const Formula& f, RankStrategy strategy, RankContext& ctx,
                   ConjunctScorer* scorer = nullptr, const RankParams& params = {});

}  // namespace weq
