#include "weq/ranking.h"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "weq/rng.h"

namespace weq {

std::string_view toString(RankStrategy s) {
    switch (s) {
    case RankStrategy::RE1: return "re1";
    case RankStrategy::RE2: return "re2";
    case RankStrategy::RE3: return "re3";
    case RankStrategy::RE4: return "re4";
    case RankStrategy::RE5: return "re5";
    case RankStrategy::RE6: return "re6";
    case RankStrategy::RE7: return "re7";
    }
    return "re1";
}

std::optional<RankStrategy> parseRankStrategy(std::string_view name) {
    std::string lower(name);
    for (char& c : lower)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (int i = 1; i <= 7; ++i) {
        auto s = static_cast<RankStrategy>(i);
        if (lower == toString(s))
            return s;
    }
    return std::nullopt;
}

bool requiresModel(RankStrategy s) {
    return s != RankStrategy::RE1 && s != RankStrategy::RE2;
}

void validate(const RankParams& p) {
    if (!(p.gnnProbability >= 0.0 && p.gnnProbability <= 1.0))
        throw ConfigError("RE4 model probability must lie in [0,1]");
    if (p.gnnPeriod == 0)
        throw ConfigError("RE6 period must be positive");
    if (p.stagnationLimit == 0)
        throw ConfigError("RE7 threshold must be positive");
}

int priorityOf(const WordEquation& e) {
    const Word& l = e.lhs;
    const Word& r = e.rhs;
    if (l.empty() && r.empty())
        return 1;
    if (l.empty() || r.empty())
        return 2;
    if (l.front().isLetter() && r.front().isLetter() && l.front() != r.front())
        return 3;
    if (l.back().isLetter() && r.back().isLetter() && l.back() != r.back())
        return 3;
    if (l.front().isLetter() && l.front() == r.front())
        return 4;
    return 5;
}

namespace {

void sortByScore(std::vector<std::size_t>& block, const Formula& f, ConjunctScorer& scorer) {
    std::vector<double> scores = scorer.score(f, block);
    if (scores.size() != block.size())
        throw Error("scorer returned " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(block.size()) + " equations");
    std::vector<std::size_t> pos(block.size());
    std::iota(pos.begin(), pos.end(), 0);
    std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b])
            return scores[a] > scores[b];
        return f[block[a]].rankToken < f[block[b]].rankToken;
    });
    std::vector<std::size_t> sorted;
    sorted.reserve(block.size());
    for (std::size_t p : pos)
        sorted.push_back(block[p]);
    block = std::move(sorted);
}

}  // namespace

RankResult rankEqs(const Formula& f, RankStrategy strategy, RankContext& ctx,
                   ConjunctScorer* scorer, const RankParams& params) {
    if (requiresModel(strategy) && !scorer)
        throw ConfigError(std::string("strategy ") + std::string(toString(strategy)) +
                          " requires a model");

    const std::size_t n = f.size();
    std::vector<int> prio(n);
    for (std::size_t i = 0; i < n; ++i)
        prio[i] = priorityOf(f[i]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (prio[a] != prio[b])
            return prio[a] < prio[b];
        if (prio[a] < 5 && f[a].length() != f[b].length())
            return f[a].length() < f[b].length();
        return f[a].rankToken < f[b].rankToken;
    });

    const std::uint64_t callIndex = ctx.rankCalls++;
    std::size_t blockStart = 0;
    while (blockStart < n && prio[order[blockStart]] < 5)
        ++blockStart;
    const std::size_t blockSize = n - blockStart;
    const bool multi = blockSize >= 2;

    enum class Action { Keep, Shuffle, Model } action = Action::Keep;
    switch (strategy) {
    case RankStrategy::RE1:
        break;
    case RankStrategy::RE2:
        if (multi)
            action = Action::Shuffle;
        break;
    case RankStrategy::RE3:
        if (multi)
            action = Action::Model;
        break;
    case RankStrategy::RE4:
        if (multi)
            action = uniformReal(ctx.rng) < params.gnnProbability ? Action::Model : Action::Shuffle;
        break;
    case RankStrategy::RE5:
        if (multi && !ctx.modelInvokedOnce) {
            action = Action::Model;
            ctx.modelInvokedOnce = true;
        }
        break;
    case RankStrategy::RE6:
        if (multi && callIndex % params.gnnPeriod == 0)
            action = Action::Model;
        break;
    case RankStrategy::RE7: {
        const std::size_t firstLength = n ? f[order[0]].length() : 0;
        if (callIndex > 0 && firstLength >= ctx.lastFirstLength)
            ++ctx.stagnation;
        else
            ctx.stagnation = 0;
        ctx.lastFirstLength = firstLength;
        if (multi && ctx.stagnation >= params.stagnationLimit) {
            action = Action::Model;
            ctx.stagnation = 0;
        }
        break;
    }
    }

    RankResult result;
    if (action != Action::Keep) {
        std::vector<std::size_t> block(order.begin() + blockStart, order.end());
        if (action == Action::Shuffle) {
            shuffleInPlace(block, ctx.rng);
        } else {
            sortByScore(block, f, *scorer);
            ++ctx.modelCalls;
            result.usedModel = true;
        }
        std::copy(block.begin(), block.end(), order.begin() + blockStart);
        if (strategy == RankStrategy::RE7 && blockStart == 0)
            ctx.lastFirstLength = f[order[0]].length();
    }

    std::vector<Formula::EquationPtr> eqs;
    eqs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        eqs.push_back(f.ptr(order[i]));

    if (action != Action::Keep) {
        std::vector<std::uint32_t> tokens;
        tokens.reserve(blockSize);
        for (std::size_t i = blockStart; i < n; ++i)
            tokens.push_back(eqs[i]->rankToken);
        std::sort(tokens.begin(), tokens.end());
        for (std::size_t i = blockStart; i < n; ++i) {
            std::uint32_t token = tokens[i - blockStart];
            if (eqs[i]->rankToken == token)
                continue;
            WordEquation copy = *eqs[i];
            copy.rankToken = token;
            eqs[i] = std::make_shared<const WordEquation>(std::move(copy));
        }
    }

    result.formula = f.withEquations(std::move(eqs), f.nextVariableId());
    result.order = std::move(order);
    return result;
}

}  // namespace weq
