#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "weq/mus.h"

namespace weq {

InternalOracle::InternalOracle(SolveConfig cfg, std::string name)
    : cfg_(std::move(cfg)), name_(std::move(name)) {
    cfg_.recordTree = false;
    cfg_.exploreRootChoices = false;
    cfg_.validate();
}

OracleAnswer InternalOracle::check(const Formula& f) const {
    SolveResult r = splitEquations(f, cfg_);
    return {r.status, r.elapsed};
}

OraclePtr selectFastest(const Formula& f, std::span<const OraclePtr> oracles) {
    OraclePtr best;
    double bestTime = 0.0;
    for (const auto& o : oracles) {
        OracleAnswer a = o->check(f);
        if (a.status == Status::Unsat && (!best || a.seconds < bestTime)) {
            best = o;
            bestTime = a.seconds;
        }
    }
    return best;
}

namespace {

// Advances `c` to the next k-combination of {0..n-1} in lexicographic order.
bool nextCombination(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j)
                c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::vector<OracleAnswer> checkBatch(const Formula& f,
                                     const std::vector<std::vector<std::size_t>>& batch,
                                     const SolverOracle& oracle, unsigned workers) {
    std::vector<OracleAnswer> answers(batch.size());
    if (workers <= 1 || batch.size() <= 1) {
        for (std::size_t i = 0; i < batch.size(); ++i)
            answers[i] = oracle.check(f.subset(batch[i]));
        return answers;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(batch.size()));
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < batch.size();) {
                try {
                    answers[i] = oracle.check(f.subset(batch[i]));
                } catch (...) {
                    std::lock_guard lock(failureMutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return answers;
}

}  // namespace

std::optional<MusResult> findMus(const Formula& f, const SolverOracle& oracle,
                                 const MusOptions& options) {
    if (f.empty() || options.budget == 0)
        return std::nullopt;
    MusResult result;
    OracleAnswer whole = oracle.check(f);
    ++result.oracleCalls;
    result.perSubsetTimes.push_back(whole.seconds);
    if (whole.status != Status::Unsat)
        return std::nullopt;

    const std::size_t n = f.size();
    const std::size_t batchSize = options.workers <= 1 ? 1 : std::size_t{options.workers} * 4;
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::size_t> comb(k);
        std::iota(comb.begin(), comb.end(), 0);
        bool more = true;
        while (more) {
            std::vector<std::vector<std::size_t>> batch;
            while (more && batch.size() < batchSize &&
                   result.oracleCalls + batch.size() < options.budget) {
                batch.push_back(comb);
                more = nextCombination(comb, n);
            }
            if (batch.empty())
                return std::nullopt;  // budget exhausted
            std::vector<OracleAnswer> answers = checkBatch(f, batch, oracle, options.workers);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                ++result.oracleCalls;
                result.perSubsetTimes.push_back(answers[i].seconds);
                if (answers[i].status == Status::Unknown)
                    ++result.unknownSubsets;
                if (answers[i].status == Status::Unsat) {
                    result.subset = batch[i];
                    return result;
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace weq
