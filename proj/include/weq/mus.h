#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weq/core.h"
#include "weq/solver.h"

namespace weq {

// SMT-LIB 2.6 QF_S script asserting every equation of f.
std::string emitSmtlib(const Formula& f);

struct OracleAnswer {
    Status status = Status::Unknown;
    double seconds = 0.0;
};

// Satisfiability oracle. check() must be safe to call from several threads.
class SolverOracle {
public:
    virtual ~SolverOracle() = default;
    virtual std::string name() const = 0;
    virtual OracleAnswer check(const Formula& f) const = 0;
};

class InternalOracle : public SolverOracle {
public:
    // cfg.scorer, if set, is shared between threads and must be thread-safe.
    explicit InternalOracle(SolveConfig cfg, std::string name = "internal");
    std::string name() const override { return name_; }
    OracleAnswer check(const Formula& f) const override;

private:
    SolveConfig cfg_;
    std::string name_;
};

// Runs `/bin/sh -c <command>` where every `{file}` in the template is replaced
// by the path of a temporary SMT-LIB file. The first non-empty output line
// decides: "sat", "unsat", anything else (or the timeout) is UNKNOWN.
OracleAnswer checkExternal(const Formula& f, const std::string& commandTemplate,
                           double timeoutSeconds);

class ExternalOracle : public SolverOracle {
public:
    ExternalOracle(std::string name, std::string commandTemplate, double timeoutSeconds);
    std::string name() const override { return name_; }
    OracleAnswer check(const Formula& f) const override;

private:
    std::string name_;
    std::string command_;
    double timeout_;
};

using OraclePtr = std::shared_ptr<const SolverOracle>;

// Runs every oracle on f and returns the fastest one answering UNSAT, or null.
OraclePtr selectFastest(const Formula& f, std::span<const OraclePtr> oracles);

struct MusOptions {
    std::uint64_t budget = 1u << 16;  // oracle calls, including the full-formula check
    unsigned workers = 1;
};

struct MusResult {
    std::vector<std::size_t> subset;  // ascending conjunct indices
    std::uint64_t oracleCalls = 0;
    std::uint64_t unknownSubsets = 0;
    std::vector<double> perSubsetTimes;  // in enumeration order, full formula first
};

// First UNSAT subset in (cardinality, lexicographic) order. None if the whole
// formula is not UNSAT or the budget runs out.
std::optional<MusResult> findMus(const Formula& f, const SolverOracle& oracle,
                                 const MusOptions& options = {});

}  // namespace weq
