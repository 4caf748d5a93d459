#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weq/core.h"

namespace weq {

enum class Rule : std::uint8_t {
    R1 = 1,  // no equations left: SAT
    R2,      // eps = eps is dropped
    R3,      // X u = eps: X -> eps
    R4,      // X = eps: X -> eps
    R4Empty, // letter-headed side against eps: UNSAT
    R5,      // equal leading letters are cancelled
    R6,      // distinct leading letters: UNSAT
    R7,      // variable against letter: X -> eps | X -> a X'
    R8,      // two distinct variables: X -> Y X' | Y -> X Y' | X -> Y
    R9,      // identical leading variables are cancelled
};

enum class RuleVariant : std::uint8_t { Prefix, Suffix };
enum class RuleOrientation : std::uint8_t { Direct, Symmetric };

struct RuleId {
    Rule rule = Rule::R1;
    RuleVariant variant = RuleVariant::Prefix;
    RuleOrientation orientation = RuleOrientation::Direct;

    friend bool operator==(const RuleId&, const RuleId&) = default;
};

std::string toString(const RuleId& id);

struct Branch {
    Formula formula;
    Substitution substitution;
};

// Result of one rule application on the leftmost equation: either a terminal
// status or the ordered list of child formulas.
struct BranchOutcome {
    RuleId rule;
    Status terminal = Status::Unknown;
    std::vector<Branch> children;

    bool isTerminal() const { return terminal != Status::Unknown; }
};

struct CalculusOptions {
    // Use the suffix variants of R5-R9 (operate on the last terms).
    bool suffixRules = false;
};

// A child described without building it: the residue replacing the leftmost
// equation (none when it is dropped) and the substitution applied afterwards.
struct ChildPlan {
    std::optional<WordEquation> residue;
    Substitution substitution;
    std::uint32_t nextId = 0;
};

struct RulePlan {
    RuleId rule;
    Status terminal = Status::Unknown;
    std::vector<ChildPlan> children;

    bool isTerminal() const { return terminal != Status::Unknown; }
};

RulePlan planRules(const Formula& f, const CalculusOptions& options = {});
Formula buildChild(const Formula& f, const ChildPlan& plan);

// Applies the first matching rule to f[0]. Substitutions are applied to the
// whole formula. Fresh variables take ids from f.nextVariableId().
BranchOutcome applyRules(const Formula& f, const CalculusOptions& options = {});

// Drops conjuncts with syntactically identical sides and detects trivially
// unsatisfiable ones (ground and unequal, or eps against a side with a letter).
std::pair<Formula, Status> simplifyAndCheck(const Formula& f);

}  // namespace weq
