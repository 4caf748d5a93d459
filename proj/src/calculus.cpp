#include "weq/calculus.h"

#include <algorithm>

namespace weq {

std::string toString(const RuleId& id) {
    std::string out;
    switch (id.rule) {
    case Rule::R1: out = "R1"; break;
    case Rule::R2: out = "R2"; break;
    case Rule::R3: out = "R3"; break;
    case Rule::R4: out = "R4"; break;
    case Rule::R4Empty: out = "R4'"; break;
    case Rule::R5: out = "R5"; break;
    case Rule::R6: out = "R6"; break;
    case Rule::R7: out = "R7"; break;
    case Rule::R8: out = "R8"; break;
    case Rule::R9: out = "R9"; break;
    }
    if (id.variant == RuleVariant::Suffix)
        out += "-suffix";
    if (id.orientation == RuleOrientation::Symmetric)
        out += "-sym";
    return out;
}

namespace {

using EquationPtr = Formula::EquationPtr;

Word tail(const Word& w) { return Word(w.begin() + 1, w.end()); }

Word prepend(Term t, const Word& w) {
    Word out;
    out.reserve(w.size() + 1);
    out.push_back(t);
    out.insert(out.end(), w.begin(), w.end());
    return out;
}

ChildPlan child(std::optional<WordEquation> residue, std::uint32_t nextId) {
    return ChildPlan{std::move(residue), {}, nextId};
}

ChildPlan child(std::optional<WordEquation> residue, Term x, Word value, std::uint32_t nextId) {
    return ChildPlan{std::move(residue), Substitution{{x, std::move(value)}}, nextId};
}

RulePlan terminal(Rule rule, Status status, RuleOrientation orientation = RuleOrientation::Direct) {
    RulePlan out;
    out.rule = RuleId{rule, RuleVariant::Prefix, orientation};
    out.terminal = status;
    return out;
}

// One side empty: R2, R3, R4, R4'.
RulePlan planEmptySide(const WordEquation& e, std::uint32_t next) {
    RulePlan out;
    if (e.lhs.empty() && e.rhs.empty()) {
        out.rule = RuleId{Rule::R2};
        out.children.push_back(child(std::nullopt, next));
        return out;
    }
    const bool symmetric = e.lhs.empty();
    const RuleOrientation orientation =
        symmetric ? RuleOrientation::Symmetric : RuleOrientation::Direct;
    const Word& full = symmetric ? e.rhs : e.lhs;
    if (full.front().isLetter())
        return terminal(Rule::R4Empty, Status::Unsat, orientation);

    Term x = full.front();
    if (full.size() == 1) {
        out.rule = RuleId{Rule::R4, RuleVariant::Prefix, orientation};
        out.children.push_back(child(std::nullopt, x, {}, next));
        return out;
    }
    WordEquation residue{symmetric ? Word{} : tail(full), symmetric ? tail(full) : Word{},
                         e.rankToken};
    out.rule = RuleId{Rule::R3, RuleVariant::Prefix, orientation};
    out.children.push_back(child(std::move(residue), x, {}, next));
    return out;
}

// Both sides non-empty, prefix orientation: R5-R9.
RulePlan planHeads(const WordEquation& e, std::uint32_t next) {
    Term l = e.lhs.front();
    Term r = e.rhs.front();
    Word u = tail(e.lhs);
    Word v = tail(e.rhs);
    RulePlan out;

    if (l.isLetter() && r.isLetter()) {
        if (l != r)
            return terminal(Rule::R6, Status::Unsat);
        out.rule = RuleId{Rule::R5};
        out.children.push_back(child(WordEquation{std::move(u), std::move(v), e.rankToken}, next));
        return out;
    }
    if (l.isVariable() && r.isVariable() && l == r) {
        out.rule = RuleId{Rule::R9};
        out.children.push_back(child(WordEquation{std::move(u), std::move(v), e.rankToken}, next));
        return out;
    }
    if (l.isVariable() != r.isVariable()) {
        // R7: the variable is empty, or it starts with the letter.
        const bool symmetric = r.isVariable();
        Term x = symmetric ? r : l;
        Term a = symmetric ? l : r;
        Term fresh = Term::variable(next);
        out.rule = RuleId{Rule::R7, RuleVariant::Prefix,
                          symmetric ? RuleOrientation::Symmetric : RuleOrientation::Direct};
        WordEquation first = symmetric ? WordEquation{e.lhs, v, e.rankToken}
                                       : WordEquation{u, e.rhs, e.rankToken};
        out.children.push_back(child(std::move(first), x, {}, next));
        WordEquation second = symmetric ? WordEquation{u, prepend(fresh, v), e.rankToken}
                                        : WordEquation{prepend(fresh, u), v, e.rankToken};
        out.children.push_back(child(std::move(second), x, Word{a, fresh}, next + 1));
        return out;
    }

    // R8: X u = Y v with X != Y.
    Term x = l;
    Term y = r;
    Term fresh = Term::variable(next);
    out.rule = RuleId{Rule::R8};
    out.children.push_back(
        child(WordEquation{prepend(fresh, u), v, e.rankToken}, x, Word{y, fresh}, next + 1));
    out.children.push_back(
        child(WordEquation{u, prepend(fresh, v), e.rankToken}, y, Word{x, fresh}, next + 1));
    out.children.push_back(child(WordEquation{u, v, e.rankToken}, x, Word{y}, next));
    return out;
}

Word reversed(const Word& w) { return Word(w.rbegin(), w.rend()); }

WordEquation mirror(const WordEquation& e) {
    return WordEquation{reversed(e.lhs), reversed(e.rhs), e.rankToken};
}

}  // namespace

RulePlan planRules(const Formula& f, const CalculusOptions& options) {
    if (f.empty()) {
        RulePlan out;
        out.rule = RuleId{Rule::R1};
        out.terminal = Status::Sat;
        return out;
    }
    const WordEquation& e = f[0];
    const std::uint32_t next = f.nextVariableId();
    if (e.lhs.empty() || e.rhs.empty())
        return planEmptySide(e, next);
    if (!options.suffixRules)
        return planHeads(e, next);

    // Word reversal is an anti-homomorphism, so the suffix rules are the prefix
    // rules on the mirrored equation, with residues and values mirrored back.
    RulePlan out = planHeads(mirror(e), next);
    out.rule.variant = RuleVariant::Suffix;
    for (auto& c : out.children) {
        if (c.residue)
            c.residue = mirror(*c.residue);
        Substitution back;
        for (const auto& [var, value] : c.substitution)
            back.set(var, reversed(value));
        c.substitution = std::move(back);
    }
    return out;
}

Formula buildChild(const Formula& f, const ChildPlan& plan) {
    std::vector<EquationPtr> eqs;
    eqs.reserve(f.size());
    if (plan.residue)
        eqs.push_back(std::make_shared<const WordEquation>(*plan.residue));
    for (std::size_t i = 1; i < f.size(); ++i)
        eqs.push_back(f.ptr(i));
    Formula out = f.withEquations(std::move(eqs), plan.nextId);
    for (const auto& [var, value] : plan.substitution)
        out = substituteVariable(out, var, value);
    return out;
}

BranchOutcome applyRules(const Formula& f, const CalculusOptions& options) {
    RulePlan plan = planRules(f, options);
    BranchOutcome out;
    out.rule = plan.rule;
    out.terminal = plan.terminal;
    for (auto& c : plan.children)
        out.children.push_back({buildChild(f, c), std::move(c.substitution)});
    return out;
}

std::pair<Formula, Status> simplifyAndCheck(const Formula& f) {
    std::vector<EquationPtr> kept;
    kept.reserve(f.size());
    for (const auto& e : f.equations()) {
        if (e->lhs == e->rhs)
            continue;
        bool lhsGround = true, lhsLetter = false;
        for (Term t : e->lhs) {
            lhsGround = lhsGround && t.isLetter();
            lhsLetter = lhsLetter || t.isLetter();
        }
        bool rhsGround = true, rhsLetter = false;
        for (Term t : e->rhs) {
            rhsGround = rhsGround && t.isLetter();
            rhsLetter = rhsLetter || t.isLetter();
        }
        if (lhsGround && rhsGround)
            return {f, Status::Unsat};
        if ((e->lhs.empty() && rhsLetter) || (e->rhs.empty() && lhsLetter))
            return {f, Status::Unsat};
        kept.push_back(e);
    }
    if (kept.empty())
        return {f.withEquations({}, f.nextVariableId()), Status::Sat};
    if (kept.size() == f.size())
        return {f, Status::Unknown};
    return {f.withEquations(std::move(kept), f.nextVariableId()), Status::Unknown};
}

}  // namespace weq
