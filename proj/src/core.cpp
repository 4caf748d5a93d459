#include "weq/core.h"

#include <algorithm>
#include <unordered_set>

namespace weq {

std::string_view toString(Status s) {
    switch (s) {
    case Status::Sat: return "SAT";
    case Status::Unsat: return "UNSAT";
    case Status::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

bool isLinear(const WordEquation& e) {
    std::unordered_set<Term, TermHash> seen;
    for (const Word* side : {&e.lhs, &e.rhs})
        for (Term t : *side)
            if (t.isVariable() && !seen.insert(t).second)
                return false;
    return true;
}

// ---------------------------------------------------------------------------
// SymbolTable

Term SymbolTable::addLetter(const std::string& name) {
    if (byName_.contains(name))
        throw Error("duplicate declaration of '" + name + "'");
    Term t = Term::letter(numLetters());
    letters_.push_back(name);
    byName_.emplace(name, t);
    return t;
}

Term SymbolTable::addVariable(const std::string& name) {
    if (byName_.contains(name))
        throw Error("duplicate declaration of '" + name + "'");
    Term t = Term::variable(numVariables());
    variables_.push_back(name);
    byName_.emplace(name, t);
    return t;
}

std::optional<Term> SymbolTable::find(std::string_view name) const {
    auto it = byName_.find(std::string(name));
    if (it == byName_.end())
        return std::nullopt;
    return it->second;
}

std::string SymbolTable::name(Term t) const {
    if (t.isLetter()) {
        if (t.id() < letters_.size())
            return letters_[t.id()];
        return "_c" + std::to_string(t.id());
    }
    if (t.id() < variables_.size())
        return variables_[t.id()];
    return "_v" + std::to_string(t.id());
}

// ---------------------------------------------------------------------------
// Formula

Formula::Formula(SymbolTablePtr symbols, std::vector<EquationPtr> equations,
                 std::uint32_t nextVariableId)
    : symbols_(std::move(symbols)), equations_(std::move(equations)),
      nextVariableId_(std::max(nextVariableId, symbols_->numVariables())) {}

Formula Formula::fromEquations(SymbolTablePtr symbols, std::vector<WordEquation> equations) {
    std::uint32_t next = symbols->numVariables();
    std::vector<EquationPtr> ptrs;
    ptrs.reserve(equations.size());
    for (auto& e : equations) {
        for (const Word* side : {&e.lhs, &e.rhs})
            for (Term t : *side)
                if (t.isVariable())
                    next = std::max(next, t.id() + 1);
        ptrs.push_back(std::make_shared<const WordEquation>(std::move(e)));
    }
    return Formula(std::move(symbols), std::move(ptrs), next);
}

Formula Formula::withEquations(std::vector<EquationPtr> equations,
                               std::uint32_t nextVariableId) const {
    return Formula(symbols_, std::move(equations), nextVariableId);
}

Formula Formula::subset(std::span<const std::size_t> indices) const {
    std::vector<EquationPtr> eqs;
    eqs.reserve(indices.size());
    for (std::size_t i : indices)
        eqs.push_back(equations_.at(i));
    return withEquations(std::move(eqs), nextVariableId_);
}

Formula Formula::permuted(std::span<const std::size_t> order) const {
    return subset(order);
}

std::vector<Term> Formula::occurringVariables() const {
    std::vector<Term> vars;
    for (const auto& e : equations_)
        for (const Word* side : {&e->lhs, &e->rhs})
            for (Term t : *side)
                if (t.isVariable())
                    vars.push_back(t);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

std::string Formula::toString() const {
    if (equations_.empty())
        return "true";
    std::string out;
    for (std::size_t i = 0; i < equations_.size(); ++i) {
        if (i)
            out += " && ";
        out += equationToString(*equations_[i], *symbols_);
    }
    return out;
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.size() != b.size() || !(a.symbols() == b.symbols()))
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i]))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Substitution

void Substitution::set(Term variable, Word value) {
    if (!variable.isVariable())
        throw Error("substitution key must be a variable");
    map_[variable] = std::move(value);
}

const Word* Substitution::find(Term variable) const {
    auto it = map_.find(variable);
    return it == map_.end() ? nullptr : &it->second;
}

Word Substitution::apply(const Word& w) const {
    if (map_.empty())
        return w;
    Word out;
    out.reserve(w.size());
    for (Term t : w) {
        if (const Word* v = t.isVariable() ? find(t) : nullptr)
            out.insert(out.end(), v->begin(), v->end());
        else
            out.push_back(t);
    }
    return out;
}

WordEquation Substitution::apply(const WordEquation& e) const {
    return WordEquation{apply(e.lhs), apply(e.rhs), e.rankToken};
}

namespace {

bool mentionsAny(const WordEquation& e, const Substitution& s) {
    for (const Word* side : {&e.lhs, &e.rhs})
        for (Term t : *side)
            if (t.isVariable() && s.find(t))
                return true;
    return false;
}

bool mentions(const WordEquation& e, Term v) {
    return std::find(e.lhs.begin(), e.lhs.end(), v) != e.lhs.end() ||
           std::find(e.rhs.begin(), e.rhs.end(), v) != e.rhs.end();
}

void replaceInto(Word& out, const Word& in, Term variable, const Word& value) {
    const auto hits = static_cast<std::size_t>(std::count(in.begin(), in.end(), variable));
    out.reserve(in.size() + hits * value.size());
    for (Term t : in) {
        if (t == variable)
            out.insert(out.end(), value.begin(), value.end());
        else
            out.push_back(t);
    }
}

}  // namespace

Formula applySubstitution(const Formula& f, const Substitution& s) {
    if (s.empty())
        return f;
    std::uint32_t next = f.nextVariableId();
    for (const auto& [var, value] : s)
        for (Term t : value)
            if (t.isVariable())
                next = std::max(next, t.id() + 1);
    std::vector<Formula::EquationPtr> eqs;
    eqs.reserve(f.size());
    for (const auto& e : f.equations()) {
        if (mentionsAny(*e, s))
            eqs.push_back(std::make_shared<const WordEquation>(s.apply(*e)));
        else
            eqs.push_back(e);
    }
    return f.withEquations(std::move(eqs), next);
}

Formula substituteVariable(const Formula& f, Term variable, const Word& value) {
    std::uint32_t next = f.nextVariableId();
    for (Term t : value)
        if (t.isVariable())
            next = std::max(next, t.id() + 1);
    std::vector<Formula::EquationPtr> eqs;
    eqs.reserve(f.size());
    for (const auto& e : f.equations()) {
        if (!mentions(*e, variable)) {
            eqs.push_back(e);
            continue;
        }
        auto fresh = std::make_shared<WordEquation>();
        fresh->rankToken = e->rankToken;
        replaceInto(fresh->lhs, e->lhs, variable, value);
        replaceInto(fresh->rhs, e->rhs, variable, value);
        eqs.push_back(std::move(fresh));
    }
    return f.withEquations(std::move(eqs), next);
}

bool checkWitness(const Formula& f, const Substitution& s) {
    for (Term v : f.occurringVariables()) {
        const Word* value = s.find(v);
        if (!value)
            throw Error("witness does not map variable " + f.symbols().name(v));
        for (Term t : *value)
            if (t.isVariable())
                throw Error("witness value of " + f.symbols().name(v) + " is not ground");
    }
    for (const auto& e : f.equations())
        if (s.apply(e->lhs) != s.apply(e->rhs))
            return false;
    return true;
}

std::string wordToString(const Word& w, const SymbolTable& symbols) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            out += ' ';
        out += symbols.name(w[i]);
    }
    return out;
}

std::string equationToString(const WordEquation& e, const SymbolTable& symbols) {
    std::string l = e.lhs.empty() ? "\"\"" : wordToString(e.lhs, symbols);
    std::string r = e.rhs.empty() ? "\"\"" : wordToString(e.rhs, symbols);
    return l + " = " + r;
}

}  // namespace weq
