#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace weq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class Status { Sat, Unsat, Unknown };

std::string_view toString(Status s);

enum class TermKind : std::uint8_t { Letter = 0, Variable = 1 };

// A letter or a variable, packed into one word: low bit is the kind, the rest
// is the interned id. Letters and variables have independent id spaces.
class Term {
public:
    constexpr Term() = default;

    static constexpr Term letter(std::uint32_t id) { return Term((id << 1) | 0u); }
    static constexpr Term variable(std::uint32_t id) { return Term((id << 1) | 1u); }

    constexpr TermKind kind() const { return static_cast<TermKind>(bits_ & 1u); }
    constexpr bool isLetter() const { return (bits_ & 1u) == 0; }
    constexpr bool isVariable() const { return (bits_ & 1u) != 0; }
    constexpr std::uint32_t id() const { return bits_ >> 1; }
    constexpr std::uint32_t raw() const { return bits_; }

    friend constexpr auto operator<=>(Term, Term) = default;

private:
    constexpr explicit Term(std::uint32_t bits) : bits_(bits) {}
    std::uint32_t bits_ = 0;
};

struct TermHash {
    std::size_t operator()(Term t) const noexcept { return std::hash<std::uint32_t>{}(t.raw()); }
};

/// Concatenation of terms; the empty vector is the empty word.
using Word = std::vector<Term>;

struct WordEquation {
    Word lhs;
    Word rhs;
    std::uint32_t rankToken = 0;

    std::size_t length() const { return lhs.size() + rhs.size(); }
    bool trivial() const { return lhs == rhs; }

    friend bool operator==(const WordEquation&, const WordEquation&) = default;
};

bool isLinear(const WordEquation& e);

// Names of the letters and variables declared by a problem. Variables created
// during search (fresh ids beyond the declared range) are printed as `_v<id>`.
class SymbolTable {
public:
    Term addLetter(const std::string& name);
    Term addVariable(const std::string& name);

    std::optional<Term> find(std::string_view name) const;
    std::string name(Term t) const;

    std::uint32_t numLetters() const { return static_cast<std::uint32_t>(letters_.size()); }
    std::uint32_t numVariables() const { return static_cast<std::uint32_t>(variables_.size()); }
    const std::vector<std::string>& letterNames() const { return letters_; }
    const std::vector<std::string>& variableNames() const { return variables_; }

    friend bool operator==(const SymbolTable& a, const SymbolTable& b) {
        return a.letters_ == b.letters_ && a.variables_ == b.variables_;
    }

private:
    std::vector<std::string> letters_;
    std::vector<std::string> variables_;
    std::unordered_map<std::string, Term> byName_;
};

using SymbolTablePtr = std::shared_ptr<const SymbolTable>;

class Substitution;

// Ordered conjunction of word equations. Equations are shared between formulas
// derived from one another; a Formula is never mutated after construction.
class Formula {
public:
    using EquationPtr = std::shared_ptr<const WordEquation>;

    Formula() : symbols_(std::make_shared<SymbolTable>()) {}
    Formula(SymbolTablePtr symbols, std::vector<EquationPtr> equations,
            std::uint32_t nextVariableId);

    // Builds a formula from plain equations; rank tokens are kept as given.
    static Formula fromEquations(SymbolTablePtr symbols, std::vector<WordEquation> equations);

    std::size_t size() const { return equations_.size(); }
    bool empty() const { return equations_.empty(); }
    const WordEquation& operator[](std::size_t i) const { return *equations_[i]; }
    const EquationPtr& ptr(std::size_t i) const { return equations_[i]; }
    const std::vector<EquationPtr>& equations() const { return equations_; }

    const SymbolTable& symbols() const { return *symbols_; }
    const SymbolTablePtr& symbolsPtr() const { return symbols_; }

    // First variable id not used by the problem or by any variable introduced so far.
    std::uint32_t nextVariableId() const { return nextVariableId_; }

    Formula withEquations(std::vector<EquationPtr> equations,
                          std::uint32_t nextVariableId) const;
    Formula subset(std::span<const std::size_t> indices) const;
    Formula permuted(std::span<const std::size_t> order) const;

    // Variables occurring in some equation, ascending by id.
    std::vector<Term> occurringVariables() const;

    std::string toString() const;

    // Structural equality: same symbols and the same equation values in order.
    friend bool operator==(const Formula& a, const Formula& b);

private:
    SymbolTablePtr symbols_;
    std::vector<EquationPtr> equations_;
    std::uint32_t nextVariableId_ = 0;
};

class Substitution {
public:
    Substitution() = default;
    Substitution(std::initializer_list<std::pair<const Term, Word>> init) : map_(init) {}

    void set(Term variable, Word value);
    const Word* find(Term variable) const;
    bool empty() const { return map_.empty(); }
    std::size_t size() const { return map_.size(); }
    auto begin() const { return map_.begin(); }
    auto end() const { return map_.end(); }

    Word apply(const Word& w) const;
    WordEquation apply(const WordEquation& e) const;

    friend bool operator==(const Substitution&, const Substitution&) = default;

private:
    std::map<Term, Word> map_;
};

Formula applySubstitution(const Formula& f, const Substitution& s);

// Replaces one variable everywhere; equations not mentioning it are shared.
Formula substituteVariable(const Formula& f, Term variable, const Word& value);

// Throws Error if a variable of `f` is unmapped or mapped to a non-ground word.
bool checkWitness(const Formula& f, const Substitution& s);

std::string wordToString(const Word& w, const SymbolTable& symbols);
std::string equationToString(const WordEquation& e, const SymbolTable& symbols);

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

Formula parseProblem(std::string_view text);
std::string serializeProblem(const Formula& f);

Formula readProblemFile(const std::string& path);

}  // namespace weq
