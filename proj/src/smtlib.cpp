#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "weq/mus.h"

namespace weq {

namespace {

constexpr std::array<std::string_view, 24> kReserved = {
    "_",        "!",         "as",          "let",          "exists",    "forall",
    "match",    "par",       "assert",      "check-sat",    "declare-const", "declare-fun",
    "define-fun", "exit",    "get-model",   "set-logic",    "set-option", "push",
    "pop",      "String",    "str.++",      "NUMERAL",      "DECIMAL",   "STRING"};

bool isSimpleSymbolChar(unsigned char c) {
    if (std::isalnum(c))
        return true;
    return std::string_view("~!@$%^&*_-+=<>.?/").find(static_cast<char>(c)) !=
           std::string_view::npos;
}

std::string symbol(const std::string& name) {
    bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
    for (unsigned char c : name)
        simple = simple && isSimpleSymbolChar(c);
    if (simple && std::find(kReserved.begin(), kReserved.end(), name) == kReserved.end())
        return name;
    if (name.find('|') != std::string::npos || name.find('\\') != std::string::npos)
        throw Error("variable name '" + name + "' cannot be written as an SMT-LIB symbol");
    return "|" + name + "|";
}

// Decodes one UTF-8 code point; returns false on malformed input.
bool decodeSingle(const std::string& s, std::uint32_t& cp) {
    if (s.empty())
        return false;
    auto c0 = static_cast<unsigned char>(s[0]);
    std::size_t len = c0 < 0x80 ? 1 : (c0 >> 5) == 6 ? 2 : (c0 >> 4) == 14 ? 3 : (c0 >> 3) == 30 ? 4 : 0;
    if (len == 0 || s.size() != len)
        return false;
    cp = len == 1 ? c0 : len == 2 ? (c0 & 0x1f) : len == 3 ? (c0 & 0x0f) : (c0 & 0x07);
    for (std::size_t i = 1; i < len; ++i) {
        auto c = static_cast<unsigned char>(s[i]);
        if ((c >> 6) != 2)
            return false;
        cp = (cp << 6) | (c & 0x3f);
    }
    return true;
}

// Letters are atomic, so each one must become exactly one string character.
// Letters whose name is not a single code point get a private-use character.
std::uint32_t letterCodePoint(Term t, const SymbolTable& symbols) {
    std::uint32_t cp = 0;
    if (t.id() < symbols.numLetters() && decodeSingle(symbols.letterNames()[t.id()], cp) &&
        cp <= 0x2ffff)
        return cp;
    return 0xe000 + t.id();
}

void appendChar(std::string& out, std::uint32_t cp) {
    if (cp == '"') {
        out += "\"\"";
    } else if (cp >= 0x20 && cp <= 0x7e && cp != '\\') {
        out += static_cast<char>(cp);
    } else {
        char buf[16];
        std::snprintf(buf, sizeof buf, "\\u{%x}", cp);
        out += buf;
    }
}

std::string side(const Word& w, const SymbolTable& symbols) {
    if (w.empty())
        return "\"\"";
    std::vector<std::string> parts;
    std::string literal;
    bool inLiteral = false;
    for (Term t : w) {
        if (t.isLetter()) {
            if (!inLiteral)
                literal = "\"";
            inLiteral = true;
            appendChar(literal, letterCodePoint(t, symbols));
            continue;
        }
        if (inLiteral) {
            parts.push_back(literal + "\"");
            inLiteral = false;
        }
        parts.push_back(symbol(symbols.name(t)));
    }
    if (inLiteral)
        parts.push_back(literal + "\"");
    if (parts.size() == 1)
        return parts.front();
    std::string out = "(str.++";
    for (const auto& p : parts)
        out += " " + p;
    return out + ")";
}

}  // namespace

std::string emitSmtlib(const Formula& f) {
    const SymbolTable& symbols = f.symbols();
    std::vector<Term> vars;
    for (std::uint32_t i = 0; i < symbols.numVariables(); ++i)
        vars.push_back(Term::variable(i));
    for (Term v : f.occurringVariables())
        if (v.id() >= symbols.numVariables())
            vars.push_back(v);

    std::ostringstream out;
    out << "(set-logic QF_S)\n";
    for (Term v : vars)
        out << "(declare-const " << symbol(symbols.name(v)) << " String)\n";
    for (const auto& e : f.equations())
        out << "(assert (= " << side(e->lhs, symbols) << " " << side(e->rhs, symbols) << "))\n";
    out << "(check-sat)\n";
    return out.str();
}

}  // namespace weq
