#include <fstream>
#include <sstream>

#include "weq/core.h"

namespace weq {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column) {}

namespace {

bool isSpace(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool validIdentifier(std::string_view s) {
    if (s.empty() || s == "=")
        return false;
    for (char c : s)
        if (isSpace(c) || c == ',' || c == '{' || c == '}' || c == '\n')
            return false;
    return true;
}

struct Line {
    std::string_view text;
    std::size_t number;
};

// `Keyword {a, b, c}` -> names with their 1-based columns.
std::vector<std::pair<std::string, std::size_t>> parseDeclaration(const Line& line,
                                                                  std::string_view keyword) {
    std::string_view t = line.text;
    if (t.substr(0, keyword.size()) != keyword)
        throw ParseError(line.number, 1, "expected '" + std::string(keyword) + " {...}'");
    std::size_t pos = keyword.size();
    while (pos < t.size() && isSpace(t[pos]))
        ++pos;
    if (pos >= t.size() || t[pos] != '{')
        throw ParseError(line.number, pos + 1, "expected '{'");
    std::size_t close = t.find('}', pos);
    if (close == std::string_view::npos)
        throw ParseError(line.number, t.size() + 1, "expected '}'");
    for (std::size_t i = close + 1; i < t.size(); ++i)
        if (!isSpace(t[i]))
            throw ParseError(line.number, i + 1, "unexpected text after '}'");

    std::vector<std::pair<std::string, std::size_t>> names;
    std::string_view body = t.substr(pos + 1, close - pos - 1);
    bool blank = true;
    for (char c : body)
        blank = blank && isSpace(c);
    if (blank)
        return names;

    std::size_t start = 0;
    while (true) {
        std::size_t comma = body.find(',', start);
        std::size_t end = comma == std::string_view::npos ? body.size() : comma;
        std::size_t b = start, e = end;
        while (b < e && isSpace(body[b]))
            ++b;
        while (e > b && isSpace(body[e - 1]))
            --e;
        std::size_t column = pos + 2 + b;
        std::string_view item = body.substr(b, e - b);
        if (!validIdentifier(item))
            throw ParseError(line.number, column, "invalid identifier '" + std::string(item) + "'");
        names.emplace_back(std::string(item), column);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return names;
}

}  // namespace

Formula parseProblem(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        ++number;
        std::string_view raw = text.substr(start, end - start);
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);
        std::size_t first = 0;
        while (first < raw.size() && isSpace(raw[first]))
            ++first;
        if (first < raw.size() && raw[first] != '#')
            lines.push_back({raw, number});
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }

    if (lines.size() < 2)
        throw ParseError(number, 1, "expected 'Variables' and 'Terminals' declarations");

    auto symbols = std::make_shared<SymbolTable>();
    auto declare = [&](const Line& line, std::string_view keyword, bool letters) {
        for (auto& [name, column] : parseDeclaration(line, keyword)) {
            if (symbols->find(name))
                throw ParseError(line.number, column, "duplicate declaration of '" + name + "'");
            letters ? symbols->addLetter(name) : symbols->addVariable(name);
        }
    };
    declare(lines[0], "Variables", false);
    declare(lines[1], "Terminals", true);

    std::vector<WordEquation> equations;
    constexpr std::string_view kEquation = "Equation:";
    for (std::size_t li = 2; li < lines.size(); ++li) {
        const Line& line = lines[li];
        if (line.text.substr(0, kEquation.size()) != kEquation)
            throw ParseError(line.number, 1, "expected 'Equation:'");
        WordEquation eq;
        eq.rankToken = static_cast<std::uint32_t>(equations.size());
        bool seenEquals = false;
        std::string_view t = line.text;
        std::size_t pos = kEquation.size();
        while (pos < t.size()) {
            if (isSpace(t[pos])) {
                ++pos;
                continue;
            }
            std::size_t end = pos;
            while (end < t.size() && !isSpace(t[end]))
                ++end;
            std::string_view token = t.substr(pos, end - pos);
            if (token == "=") {
                if (seenEquals)
                    throw ParseError(line.number, pos + 1, "second '=' in equation");
                seenEquals = true;
            } else {
                auto term = symbols->find(token);
                if (!term)
                    throw ParseError(line.number, pos + 1,
                                     "undeclared symbol '" + std::string(token) + "'");
                (seenEquals ? eq.rhs : eq.lhs).push_back(*term);
            }
            pos = end;
        }
        if (!seenEquals)
            throw ParseError(line.number, t.size() + 1, "expected '='");
        equations.push_back(std::move(eq));
    }
    if (equations.empty())
        throw ParseError(lines.back().number + 1, 1, "expected at least one 'Equation:' line");

    return Formula::fromEquations(std::move(symbols), std::move(equations));
}

std::string serializeProblem(const Formula& f) {
    const SymbolTable& symbols = f.symbols();
    std::ostringstream out;
    out << "Variables {";
    bool first = true;
    for (const auto& name : symbols.variableNames()) {
        out << (first ? "" : ",") << name;
        first = false;
    }
    for (Term v : f.occurringVariables()) {
        if (v.id() < symbols.numVariables())
            continue;
        out << (first ? "" : ",") << symbols.name(v);
        first = false;
    }
    out << "}\nTerminals {";
    first = true;
    for (const auto& name : symbols.letterNames()) {
        out << (first ? "" : ",") << name;
        first = false;
    }
    out << "}\n";
    for (const auto& e : f.equations()) {
        std::string line = "Equation: " + wordToString(e->lhs, symbols) + " = " +
                           wordToString(e->rhs, symbols);
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out << line << '\n';
    }
    return out.str();
}

Formula readProblemFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseProblem(buf.str());
}

}  // namespace weq
