#include "weq/graph.h"

#include <algorithm>

#include "weq/json.h"

namespace weq {

std::size_t EquationGraph::termCount() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](std::uint8_t t) {
        return t == static_cast<std::uint8_t>(NodeType::Letter) ||
               t == static_cast<std::uint8_t>(NodeType::Variable);
    }));
}

OccurrenceCounts occurrenceCounts(const Formula& f) {
    OccurrenceCounts counts;
    for (const auto& e : f.equations())
        for (const Word* side : {&e->lhs, &e->rhs})
            for (Term t : *side)
                ++counts[t];
    return counts;
}

std::vector<int> binaryDigits(std::size_t n) {
    std::vector<int> bits;
    while (n) {
        bits.push_back(static_cast<int>(n & 1u));
        n >>= 1;
    }
    std::reverse(bits.begin(), bits.end());
    return bits;
}

EquationGraph encodeEquation(const WordEquation& e, const OccurrenceCounts& counts) {
    EquationGraph g;
    g.root = 0;
    g.nodes.reserve(1 + 3 * e.length());
    g.nodes.push_back(static_cast<std::uint8_t>(NodeType::Equals));

    // Term nodes in first-occurrence order of distinct terms.
    std::vector<Term> distinct;
    std::vector<std::vector<std::uint32_t>> occurrences;
    auto addSide = [&](const Word& side) {
        std::uint32_t prev = 0;
        for (std::size_t i = 0; i < side.size(); ++i) {
            Term t = side[i];
            auto id = static_cast<std::uint32_t>(g.nodes.size());
            g.nodes.push_back(static_cast<std::uint8_t>(t.isLetter() ? NodeType::Letter
                                                                     : NodeType::Variable));
            g.edges.emplace_back(i == 0 ? g.root : prev, id);
            prev = id;
            auto it = std::find(distinct.begin(), distinct.end(), t);
            if (it == distinct.end()) {
                distinct.push_back(t);
                occurrences.push_back({id});
            } else {
                occurrences[static_cast<std::size_t>(it - distinct.begin())].push_back(id);
            }
        }
    };
    addSide(e.lhs);
    addSide(e.rhs);

    for (std::size_t k = 0; k < distinct.size(); ++k) {
        Term t = distinct[k];
        auto it = counts.find(t);
        if (it == counts.end() || it->second == 0)
            throw Error("no occurrence count for term " + std::to_string(t.raw()));
        const NodeType zero = t.isLetter() ? NodeType::LetterBit0 : NodeType::VariableBit0;
        const NodeType one = t.isLetter() ? NodeType::LetterBit1 : NodeType::VariableBit1;
        std::uint32_t head = 0, prev = 0;
        bool first = true;
        for (int bit : binaryDigits(it->second)) {
            auto id = static_cast<std::uint32_t>(g.nodes.size());
            g.nodes.push_back(static_cast<std::uint8_t>(bit ? one : zero));
            if (first)
                head = id;
            else
                g.edges.emplace_back(prev, id);
            prev = id;
            first = false;
        }
        for (std::uint32_t occ : occurrences[k])
            g.edges.emplace_back(head, occ);
    }
    return g;
}

std::vector<EquationGraph> encodeFormula(const Formula& f) {
    OccurrenceCounts counts = occurrenceCounts(f);
    std::vector<EquationGraph> graphs;
    graphs.reserve(f.size());
    for (const auto& e : f.equations())
        graphs.push_back(encodeEquation(*e, counts));
    return graphs;
}

void to_json(nlohmann::ordered_json& j, const EquationGraph& g) {
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& [s, d] : g.edges)
        edges.push_back({s, d});
    j = nlohmann::ordered_json{{"nodes", g.nodes}, {"edges", std::move(edges)}, {"root", g.root}};
}

void from_json(const nlohmann::json& j, EquationGraph& g) {
    g.nodes.clear();
    g.edges.clear();
    for (const auto& n : j.at("nodes")) {
        int code = n.get<int>();
        if (code < 0 || code >= kNodeTypeCount)
            throw Error("invalid node type code " + std::to_string(code));
        g.nodes.push_back(static_cast<std::uint8_t>(code));
    }
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw Error("edge must be a [src, dst] pair");
        auto s = e[0].get<std::uint32_t>();
        auto d = e[1].get<std::uint32_t>();
        if (s >= g.nodes.size() || d >= g.nodes.size())
            throw Error("edge references a missing node");
        g.edges.emplace_back(s, d);
    }
    g.root = j.at("root").get<std::uint32_t>();
    if (g.root >= g.nodes.size() || g.nodes[g.root] != 0)
        throw Error("graph root must be the '=' node");
    if (std::count(g.nodes.begin(), g.nodes.end(), std::uint8_t{0}) != 1)
        throw Error("graph must contain exactly one '=' node");
}

std::string graphToJson(const EquationGraph& g) {
    return nlohmann::ordered_json(g).dump();
}

EquationGraph graphFromJson(const std::string& text) {
    try {
        return nlohmann::json::parse(text).get<EquationGraph>();
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed graph JSON: ") + ex.what());
    }
}

}  // namespace weq
