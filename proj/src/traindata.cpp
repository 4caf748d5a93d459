#include "weq/traindata.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "weq/json.h"
#include "weq/rng.h"

namespace weq {

Label labelFromMus(const Formula& f, std::span<const std::size_t> mus) {
    Label label(f.size(), 0);
    std::size_t shortest = std::numeric_limits<std::size_t>::max();
    for (std::size_t i : mus)
        shortest = std::min(shortest, f[i].length());
    for (std::size_t i : mus)
        if (f[i].length() == shortest)
            label[i] = 1;
    return label;
}

std::vector<PathLabel> labelFromPath(const DecisionTree& tree) {
    std::vector<PathLabel> out;
    for (RankPoint& p : shortestUnsatPath(tree)) {
        Label label(p.formula.size(), 0);
        label.at(p.chosen) = 1;
        out.push_back({std::move(p.formula), std::move(label)});
    }
    return out;
}

std::optional<Label> postProcess(Label label) {
    auto first = std::find(label.begin(), label.end(), 1);
    if (first == label.end())
        return std::nullopt;
    std::fill(first + 1, label.end(), 0);
    return label;
}

LabeledInstance makeInstance(const Formula& f, Label label) {
    if (label.size() != f.size())
        throw Error("label length does not match the number of equations");
    return {encodeFormula(f), std::move(label)};
}

std::string instanceToJson(const LabeledInstance& inst) {
    nlohmann::ordered_json j{{"graphs", inst.graphs}, {"label", inst.label}};
    return j.dump();
}

LabeledInstance instanceFromJson(const std::string& line) {
    try {
        auto j = nlohmann::json::parse(line);
        LabeledInstance inst;
        inst.graphs = j.at("graphs").get<std::vector<EquationGraph>>();
        inst.label = j.at("label").get<Label>();
        if (inst.label.size() != inst.graphs.size())
            throw Error("label and graph counts differ");
        for (int y : inst.label)
            if (y != 0 && y != 1)
                throw Error("labels must be 0 or 1");
        return inst;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed dataset record: ") + ex.what());
    }
}

std::size_t exportDataset(std::span<const LabeledInstance> instances, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write dataset '" + path + "'");
    for (const auto& inst : instances)
        out << instanceToJson(inst) << '\n';
    out.flush();
    if (!out)
        throw Error("write to '" + path + "' failed");
    return instances.size();
}

std::vector<LabeledInstance> importDataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read dataset '" + path + "'");
    std::vector<LabeledInstance> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(instanceFromJson(line));
    return out;
}

std::string_view toString(Split s) {
    switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "valid";
    case Split::Test: return "test";
    }
    return "train";
}

std::vector<Split> assignSplits(std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    shuffleInPlace(idx, rng);
    const std::size_t train = count * 8 / 10;
    const std::size_t valid = count / 10;
    std::vector<Split> out(count, Split::Test);
    for (std::size_t k = 0; k < count; ++k)
        out[idx[k]] = k < train ? Split::Train : k < train + valid ? Split::Validation : Split::Test;
    return out;
}

void writeManifest(std::span<const ManifestEntry> entries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write manifest '" + path + "'");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        nlohmann::ordered_json j{{"index", i},
                         {"problem", entries[i].problem},
                         {"source", entries[i].source},
                         {"split", std::string(toString(entries[i].split))}};
        out << j.dump() << '\n';
    }
}

Formula reorderByMus(const Formula& f, std::span<const std::size_t> mus) {
    std::vector<std::size_t> inMus(mus.begin(), mus.end());
    std::stable_sort(inMus.begin(), inMus.end(),
                     [&](std::size_t a, std::size_t b) { return f[a].length() < f[b].length(); });
    std::vector<std::size_t> order = inMus;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::find(mus.begin(), mus.end(), i) == mus.end())
            order.push_back(i);
    std::vector<WordEquation> eqs;
    for (std::size_t k = 0; k < order.size(); ++k) {
        WordEquation e = f[order[k]];
        e.rankToken = static_cast<std::uint32_t>(k);
        eqs.push_back(std::move(e));
    }
    Formula out = Formula::fromEquations(f.symbolsPtr(), std::move(eqs));
    return out.withEquations(out.equations(), std::max(out.nextVariableId(), f.nextVariableId()));
}

ExtractOutcome extractTrainingData(const Formula& f, const ExtractOptions& options) {
    ExtractOutcome outcome;
    SolveConfig cfg = options.solve;
    cfg.recordTree = false;
    cfg.exploreRootChoices = false;
    outcome.initial = splitEquations(f, cfg).status;
    if (options.onlyUnknown && outcome.initial != Status::Unknown)
        return outcome;
    if (outcome.initial == Status::Sat)
        return outcome;

    OraclePtr oracle = selectFastest(f, options.oracles);
    if (!oracle)
        return outcome;
    outcome.musOracle = oracle->name();
    std::optional<MusResult> mus = findMus(f, *oracle, options.mus);
    if (!mus)
        return outcome;
    outcome.mus = mus->subset;

    if (f.size() > 1 || !options.skipSingleConjunct)
        if (auto label = postProcess(labelFromMus(f, mus->subset)))
            outcome.musInstances.push_back(makeInstance(f, std::move(*label)));

    Formula ordered = reorderByMus(f, mus->subset);
    cfg.exploreRootChoices = true;
    cfg.recordTree = true;
    SolveResult guided = splitEquations(ordered, cfg);
    outcome.guided = guided.status;
    if (guided.status != Status::Unsat || !guided.tree ||
        guided.tree->root().kind != TreeNodeKind::Rank)
        return outcome;
    for (PathLabel& p : labelFromPath(*guided.tree)) {
        if (p.formula.size() < 2 && options.skipSingleConjunct)
            continue;
        if (auto label = postProcess(std::move(p.label)))
            outcome.pathInstances.push_back(makeInstance(p.formula, std::move(*label)));
    }
    return outcome;
}

}  // namespace weq
