#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weq/graph.h"
#include "weq/mus.h"
#include "weq/solver.h"

namespace weq {

using Label = std::vector<int>;

struct LabeledInstance {
    std::vector<EquationGraph> graphs;
    Label label;

    friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

// 1 for the MUS members of minimal length, 0 elsewhere.
Label labelFromMus(const Formula& f, std::span<const std::size_t> mus);

struct PathLabel {
    Formula formula;
    Label label;
};

// One one-hot label per rank point on the shortest UNSAT path.
std::vector<PathLabel> labelFromPath(const DecisionTree& tree);

// Keeps only the first 1; none when there is no 1.
std::optional<Label> postProcess(Label label);

LabeledInstance makeInstance(const Formula& f, Label label);

std::string instanceToJson(const LabeledInstance& inst);
LabeledInstance instanceFromJson(const std::string& line);

// JSON-lines, one instance per line. Returns the number written.
std::size_t exportDataset(std::span<const LabeledInstance> instances, const std::string& path);
std::vector<LabeledInstance> importDataset(const std::string& path);

enum class Split { Train, Validation, Test };
std::string_view toString(Split s);

// Seeded uniform 80/10/10 assignment.
std::vector<Split> assignSplits(std::size_t count, std::uint64_t seed);

struct ManifestEntry {
    std::string problem;
    std::string source;  // "mus" or "path"
    Split split = Split::Train;
};

// JSON-lines: {"index":i,"problem":...,"source":...,"split":...}
void writeManifest(std::span<const ManifestEntry> entries, const std::string& path);

// MUS members first (shortest first), then the rest in their original order.
// Rank tokens are renumbered so that the baseline ranking keeps this order.
Formula reorderByMus(const Formula& f, std::span<const std::size_t> mus);

struct ExtractOptions {
    SolveConfig solve;
    std::vector<OraclePtr> oracles;  // candidates for MUS extraction
    MusOptions mus;
    bool onlyUnknown = true;         // skip problems the initial solve decides
    bool skipSingleConjunct = true;  // rank points with one conjunct carry no decision
};

struct ExtractOutcome {
    Status initial = Status::Unknown;
    std::optional<std::vector<std::size_t>> mus;
    std::string musOracle;
    Status guided = Status::Unknown;  // re-solve of the MUS-ordered formula
    std::vector<LabeledInstance> musInstances;
    std::vector<LabeledInstance> pathInstances;
};

// solve -> MUS -> reorder -> re-solve exploring root choices -> label.
ExtractOutcome extractTrainingData(const Formula& f, const ExtractOptions& options);

}  // namespace weq
