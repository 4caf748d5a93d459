#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "weq/calculus.h"
#include "weq/core.h"
#include "weq/ranking.h"

namespace weq {

namespace gcn {
struct ModelWeights;
}

enum class TreeNodeKind : std::uint8_t { Rank, Branch, Leaf };

// Node of the recorded AND-OR tree.
//  Rank:   a formula on which ranking was performed (OR over rank choices).
//  Branch: one rule application on a chosen leftmost equation (AND over children).
//  Leaf:   a formula decided without a rule application, or a pruned one.
struct TreeNode {
    TreeNodeKind kind = TreeNodeKind::Leaf;
    Status status = Status::Unknown;
    std::int64_t parent = -1;
    std::vector<std::uint32_t> children;

    // Rank nodes: simplified formula before ranking (absent past the snapshot cap)
    // and the ranking permutation.
    std::optional<Formula> snapshot;
    std::vector<std::size_t> order;

    // Branch nodes: index into the parent's snapshot of the equation placed first.
    std::size_t choice = 0;
    RuleId rule;

    // Rank and Leaf nodes below a Branch: substitution on the incoming edge.
    Substitution substitution;

    std::size_t subtreeSize = 1;
};

class DecisionTree {
public:
    static constexpr std::size_t kSnapshotCap = 10000;

    bool empty() const { return nodes_.empty(); }
    std::size_t size() const { return nodes_.size(); }
    const TreeNode& node(std::uint32_t i) const { return nodes_.at(i); }
    TreeNode& node(std::uint32_t i) { return nodes_.at(i); }
    const TreeNode& root() const { return nodes_.at(0); }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    // Builders; parent < 0 creates the root (only allowed once).
    std::uint32_t addRank(std::int64_t parent, std::optional<Formula> snapshot,
                          std::vector<std::size_t> order, Status status = Status::Unknown,
                          Substitution substitution = {});
    std::uint32_t addBranch(std::int64_t parent, std::size_t choice, RuleId rule,
                            Status status = Status::Unknown);
    std::uint32_t addLeaf(std::int64_t parent, Status status, Substitution substitution = {});

    std::size_t snapshotCount() const { return snapshots_; }

    // Recomputes subtreeSize bottom-up (children always have larger ids).
    void computeSubtreeSizes();

    // Node ids from the root down to `node`.
    std::vector<std::uint32_t> pathTo(std::uint32_t node) const;

private:
    std::uint32_t add(TreeNode n);

    std::vector<TreeNode> nodes_;
    std::size_t snapshots_ = 0;
};

struct SolveConfig {
    RankStrategy strategy = RankStrategy::RE1;
    double timeoutSeconds = 300.0;
    std::optional<std::uint64_t> maxSplits;
    // Terms held by formulas on the search stack; past it the search stops as UNKNOWN.
    std::uint64_t maxHeldTerms = std::uint64_t{1} << 25;
    bool ancestorCycleCheck = true;
    bool recordTree = false;
    // Explore every rank choice at the root, each with its own budget. Needed
    // for shortest-path labeling; implies recordTree.
    bool exploreRootChoices = false;
    std::shared_ptr<const gcn::ModelWeights> model;
    // Overrides `model` for ranking (tests, custom heuristics).
    std::shared_ptr<ConjunctScorer> scorer;
    int taskId = 1;
    std::uint64_t randomSeed = 0;
    bool suffixRules = false;
    bool embeddingCache = true;
    RankParams rankParams;

    // Throws ConfigError.
    void validate() const;
};

struct SolveResult {
    Status status = Status::Unknown;
    std::uint64_t splits = 0;
    std::uint64_t rankCalls = 0;
    std::uint64_t gnnCalls = 0;
    double elapsed = 0.0;
    bool timedOut = false;
    bool budgetExhausted = false;
    bool memoryExhausted = false;
    std::optional<Substitution> witness;
    std::optional<DecisionTree> tree;
};

SolveResult splitEquations(const Formula& f, const SolveConfig& cfg = {});

// Composes edge substitutions in path order, keeps the variables of `original`
// and maps whatever remains in their values to eps.
Substitution reconstructWitness(const Formula& original, std::span<const Substitution> path);

// Same, following the tree from the root to `leaf`, which must be a SAT leaf.
Substitution reconstructWitness(const Formula& original, const DecisionTree& tree,
                                std::uint32_t leaf);

// Hash of a formula with variables renamed in first-occurrence order.
std::uint64_t canonicalHash(const Formula& f);

struct RankPoint {
    Formula formula;
    std::size_t chosen = 0;  // index into formula of the equation placed first
};

// Among the UNSAT rank choices at the root, the one with the smallest subtree
// (ties: shorter chosen equation, then lower index), followed down its leftmost
// spine of rank nodes. Throws Error unless the root is an UNSAT rank node.
std::vector<RankPoint> shortestUnsatPath(const DecisionTree& tree);

}  // namespace weq
