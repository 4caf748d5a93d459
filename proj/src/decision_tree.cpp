#include <algorithm>

#include "weq/solver.h"

namespace weq {

std::uint32_t DecisionTree::add(TreeNode n) {
    if (n.parent < 0) {
        if (!nodes_.empty())
            throw Error("decision tree already has a root");
    } else if (static_cast<std::size_t>(n.parent) >= nodes_.size()) {
        throw Error("decision tree parent out of range");
    }
    auto id = static_cast<std::uint32_t>(nodes_.size());
    if (n.parent >= 0)
        nodes_[static_cast<std::size_t>(n.parent)].children.push_back(id);
    nodes_.push_back(std::move(n));
    return id;
}

std::uint32_t DecisionTree::addRank(std::int64_t parent, std::optional<Formula> snapshot,
                                    std::vector<std::size_t> order, Status status,
                                    Substitution substitution) {
    TreeNode n;
    n.kind = TreeNodeKind::Rank;
    n.parent = parent;
    n.status = status;
    if (snapshot && snapshots_ < kSnapshotCap) {
        n.snapshot = std::move(snapshot);
        ++snapshots_;
    }
    n.order = std::move(order);
    n.substitution = std::move(substitution);
    return add(std::move(n));
}

std::uint32_t DecisionTree::addBranch(std::int64_t parent, std::size_t choice, RuleId rule,
                                      Status status) {
    TreeNode n;
    n.kind = TreeNodeKind::Branch;
    n.parent = parent;
    n.status = status;
    n.choice = choice;
    n.rule = rule;
    return add(std::move(n));
}

std::uint32_t DecisionTree::addLeaf(std::int64_t parent, Status status,
                                    Substitution substitution) {
    TreeNode n;
    n.kind = TreeNodeKind::Leaf;
    n.parent = parent;
    n.status = status;
    n.substitution = std::move(substitution);
    return add(std::move(n));
}

void DecisionTree::computeSubtreeSizes() {
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        std::size_t s = 1;
        for (std::uint32_t c : nodes_[i].children)
            s += nodes_[c].subtreeSize;
        nodes_[i].subtreeSize = s;
    }
}

std::vector<std::uint32_t> DecisionTree::pathTo(std::uint32_t node) const {
    std::vector<std::uint32_t> path;
    for (std::int64_t cur = node; cur >= 0; cur = nodes_.at(static_cast<std::size_t>(cur)).parent)
        path.push_back(static_cast<std::uint32_t>(cur));
    std::reverse(path.begin(), path.end());
    return path;
}

Substitution reconstructWitness(const Formula& original, const DecisionTree& tree,
                                std::uint32_t leaf) {
    const TreeNode& last = tree.node(leaf);
    if (last.kind != TreeNodeKind::Leaf || last.status != Status::Sat)
        throw Error("witness path does not end in a SAT leaf");
    std::vector<Substitution> edges;
    for (std::uint32_t id : tree.pathTo(leaf)) {
        const TreeNode& n = tree.node(id);
        if (n.kind != TreeNodeKind::Branch && n.parent >= 0)
            edges.push_back(n.substitution);
    }
    return reconstructWitness(original, edges);
}

std::vector<RankPoint> shortestUnsatPath(const DecisionTree& tree) {
    if (tree.empty())
        throw Error("empty decision tree");
    const TreeNode& root = tree.root();
    if (root.kind != TreeNodeKind::Rank || root.status != Status::Unsat)
        throw Error("decision tree root is not an UNSAT rank node");
    if (!root.snapshot)
        throw Error("root rank node has no formula snapshot");

    std::optional<std::uint32_t> best;
    auto chosenLength = [&](std::uint32_t branch) {
        return (*root.snapshot)[tree.node(branch).choice].length();
    };
    for (std::uint32_t c : root.children) {
        const TreeNode& n = tree.node(c);
        if (n.kind != TreeNodeKind::Branch || n.status != Status::Unsat)
            continue;
        if (!best) {
            best = c;
            continue;
        }
        const TreeNode& b = tree.node(*best);
        auto key = [&](std::uint32_t id, const TreeNode& x) {
            return std::tuple(x.subtreeSize, chosenLength(id), x.choice);
        };
        if (key(c, n) < key(*best, b))
            best = c;
    }
    if (!best)
        throw Error("no UNSAT rank choice at the root");

    std::vector<RankPoint> points;
    points.push_back({*root.snapshot, tree.node(*best).choice});
    std::uint32_t branch = *best;
    while (true) {
        const TreeNode& b = tree.node(branch);
        if (b.children.empty())
            break;
        const TreeNode& next = tree.node(b.children.front());
        if (next.kind != TreeNodeKind::Rank || !next.snapshot || next.children.empty())
            break;
        const std::uint32_t nextBranch = next.children.front();
        points.push_back({*next.snapshot, tree.node(nextBranch).choice});
        branch = nextBranch;
    }
    return points;
}

}  // namespace weq
