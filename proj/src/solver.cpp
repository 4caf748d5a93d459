#include "weq/solver.h"

#include <chrono>
#include <unordered_map>

#include "weq/gcn.h"

namespace weq {

void SolveConfig::validate() const {
    if (!(timeoutSeconds > 0.0))
        throw ConfigError("timeout must be positive");
    if (maxHeldTerms == 0)
        throw ConfigError("term limit must be positive");
    if (taskId < 1 || taskId > 3)
        throw ConfigError("task must be 1, 2 or 3");
    if (requiresModel(strategy) && !model && !scorer)
        throw ConfigError(std::string("strategy ") + std::string(toString(strategy)) +
                          " requires a model");
    if (model && !scorer && model->task != taskId)
        throw ConfigError("model was trained for task " + std::to_string(model->task) +
                          " but task " + std::to_string(taskId) + " was requested");
    weq::validate(rankParams);
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    return h ^ (h >> 29);
}

using Clock = std::chrono::steady_clock;

class Search {
public:
    Search(const Formula& original, const SolveConfig& cfg, SolveResult& result)
        : original_(original), cfg_(cfg), result_(result), ctx_(cfg.randomSeed) {
        calculus_.suffixRules = cfg.suffixRules;
        if (cfg.scorer)
            scorer_ = cfg.scorer.get();
        else if (cfg.model) {
            gcnScorer_ = std::make_unique<gcn::GcnScorer>(cfg.model, cfg.taskId, cfg.embeddingCache);
            scorer_ = gcnScorer_.get();
        }
        if (cfg.recordTree || cfg.exploreRootChoices)
            tree_.emplace();
    }

    Status run() {
        Status status = cfg_.exploreRootChoices ? exploreRoot() : solveFrom(original_);
        result_.rankCalls = ctx_.rankCalls;
        result_.gnnCalls = ctx_.modelCalls;
        if (tree_) {
            tree_->computeSubtreeSizes();
            result_.tree = std::move(tree_);
        }
        return status;
    }

private:
    struct Frame {
        Formula ranked;
        std::vector<ChildPlan> children;
        std::size_t next = 0;
        bool sawUnknown = false;
        std::uint64_t hash = 0;
        Substitution incoming;
        std::int64_t rankNode = -1;
        std::int64_t branchNode = -1;
        std::uint64_t held = 0;
    };

    void resetBudget() {
        start_ = Clock::now();
        splitsAtStart_ = result_.splits;
        aborted_ = false;
    }

    bool budgetExhausted() {
        const std::uint64_t used = result_.splits - splitsAtStart_;
        if (cfg_.maxSplits && used >= *cfg_.maxSplits) {
            result_.budgetExhausted = true;
            return true;
        }
        if (held_ > cfg_.maxHeldTerms) {
            result_.memoryExhausted = true;
            return true;
        }
        if (used % 256 == 0 || scorer_) {
            if (std::chrono::duration<double>(Clock::now() - start_).count() >=
                cfg_.timeoutSeconds) {
                result_.timedOut = true;
                return true;
            }
        }
        return false;
    }

    void setStatus(std::int64_t node, Status s) {
        if (tree_ && node >= 0)
            tree_->node(static_cast<std::uint32_t>(node)).status = s;
    }

    std::int64_t addLeaf(std::int64_t parent, Status s, const Substitution& sub) {
        if (!tree_)
            return -1;
        return tree_->addLeaf(parent, s, sub);
    }

    void recordWitness(const Substitution& last) {
        if (result_.witness)
            return;
        std::vector<Substitution> path;
        path.reserve(stack_.size() + 1);
        for (const Frame& fr : stack_)
            path.push_back(fr.incoming);
        path.push_back(last);
        result_.witness = reconstructWitness(original_, path);
    }

    // Evaluates a formula reached over an edge. Returns its status when it is
    // decided without search; otherwise pushes a frame and returns nullopt.
    std::optional<Status> enter(const Formula& f, const Substitution& incoming,
                                std::int64_t parent, std::uint64_t held) {
        auto [g, st] = simplifyAndCheck(f);
        if (st != Status::Unknown) {
            addLeaf(parent, st, incoming);
            if (st == Status::Sat)
                recordWitness(incoming);
            return st;
        }
        std::uint64_t h = 0;
        if (cfg_.ancestorCycleCheck) {
            h = canonicalHash(g);
            auto it = ancestors_.find(h);
            if (it != ancestors_.end() && it->second > 0) {
                addLeaf(parent, Status::Unknown, incoming);
                return Status::Unknown;
            }
        }
        if (budgetExhausted()) {
            aborted_ = true;
            addLeaf(parent, Status::Unknown, incoming);
            return Status::Unknown;
        }
        RankResult r = rankEqs(g, cfg_.strategy, ctx_, scorer_, cfg_.rankParams);
        std::int64_t rankNode = -1;
        if (tree_)
            rankNode = tree_->addRank(parent, g, r.order, Status::Unknown, incoming);
        return expand(r.formula, r.order.front(), rankNode, incoming, h, held);
    }

    // Applies a rule to the leftmost equation of an already ranked formula.
    std::optional<Status> expand(const Formula& ranked, std::size_t choice,
                                 std::int64_t rankNode, const Substitution& incoming,
                                 std::uint64_t h, std::uint64_t held) {
        RulePlan out = planRules(ranked, calculus_);
        ++result_.splits;
        std::int64_t branchNode = -1;
        if (tree_)
            branchNode = tree_->addBranch(rankNode, choice, out.rule);
        if (out.isTerminal()) {
            addLeaf(branchNode, out.terminal, {});
            setStatus(branchNode, out.terminal);
            setStatus(rankNode, out.terminal);
            if (out.terminal == Status::Sat)
                recordWitness(incoming);
            return out.terminal;
        }
        Frame fr;
        fr.ranked = ranked;
        fr.children = std::move(out.children);
        fr.hash = h;
        fr.incoming = incoming;
        fr.rankNode = rankNode;
        fr.branchNode = branchNode;
        fr.held = held;
        held_ += held;
        if (cfg_.ancestorCycleCheck)
            ++ancestors_[h];
        stack_.push_back(std::move(fr));
        return std::nullopt;
    }

    void popFrame(Status s) {
        Frame& top = stack_.back();
        setStatus(top.branchNode, s);
        setStatus(top.rankNode, s);
        if (cfg_.ancestorCycleCheck) {
            auto it = ancestors_.find(top.hash);
            if (--it->second == 0)
                ancestors_.erase(it);
        }
        held_ -= top.held;
        stack_.pop_back();
    }

    // Runs the frame stack to completion; `pending` is the status of a child
    // just decided for the current top frame.
    Status drain(std::optional<Status> pending) {
        while (!stack_.empty()) {
            Frame& top = stack_.back();
            std::optional<Status> done;
            if (pending) {
                if (*pending == Status::Sat)
                    done = Status::Sat;
                else if (*pending == Status::Unknown)
                    top.sawUnknown = true;
                pending.reset();
            }
            if (!done) {
                if (aborted_)
                    done = Status::Unknown;
                else if (top.next == top.children.size())
                    done = top.sawUnknown ? Status::Unknown : Status::Unsat;
            }
            if (done) {
                popFrame(*done);
                pending = done;
                continue;
            }
            ChildPlan plan = std::move(top.children[top.next++]);
            Formula child = buildChild(top.ranked, plan);
            // Terms of the equations the child does not share with its parent.
            std::uint64_t held = 0;
            const std::size_t offset = plan.residue ? 0 : 1;
            for (std::size_t i = 0; i < child.size(); ++i)
                if (child.ptr(i) != top.ranked.ptr(i + offset))
                    held += child[i].lhs.size() + child[i].rhs.size();
            if (top.next == top.children.size())
                top.ranked = Formula();
            const std::int64_t parent = top.branchNode;
            pending = enter(child, plan.substitution, parent, held);
        }
        return pending.value_or(Status::Unknown);
    }

    Status solveFrom(const Formula& f) {
        resetBudget();
        std::optional<Status> st = enter(f, {}, -1, 0);
        if (st)
            return *st;
        return drain(std::nullopt);
    }

    Status exploreRoot() {
        auto [g, st] = simplifyAndCheck(original_);
        if (st != Status::Unknown) {
            addLeaf(-1, st, {});
            if (st == Status::Sat)
                recordWitness({});
            return st;
        }
        const std::uint64_t h = cfg_.ancestorCycleCheck ? canonicalHash(g) : 0;
        RankResult r = rankEqs(g, cfg_.strategy, ctx_, scorer_, cfg_.rankParams);
        const auto root = static_cast<std::int64_t>(tree_->addRank(-1, g, r.order));

        bool sawSat = false, sawUnsat = false;
        for (std::size_t k = 0; k < r.order.size(); ++k) {
            std::vector<std::size_t> perm{k};
            for (std::size_t i = 0; i < r.order.size(); ++i)
                if (i != k)
                    perm.push_back(i);
            resetBudget();
            std::optional<Status> s = expand(r.formula.permuted(perm), r.order[k], root, {}, h, 0);
            Status status = s ? *s : drain(std::nullopt);
            sawSat |= status == Status::Sat;
            sawUnsat |= status == Status::Unsat;
            if (sawSat)
                break;
        }
        Status status = sawSat ? Status::Sat : sawUnsat ? Status::Unsat : Status::Unknown;
        setStatus(root, status);
        return status;
    }

    const Formula& original_;
    const SolveConfig& cfg_;
    SolveResult& result_;
    RankContext ctx_;
    CalculusOptions calculus_;
    std::unique_ptr<gcn::GcnScorer> gcnScorer_;
    ConjunctScorer* scorer_ = nullptr;
    std::optional<DecisionTree> tree_;
    std::vector<Frame> stack_;
    std::unordered_map<std::uint64_t, std::uint32_t> ancestors_;
    Clock::time_point start_;
    std::uint64_t splitsAtStart_ = 0;
    std::uint64_t held_ = 0;
    bool aborted_ = false;
};

}  // namespace

std::uint64_t canonicalHash(const Formula& f) {
    std::vector<std::uint32_t> rename(f.nextVariableId(), UINT32_MAX);
    std::uint32_t seen = 0;
    std::uint64_t h = mix(0x243f6a8885a308d3ull, f.size());
    for (const auto& e : f.equations()) {
        for (const Word* side : {&e->lhs, &e->rhs}) {
            h = mix(h, 0xfffffffffull + side->size());
            for (Term t : *side) {
                std::uint64_t v = t.raw();
                if (t.isVariable()) {
                    if (t.id() >= rename.size())
                        rename.resize(t.id() + 1, UINT32_MAX);
                    std::uint32_t& r = rename[t.id()];
                    if (r == UINT32_MAX)
                        r = seen++;
                    v = Term::variable(r).raw();
                }
                h = (h ^ v) * 0x100000001b3ull;
            }
        }
    }
    return mix(h, seen);
}

Substitution reconstructWitness(const Formula& original, std::span<const Substitution> path) {
    std::vector<Term> vars = original.occurringVariables();
    for (std::uint32_t i = 0; i < original.symbols().numVariables(); ++i)
        vars.push_back(Term::variable(i));
    Substitution witness;
    for (Term v : vars) {
        if (witness.find(v))
            continue;
        Word value{v};
        for (const Substitution& s : path)
            if (!s.empty())
                value = s.apply(value);
        std::erase_if(value, [](Term t) { return t.isVariable(); });
        witness.set(v, std::move(value));
    }
    return witness;
}

SolveResult splitEquations(const Formula& f, const SolveConfig& cfg) {
    cfg.validate();
    SolveResult result;
    const auto start = Clock::now();
    Search search(f, cfg, result);
    result.status = search.run();
    result.elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

}  // namespace weq
