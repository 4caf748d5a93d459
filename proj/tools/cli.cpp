#include "cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "weq/benchgen.h"
#include "weq/gcn.h"
#include "weq/json.h"
#include "weq/mus.h"
#include "weq/solver.h"
#include "weq/traindata.h"

namespace fs = std::filesystem;

namespace weq::cli {

namespace {

struct OracleSpec {
    std::string name;
    std::string command;
};

struct Settings {
    std::string strategy = "re1";
    std::string model;
    int task = 1;
    double timeout = 300.0;
    std::uint64_t maxSplits = 0;  // 0: unlimited
    std::uint64_t maxHeldTerms = SolveConfig{}.maxHeldTerms;
    std::uint64_t seed = 0;
    bool suffixRules = false;
    bool noCycleCheck = false;
    unsigned jobs = 1;
    RankParams rank;
    std::vector<OracleSpec> oracles;
    double oracleTimeout = 60.0;
    std::uint64_t musBudget = 1u << 16;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void loadConfig(Settings& s) {
    const char* path = std::getenv(kConfigEnv);
    if (!path || !*path)
        return;
    std::ifstream in(path);
    if (!in)
        throw ConfigError(std::string("cannot read config file '") + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        s.strategy = j.value("strategy", s.strategy);
        s.model = j.value("model", s.model);
        s.task = j.value("task", s.task);
        s.timeout = j.value("timeout", s.timeout);
        s.maxSplits = j.value("max_splits", s.maxSplits);
        s.maxHeldTerms = j.value("max_held_terms", s.maxHeldTerms);
        s.seed = j.value("seed", s.seed);
        s.suffixRules = j.value("suffix_rules", s.suffixRules);
        s.noCycleCheck = !j.value("cycle_check", !s.noCycleCheck);
        s.jobs = j.value("jobs", s.jobs);
        s.oracleTimeout = j.value("oracle_timeout", s.oracleTimeout);
        s.musBudget = j.value("mus_budget", s.musBudget);
        if (j.contains("rank")) {
            const auto& r = j.at("rank");
            s.rank.gnnProbability = r.value("gnn_probability", s.rank.gnnProbability);
            s.rank.gnnPeriod = r.value("gnn_period", s.rank.gnnPeriod);
            s.rank.stagnationLimit = r.value("stagnation_limit", s.rank.stagnationLimit);
        }
        if (j.contains("oracles"))
            for (const auto& o : j.at("oracles"))
                s.oracles.push_back({o.at("name").get<std::string>(),
                                     o.at("command").get<std::string>()});
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed config file: ") + ex.what());
    }
}

void addSolveFlags(CLI::App* sub, Settings& s) {
    sub->add_option("--strategy", s.strategy, "Ranking strategy re1..re7");
    sub->add_option("--model", s.model, "Weight file (JSON)");
    sub->add_option("--task", s.task, "Model task 1|2|3");
    sub->add_option("--timeout", s.timeout, "Seconds per solve");
    sub->add_option("--max-splits", s.maxSplits, "Rule application budget (0: none)");
    sub->add_option("--max-terms", s.maxHeldTerms, "Terms kept on the search stack before giving up");
    sub->add_option("--seed", s.seed, "Random seed");
    sub->add_flag("--suffix-rules", s.suffixRules, "Use the suffix rule variants");
    sub->add_flag("--no-cycle-check", s.noCycleCheck, "Disable ancestor-cycle pruning");
    sub->add_option("--jobs", s.jobs, "Worker threads");
}

void addOracleFlags(CLI::App* sub, Settings& s, std::vector<std::string>& oracleArgs,
                    bool& noInternal) {
    sub->add_option("--oracle", oracleArgs, "External solver NAME=COMMAND with {file}");
    sub->add_option("--oracle-timeout", s.oracleTimeout, "Seconds per external query");
    sub->add_option("--budget", s.musBudget, "Oracle-call budget for MUS search");
    sub->add_flag("--no-internal", noInternal, "Do not use the internal solver as oracle");
}

SolveConfig makeSolveConfig(const Settings& s) {
    SolveConfig cfg;
    auto strategy = parseRankStrategy(s.strategy);
    if (!strategy)
        throw ConfigError("unknown strategy '" + s.strategy + "'");
    cfg.strategy = *strategy;
    cfg.timeoutSeconds = s.timeout;
    if (s.maxSplits)
        cfg.maxSplits = s.maxSplits;
    cfg.maxHeldTerms = s.maxHeldTerms;
    cfg.randomSeed = s.seed;
    cfg.suffixRules = s.suffixRules;
    cfg.ancestorCycleCheck = !s.noCycleCheck;
    cfg.taskId = s.task;
    cfg.rankParams = s.rank;
    if (!s.model.empty())
        cfg.model = std::make_shared<const gcn::ModelWeights>(gcn::loadWeights(s.model));
    cfg.validate();
    return cfg;
}

std::vector<OraclePtr> makeOracles(const Settings& s, const std::vector<std::string>& args,
                                   bool noInternal) {
    std::vector<OracleSpec> specs = s.oracles;
    for (const auto& a : args) {
        auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--oracle expects NAME=COMMAND, got '" + a + "'");
        specs.push_back({a.substr(0, eq), a.substr(eq + 1)});
    }
    std::vector<OraclePtr> oracles;
    if (!noInternal)
        oracles.push_back(std::make_shared<InternalOracle>(makeSolveConfig(s)));
    for (const auto& spec : specs)
        oracles.push_back(std::make_shared<ExternalOracle>(spec.name, spec.command, s.oracleTimeout));
    if (oracles.empty())
        throw ConfigError("no oracle configured");
    return oracles;
}

std::vector<fs::path> problemFiles(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.is_regular_file() && entry.path().extension() == ".eq")
                    found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw Error("no such file or directory: " + in);
        }
    }
    return files;
}

// Runs fn(i) for i in [0,n) on `jobs` threads.
template <class Fn>
void parallelFor(std::size_t n, unsigned jobs, Fn fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(jobs, n); ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;)
                fn(i);
        });
    for (auto& t : pool)
        t.join();
}

// --- subcommands -------------------------------------------------------------

int cmdSolve(const Settings& s, const std::string& file, bool printWitness, std::ostream& out) {
    Formula f = readProblemFile(file);
    SolveConfig cfg = makeSolveConfig(s);
    SolveResult r = splitEquations(f, cfg);
    out << "status=" << toString(r.status) << " splits=" << r.splits
        << " time=" << fmt("%.3f", r.elapsed) << "\n";
    if (printWitness && r.witness) {
        for (const auto& [var, value] : *r.witness)
            out << f.symbols().name(var) << "=" << wordToString(value, f.symbols()) << "\n";
    }
    return r.status == Status::Unknown ? 2 : 0;
}

struct EvalRow {
    std::string problem;
    std::string strategy;
    std::string status;
    std::uint64_t splits = 0;
    double seconds = 0.0;
};

int cmdEval(const Settings& s, const std::vector<std::string>& inputs,
            std::vector<std::string> strategies, const std::string& csvPath,
            const std::string& summaryPath, std::ostream& out, std::ostream& err) {
    if (strategies.empty())
        strategies.push_back(s.strategy);
    std::vector<SolveConfig> configs;
    std::vector<std::string> names;
    for (const auto& name : strategies) {
        Settings copy = s;
        copy.strategy = name;
        configs.push_back(makeSolveConfig(copy));
        names.emplace_back(toString(configs.back().strategy));
    }
    const std::vector<fs::path> files = problemFiles(inputs);
    std::vector<std::vector<EvalRow>> rows(files.size());
    std::mutex errMutex;
    parallelFor(files.size(), s.jobs, [&](std::size_t i) {
        const std::string problem = files[i].filename().string();
        std::optional<Formula> f;
        std::string failure;
        try {
            f = readProblemFile(files[i].string());
        } catch (const std::exception& ex) {
            failure = ex.what();
        }
        for (std::size_t k = 0; k < configs.size(); ++k) {
            EvalRow row{problem, names[k], "ERROR", 0, 0.0};
            if (f) {
                try {
                    SolveResult r = splitEquations(*f, configs[k]);
                    row.status = std::string(toString(r.status));
                    row.splits = r.splits;
                    row.seconds = r.elapsed;
                } catch (const std::exception& ex) {
                    failure = ex.what();
                }
            }
            if (row.status == "ERROR") {
                std::lock_guard lock(errMutex);
                err << problem << ": " << failure << "\n";
            }
            rows[i].push_back(row);
        }
    });

    std::ofstream csv(csvPath, std::ios::binary);
    if (!csv)
        throw Error("cannot write '" + csvPath + "'");
    csv << "problem,strategy,status,splits,seconds\n";
    for (const auto& perProblem : rows)
        for (const auto& r : perProblem)
            csv << r.problem << "," << r.strategy << "," << r.status << "," << r.splits << ","
                << fmt("%.6f", r.seconds) << "\n";

    std::ostringstream summary;
    summary << "strategy,sat,unsat,unknown,error,avg_seconds_common,avg_splits_solved\n";
    std::vector<bool> common(files.size(), true);
    for (std::size_t i = 0; i < files.size(); ++i)
        for (const auto& r : rows[i])
            common[i] = common[i] && (r.status == "SAT" || r.status == "UNSAT");
    for (std::size_t k = 0; k < configs.size(); ++k) {
        std::size_t sat = 0, unsat = 0, unknown = 0, error = 0, nCommon = 0;
        double commonSeconds = 0.0, solvedSplits = 0.0;
        for (std::size_t i = 0; i < files.size(); ++i) {
            const EvalRow& r = rows[i][k];
            if (r.status == "SAT")
                ++sat;
            else if (r.status == "UNSAT")
                ++unsat;
            else if (r.status == "UNKNOWN")
                ++unknown;
            else
                ++error;
            if (r.status == "SAT" || r.status == "UNSAT")
                solvedSplits += static_cast<double>(r.splits);
            if (common[i]) {
                ++nCommon;
                commonSeconds += r.seconds;
            }
        }
        const std::size_t solved = sat + unsat;
        summary << names[k] << "," << sat << "," << unsat << "," << unknown << "," << error << ","
                << fmt("%.6f", nCommon ? commonSeconds / static_cast<double>(nCommon) : 0.0) << ","
                << fmt("%.2f", solved ? solvedSplits / static_cast<double>(solved) : 0.0) << "\n";
    }
    out << summary.str();
    if (!summaryPath.empty()) {
        std::ofstream sf(summaryPath, std::ios::binary);
        if (!sf)
            throw Error("cannot write '" + summaryPath + "'");
        sf << summary.str();
    }
    return 0;
}

int cmdGen(const std::string& benchmark, std::uint64_t count, std::uint64_t seed,
           const std::string& dir, std::ostream& out) {
    auto b = parseBenchmark(benchmark);
    if (!b)
        throw ConfigError("unknown benchmark '" + benchmark + "'");
    fs::create_directories(dir);
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (std::uint64_t i = 0; i < count; ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%05llu.eq", std::string(toString(*b)).c_str(),
                      static_cast<unsigned long long>(i));
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f)
            throw Error(std::string("cannot write ") + name);
        f << serializeProblem(genIndexed(*b, seed, i));
        files.push_back(name);
    }
    nlohmann::ordered_json manifest{{"benchmark", std::string(toString(*b))},
                                    {"seed", seed},
                                    {"count", count},
                                    {"files", files}};
    std::ofstream m(fs::path(dir) / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << "\n";
    out << "generated " << count << " problems in " << dir << "\n";
    return 0;
}

int cmdMus(const Settings& s, const std::string& file, const std::vector<std::string>& oracleArgs,
           bool noInternal, std::ostream& out) {
    Formula f = readProblemFile(file);
    std::vector<OraclePtr> oracles = makeOracles(s, oracleArgs, noInternal);
    OraclePtr oracle = selectFastest(f, oracles);
    if (!oracle) {
        out << "mus=none reason=not-unsat\n";
        return 2;
    }
    MusOptions opts;
    opts.budget = s.musBudget;
    opts.workers = s.jobs;
    std::optional<MusResult> r = findMus(f, *oracle, opts);
    if (!r) {
        out << "mus=none reason=budget oracle=" << oracle->name() << "\n";
        return 2;
    }
    out << "mus=";
    for (std::size_t i = 0; i < r->subset.size(); ++i)
        out << (i ? "," : "") << r->subset[i];
    out << " size=" << r->subset.size() << " calls=" << r->oracleCalls
        << " unknown=" << r->unknownSubsets << " oracle=" << oracle->name() << "\n";
    for (std::size_t i : r->subset)
        out << i << ": " << equationToString(f[i], f.symbols()) << "\n";
    return 0;
}

int cmdExtract(const Settings& s, const std::vector<std::string>& inputs,
               const std::vector<std::string>& oracleArgs, bool noInternal, bool all,
               const std::string& dir, std::ostream& out, std::ostream& err) {
    ExtractOptions opts;
    opts.solve = makeSolveConfig(s);
    opts.oracles = makeOracles(s, oracleArgs, noInternal);
    opts.mus.budget = s.musBudget;
    opts.mus.workers = s.jobs;
    opts.onlyUnknown = !all;

    std::vector<LabeledInstance> instances;
    std::vector<ManifestEntry> manifest;
    std::size_t musCount = 0, pathCount = 0;
    const auto files = problemFiles(inputs);
    for (const auto& file : files) {
        try {
            Formula f = readProblemFile(file.string());
            ExtractOutcome o = extractTrainingData(f, opts);
            for (auto& inst : o.musInstances) {
                instances.push_back(std::move(inst));
                manifest.push_back({file.filename().string(), "mus", Split::Train});
                ++musCount;
            }
            for (auto& inst : o.pathInstances) {
                instances.push_back(std::move(inst));
                manifest.push_back({file.filename().string(), "path", Split::Train});
                ++pathCount;
            }
        } catch (const std::exception& ex) {
            err << file.filename().string() << ": " << ex.what() << "\n";
        }
    }
    std::vector<Split> splits = assignSplits(instances.size(), s.seed);
    for (std::size_t i = 0; i < manifest.size(); ++i)
        manifest[i].split = splits[i];
    fs::create_directories(dir);
    exportDataset(instances, (fs::path(dir) / "dataset.jsonl").string());
    writeManifest(manifest, (fs::path(dir) / "manifest.jsonl").string());
    out << "problems=" << files.size() << " mus_instances=" << musCount
        << " path_instances=" << pathCount << "\n";
    return 0;
}

int cmdEncode(const std::string& file, std::ostream& out) {
    Formula f = readProblemFile(file);
    nlohmann::ordered_json j{{"graphs", encodeFormula(f)}};
    out << j.dump() << "\n";
    return 0;
}

int cmdScore(const Settings& s, const std::string& file, std::ostream& out) {
    if (s.model.empty())
        throw ConfigError("score needs --model");
    Formula f = readProblemFile(file);
    auto weights = std::make_shared<const gcn::ModelWeights>(gcn::loadWeights(s.model));
    gcn::GcnScorer scorer(weights, s.task);
    std::vector<std::size_t> all(f.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    std::vector<double> scores = scorer.score(f, all);
    for (std::size_t i = 0; i < scores.size(); ++i)
        out << i << "\t" << fmt("%.9f", scores[i]) << "\t" << equationToString(f[i], f.symbols())
            << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Settings s;
    try {
        loadConfig(s);
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }

    CLI::App app{"Word-equation solver toolkit", "weq"};
    app.require_subcommand(1);

    std::string file;
    std::vector<std::string> inputs;
    bool witness = false, noInternal = false, all = false;
    std::vector<std::string> oracleArgs, strategies;
    std::string outPath, summaryPath, benchmark = "A1";
    std::uint64_t count = 10;

    auto* solve = app.add_subcommand("solve", "Solve one problem file");
    addSolveFlags(solve, s);
    solve->add_option("file", file, "Problem file")->required();
    solve->add_flag("--witness", witness, "Print the satisfying assignment");

    auto* eval = app.add_subcommand("eval", "Evaluate strategies on a problem set");
    addSolveFlags(eval, s);
    eval->add_option("inputs", inputs, "Problem files or directories")->required();
    eval->add_option("--strategies", strategies, "Strategies to compare")->delimiter(',');
    eval->add_option("--out", outPath, "CSV output path")->required();
    eval->add_option("--summary", summaryPath, "Summary CSV output path");

    auto* gen = app.add_subcommand("gen", "Generate benchmark problems");
    gen->add_option("--benchmark", benchmark, "A1|A2|B|C");
    gen->add_option("--count", count, "Number of problems");
    gen->add_option("--seed", s.seed, "Random seed");
    gen->add_option("--out", outPath, "Output directory")->required();

    auto* mus = app.add_subcommand("mus", "Find a minimal unsatisfiable subset");
    addSolveFlags(mus, s);
    addOracleFlags(mus, s, oracleArgs, noInternal);
    mus->add_option("file", file, "Problem file")->required();

    auto* extract = app.add_subcommand("extract", "Build a labeled training dataset");
    addSolveFlags(extract, s);
    addOracleFlags(extract, s, oracleArgs, noInternal);
    extract->add_option("inputs", inputs, "Problem files or directories")->required();
    extract->add_option("--out", outPath, "Output directory")->required();
    extract->add_flag("--all", all, "Also use problems the solver decides on its own");

    auto* encode = app.add_subcommand("encode", "Print the graph encoding as JSON");
    encode->add_option("file", file, "Problem file")->required();

    auto* score = app.add_subcommand("score", "Print model scores per equation");
    score->add_option("--model", s.model, "Weight file (JSON)")->required();
    score->add_option("--task", s.task, "Model task 1|2|3");
    score->add_option("file", file, "Problem file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solve)
            return cmdSolve(s, file, witness, out);
        if (*eval)
            return cmdEval(s, inputs, strategies, outPath, summaryPath, out, err);
        if (*gen)
            return cmdGen(benchmark, count, s.seed, outPath, out);
        if (*mus)
            return cmdMus(s, file, oracleArgs, noInternal, out);
        if (*extract)
            return cmdExtract(s, inputs, oracleArgs, noInternal, all, outPath, out, err);
        if (*encode)
            return cmdEncode(file, out);
        if (*score)
            return cmdScore(s, file, out);
    } catch (const ParseError& ex) {
        err << "error: " << file << ":" << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace weq::cli
