// adpo_lab: train / evaluate / run experiments from a JSON config.
//
// All outputs land in --out: manifest.json, metrics.jsonl, summary.csv and
// params.final. Wall-time fields live only in manifest.json so byte-level
// reproducibility checks can compare the data files directly.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "adpo/config.hpp"
#include "adpo/experiments.hpp"
#include "adpo/serialize.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace adpo;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string preset = "toy";
    int64_t seed_override = -1;
    int workers = 1;
    int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path, "JSON config file");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    cmd->add_option("--preset", args.preset, "default preset: toy or paper")
        ->check(CLI::IsMember({"toy", "paper"}));
    cmd->add_option("--seed", args.seed_override, "seed override");
    cmd->add_option("--workers", args.workers, "worker cap (env ADPO_LAB_WORKERS)")
        ->envname("ADPO_LAB_WORKERS");
    cmd->add_flag("-v,--verbose", args.verbosity, "verbose progress");
}

FullConfig load_config(const CommonArgs& args) {
    FullConfig cfg = args.config_path.empty()
                         ? default_config(args.preset)
                         : parse_config_file(args.config_path, args.preset);
    if (args.seed_override >= 0) {
        cfg.task.seed = static_cast<uint64_t>(args.seed_override);
        cfg.train.seed = static_cast<uint64_t>(args.seed_override);
        cfg.eval.seed = static_cast<uint64_t>(args.seed_override);
    }
    return cfg;
}

// Manifest is written last and atomically (write + rename) so a failed run
// never leaves a partial one behind.
void write_manifest(const fs::path& dir, const json& manifest) {
    fs::path tmp = dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        out << manifest.dump(2) << "\n";
    }
    fs::rename(tmp, dir / "manifest.json");
}

json base_manifest(const FullConfig& cfg, const std::string& command,
                   double wall_seconds) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config_to_json(cfg);
    manifest["config_hash"] = config_hash(cfg);
    manifest["timing"] = {{"wall_seconds", wall_seconds}};
    return manifest;
}

int run_train(const CommonArgs& args) {
    FullConfig cfg = load_config(args);
    fs::create_directories(args.out_dir);
    fs::path dir(args.out_dir);
    auto t0 = std::chrono::steady_clock::now();

    TrainState state = init_train_state(cfg.task, cfg.train);
    std::ofstream jsonl(dir / "metrics.jsonl");
    std::ofstream csv(dir / "summary.csv");
    csv << "step,mean_answer_reward,pass1,fraction_max_score,auc,ap,objective,kl\n";
    for (int s = 0; s < cfg.train.steps; ++s) {
        StepMetrics m = train_step(state);
        jsonl << metrics_to_json(m).dump() << "\n";
        csv << m.step << "," << m.mean_answer_reward << "," << m.pass1 << ","
            << m.fraction_max_score << ","
            << (m.auc ? std::to_string(*m.auc) : "") << ","
            << (m.ap ? std::to_string(*m.ap) : "") << "," << m.objective << "," << m.kl
            << "\n";
        if (args.verbosity > 0 && m.step % 10 == 0) {
            std::cerr << "step " << m.step << " reward " << m.mean_answer_reward
                      << " objective " << m.objective << "\n";
        }
    }
    save_params_file(state.params, (dir / "params.final").string());

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, base_manifest(cfg, "train", wall));
    return 0;
}

int run_eval(const CommonArgs& args, const std::string& params_path,
             const std::string& verifier_path) {
    FullConfig cfg = load_config(args);
    fs::create_directories(args.out_dir);
    fs::path dir(args.out_dir);
    auto t0 = std::chrono::steady_clock::now();

    PolicyParams params = load_params_file(params_path);
    std::vector<Query> queries = make_task(cfg.task);
    PolicyParams verifier;
    const PolicyParams* verifier_ptr = nullptr;
    if (!verifier_path.empty()) {
        verifier = load_params_file(verifier_path);
        verifier_ptr = &verifier;
    }
    EvalReport report = evaluate(params, cfg.task, queries, cfg.eval, verifier_ptr);

    {
        std::ofstream out(dir / "report.json");
        out << report_to_json(report).dump(2) << "\n";
        std::ofstream hist(dir / "score_histogram.csv");
        hist << "bin,count\n";
        for (size_t b = 0; b < report.score_histogram.size(); ++b) {
            hist << b << "," << report.score_histogram[b] << "\n";
        }
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = base_manifest(cfg, "eval", wall);
    manifest["params"] = params_path;
    write_manifest(dir, manifest);
    std::cout << report_to_json(report).dump(2) << "\n";
    return 0;
}

int run_experiment_cmd(const CommonArgs& args) {
    FullConfig cfg = load_config(args);
    fs::create_directories(args.out_dir);
    auto t0 = std::chrono::steady_clock::now();

    const std::string& name = cfg.experiment.name;
    if (name == "collapse") {
        ExperimentSpec spec = collapse_spec(args.out_dir);
        spec.seeds = cfg.experiment.seeds;
        run_collapse_experiment(spec);
    } else if (name == "decoupling") {
        ExperimentSpec spec = decoupling_spec(args.out_dir);
        spec.seeds = cfg.experiment.seeds;
        run_decoupling_experiment(spec);
    } else if (name == "margin_sweep") {
        ExperimentSpec spec = margin_sweep_spec(args.out_dir);
        spec.seeds = cfg.experiment.seeds;
        run_margin_sweep(spec, cfg.experiment.margins);
    } else if (name == "score_distribution") {
        ExperimentSpec spec = collapse_spec("");
        spec.seeds = cfg.experiment.seeds;
        spec.output_dir = args.out_dir;
        run_score_distribution(spec);
    } else if (name == "best_of_n") {
        ExperimentSpec spec = best_of_n_spec(args.out_dir);
        spec.seeds = cfg.experiment.seeds;
        run_experiment(spec);
    } else {
        throw ConfigError("unknown experiment: " + name +
                          " (expected collapse, decoupling, margin_sweep, "
                          "score_distribution or best_of_n)");
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(args.out_dir, base_manifest(cfg, "experiment " + name, wall));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ADPO toy laboratory"};
    app.require_subcommand(1);

    CommonArgs train_args, eval_args, exp_args;
    std::string params_path, verifier_path;

    CLI::App* train_cmd = app.add_subcommand("train", "train a policy");
    add_common(train_cmd, train_args, false);

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate saved parameters");
    add_common(eval_cmd, eval_args, false);
    eval_cmd->add_option("--params", params_path, "params.final file")->required();
    eval_cmd->add_option("--verifier", verifier_path,
                         "separate verifier params (cross-verification)");

    CLI::App* exp_cmd = app.add_subcommand("experiment", "run a named experiment");
    add_common(exp_cmd, exp_args, false);

    try {
        app.parse(argc, argv);
        if (train_cmd->parsed()) return run_train(train_args);
        if (eval_cmd->parsed()) return run_eval(eval_args, params_path, verifier_path);
        return run_experiment_cmd(exp_args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        json err = {{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
