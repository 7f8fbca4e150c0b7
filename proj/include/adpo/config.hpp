#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "adpo/evaluation.hpp"
#include "adpo/trainer.hpp"

namespace adpo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentChoice {
    std::string name = "collapse";
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<double> margins = {0.025, 0.05, 0.1, 0.2, 0.25};
};

// The full validated run configuration. Defaults match the toy preset; the
// "paper" preset records the published large-scale hyperparameters.
struct FullConfig {
    TaskSpec task;
    TrainConfig train;
    EvalConfig eval;
    ExperimentChoice experiment;
};

FullConfig default_config(const std::string& preset = "toy");

// Strict parser: unknown keys are rejected with a field path and a nearest
// known key suggestion; every value is validated against module invariants.
FullConfig parse_config(const nlohmann::json& j, const std::string& preset = "toy");
FullConfig parse_config_file(const std::string& path, const std::string& preset = "toy");

// Full echo of a configuration with every default filled in.
nlohmann::json config_to_json(const FullConfig& cfg);

nlohmann::json metrics_to_json(const StepMetrics& m);
nlohmann::json report_to_json(const EvalReport& r);

// Stable FNV-1a content hash of the canonical config echo.
std::string config_hash(const FullConfig& cfg);

}  // namespace adpo
