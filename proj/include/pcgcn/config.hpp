#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pcgcn/data.hpp"
#include "pcgcn/experiment.hpp"
#include "pcgcn/model.hpp"

namespace pcgcn {

/// Everything one invocation needs: model hyperparameters (keys mirror the
/// config file one to one), dataset/model/output selection, the experiment
/// protocol, and generator settings for synthetic bundles.
struct RunConfig {
    PCGCNConfig model_cfg;
    std::string model = "pcgcn"; // pcgcn | gcn | mlp
    std::string dataset;         // bundle directory or a .synth spec file
    std::string out = "out";

    std::string kind = "main";
    std::int32_t replicates = 10;
    std::vector<std::int32_t> budgets{2, 5, 10, 20, 40, 70};
    std::vector<std::string> rules{"random", "min-degree", "max-degree"};
    double control_fraction = 0.10;
    std::vector<double> rho_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

    SynthSpec synth;
};

/// Applies one key/value pair. Unknown keys throw ConfigError naming the key;
/// malformed values throw ConfigError naming key and value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// `key=value`, the form taken by the --set flag.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Flat text format: one `key value` pair per line, `#` starts a comment,
/// blank lines ignored. Errors carry file:line.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
RunConfig parse_config_file(const std::filesystem::path& path);

ExperimentSpec experiment_spec_from(const RunConfig& cfg);

} // namespace pcgcn
