#pragma once

#include <filesystem>

#include <json.hpp>

#include "pcgcn/experiment.hpp"
#include "pcgcn/model.hpp"
#include "pcgcn/train.hpp"

namespace pcgcn {

nlohmann::json config_to_json(const PCGCNConfig& cfg);
PCGCNConfig config_from_json(const nlohmann::json& j);

/// Checkpoint: every parameter value keyed by name, plus the config.
/// JSON doubles use shortest round-trip formatting, so load(save(p)) is
/// bit-exact.
void save_checkpoint(const ModelParams& params, const PCGCNConfig& cfg,
                     const std::filesystem::path& file);

struct Checkpoint {
    ModelParams params;
    PCGCNConfig config;
};
Checkpoint load_checkpoint(const std::filesystem::path& file);

/// train_time_sec is the only wall-clock field in these documents.
nlohmann::json report_to_json(const TrainReport& report);
nlohmann::json experiment_to_json(const ExperimentResult& result);

} // namespace pcgcn
