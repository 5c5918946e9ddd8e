#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcgcn/data.hpp"
#include "pcgcn/model.hpp"
#include "pcgcn/train.hpp"

namespace pcgcn {

/// One experiment protocol. Replicate r uses seed config.seed + r for both
/// the split and the model, so result tables are pure functions of the spec.
struct ExperimentSpec {
    std::string kind = "main"; // main | label-budget | missing-class |
                               // partial-control | ablation | match-oracle
    std::string model = "pcgcn";
    std::int32_t replicates = 10;
    std::vector<std::int32_t> budgets{2, 5, 10, 20, 40, 70};
    std::vector<std::string> control_rules{"random", "min-degree", "max-degree"};
    double control_fraction = 0.10;
    std::vector<double> rho_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    PCGCNConfig config;

    void validate() const;
};

/// One table cell: a variant of the protocol aggregated over replicates,
/// with the full per-run reports and bucket analyses retained.
struct ExperimentRow {
    std::string dataset, model, kind, variant;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation over replicates
    std::int32_t n_runs = 0;
    std::vector<TrainReport> reports;
    std::vector<BucketReport> hom_buckets; // per replicate, at best logits
    std::vector<BucketReport> sld_buckets;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
};

ExperimentResult run_experiment(const DatasetBundle& bundle, const ExperimentSpec& spec);

/// dataset,model,kind,variant,mean,std,n_runs; one row per cell.
void write_experiment_csv(const ExperimentResult& result, const std::filesystem::path& file);

/// Plot-ready per-bucket rows:
/// dataset,model,kind,variant,seed,bucket,count,correct,accuracy.
void write_bucket_csv(const ExperimentResult& result, const std::filesystem::path& file,
                      bool sld);

} // namespace pcgcn
