#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcgcn/data.hpp"
#include "pcgcn/dense.hpp"
#include "pcgcn/model.hpp"

namespace pcgcn {

struct EpochRecord {
    std::int32_t epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
    double test_acc = 0.0;
    std::vector<double> match_degree; // per layer, PCGCN only
};

struct TrainReport {
    std::string model;
    std::string dataset;
    std::uint64_t seed = 0;
    PCGCNConfig config;
    std::vector<EpochRecord> epochs; // entry 0 is the untrained evaluation
    std::int32_t best_epoch = 0;
    double best_val_acc = 0.0;
    double test_acc_at_best = 0.0;
    double train_time_sec = 0.0;
    DenseMatrix best_logits;  // evaluation-mode logits at the best epoch
    ModelParams best_params;  // checkpoint source
};

/// Full-batch training with early stopping on validation accuracy
/// (strict improvement; stop after `patience` epochs without one). The test
/// score is read once, at the best-validation epoch. Throws DivergenceError
/// naming the epoch if the loss leaves the finite range.
TrainReport train(const DatasetBundle& bundle, const SplitSpec& split, const PCGCNConfig& cfg,
                  const std::string& model);

/// Fraction of masked nodes whose argmax logit (ties to the lowest class)
/// equals the label. Throws ConfigError on an empty mask.
double evaluate_accuracy(const DenseMatrix& logits, const LabelSet& labels,
                         const std::vector<bool>& mask);

struct BucketReport {
    std::vector<std::string> names;
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> correct;
    std::vector<double> accuracy; // 0 for empty buckets
};

/// Masked nodes partitioned by node-level homophily into
/// [0,0.2),...,[0.8,1.0] plus an "undefined" bucket for nodes with no
/// homophily ratio (isolated or no labeled neighbor).
BucketReport bucket_by_homophily(const DenseMatrix& logits, const DatasetBundle& bundle,
                                 const std::vector<bool>& mask, std::int32_t num_buckets = 5);

/// Masked nodes partitioned by shortest label distance (against the split's
/// train mask) into 1, 2, 3, >=4, unreachable.
BucketReport bucket_by_sld(const DenseMatrix& logits, const DatasetBundle& bundle,
                           const SplitSpec& split, const std::vector<bool>& mask);

} // namespace pcgcn
