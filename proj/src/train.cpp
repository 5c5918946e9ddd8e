#include "pcgcn/train.hpp"

#include <chrono>
#include <cmath>

#include "pcgcn/adam.hpp"
#include "pcgcn/errors.hpp"
#include "pcgcn/ops.hpp"

namespace pcgcn {

double evaluate_accuracy(const DenseMatrix& logits, const LabelSet& labels,
                         const std::vector<bool>& mask) {
    if (logits.rows != labels.labels.size() || mask.size() != logits.rows) {
        throw ShapeError("evaluate_accuracy: row counts disagree");
    }
    std::int64_t total = 0, correct = 0;
    const auto c = static_cast<std::int32_t>(logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        if (!mask[i] || labels.labels[i] == kUnlabeled) continue;
        ++total;
        if (ops::argmax_row(logits.row(i), c) == labels.labels[i]) ++correct;
    }
    if (total == 0) throw ConfigError("evaluate_accuracy: mask selects no labeled node");
    return double(correct) / double(total);
}

namespace {

std::vector<double> match_degrees(const ForwardCache& cache, const LabelSet& labels) {
    std::vector<double> out;
    out.reserve(cache.layers.size());
    for (const LayerCache& lc : cache.layers) {
        std::int64_t total = 0, matched = 0;
        for (std::size_t i = 0; i < lc.match.assignment.size(); ++i) {
            if (labels.labels[i] == kUnlabeled) continue;
            ++total;
            if (lc.match.assignment[i] == labels.labels[i]) ++matched;
        }
        out.push_back(total ? double(matched) / double(total) : 0.0);
    }
    return out;
}

} // namespace

TrainReport train(const DatasetBundle& bundle, const SplitSpec& split, const PCGCNConfig& cfg,
                  const std::string& model) {
    cfg.validate();
    if (model != "pcgcn" && model != "gcn" && model != "mlp") {
        throw ConfigError("config: unknown model '" + model + "'");
    }
    if (!cfg.control_mask.empty() &&
        cfg.control_mask.size() != static_cast<std::size_t>(bundle.num_nodes())) {
        throw ConfigError("config: control mask size does not match node count");
    }

    const DatasetBundle* data = &bundle;
    DatasetBundle normalized;
    if (cfg.row_normalize) {
        normalized = bundle;
        row_normalize_features(normalized.features);
        data = &normalized;
    }
    const NormalizedAdjacency adj = normalize_adjacency(data->graph);

    const bool is_pcgcn = model == "pcgcn";
    ModelParams params =
        is_pcgcn ? ModelParams::init_pcgcn(data->num_features(), cfg.hidden, data->num_classes(),
                                           cfg.layers, cfg.tie_transforms, cfg.seed)
                 : ModelParams::init_baseline(data->num_features(), cfg.hidden,
                                              data->num_classes(), cfg.layers, cfg.seed);
    Adam optimizer(params.trainable(), cfg.lr, cfg.wd);
    Rng drop_rng = Rng::derive(cfg.seed, "dropout");
    Rng match_rng = Rng::derive(cfg.seed, "match-oracle");

    TrainReport report;
    report.model = model;
    report.dataset = data->name;
    report.seed = cfg.seed;
    report.config = cfg;

    // Evaluation-mode forward: loss + metrics + per-layer matching degree.
    const auto evaluate = [&](std::int32_t epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        DenseMatrix logits;
        if (is_pcgcn) {
            ForwardCache fc =
                pcgcn_forward(*data, adj, params, cfg, split.train, false, drop_rng, match_rng);
            rec.match_degree = match_degrees(fc, data->labels);
            rec.train_loss = total_loss(fc, data->labels, split.train, cfg);
            logits = std::move(fc.logits);
        } else if (model == "gcn") {
            BaselineCache bc = gcn_forward(*data, adj, params, cfg, false, drop_rng);
            rec.train_loss =
                ops::masked_cross_entropy(bc.logits, data->labels, split.train, cfg.mean_reduction);
            logits = std::move(bc.logits);
        } else {
            BaselineCache bc = mlp_forward(*data, params, cfg, false, drop_rng);
            rec.train_loss =
                ops::masked_cross_entropy(bc.logits, data->labels, split.train, cfg.mean_reduction);
            logits = std::move(bc.logits);
        }
        rec.train_acc = evaluate_accuracy(logits, data->labels, split.train);
        rec.val_acc = evaluate_accuracy(logits, data->labels, split.val);
        rec.test_acc = evaluate_accuracy(logits, data->labels, split.test);
        return std::pair<EpochRecord, DenseMatrix>(std::move(rec), std::move(logits));
    };

    const auto t0 = std::chrono::steady_clock::now();

    auto [rec0, logits0] = evaluate(0);
    report.best_epoch = 0;
    report.best_val_acc = rec0.val_acc;
    report.test_acc_at_best = rec0.test_acc;
    report.best_logits = std::move(logits0);
    report.best_params = params;
    report.epochs.push_back(std::move(rec0));

    for (std::int32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double loss = 0.0;
        if (is_pcgcn) {
            ForwardCache fc =
                pcgcn_forward(*data, adj, params, cfg, split.train, true, drop_rng, match_rng);
            loss = total_loss(fc, data->labels, split.train, cfg);
            if (!std::isfinite(loss)) {
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      ": loss is not finite");
            }
            pcgcn_backward(*data, adj, params, cfg, split.train, fc);
        } else {
            const bool use_graph = model == "gcn";
            BaselineCache bc = use_graph ? gcn_forward(*data, adj, params, cfg, true, drop_rng)
                                         : mlp_forward(*data, params, cfg, true, drop_rng);
            loss =
                ops::masked_cross_entropy(bc.logits, data->labels, split.train, cfg.mean_reduction);
            if (!std::isfinite(loss)) {
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      ": loss is not finite");
            }
            baseline_backward(*data, use_graph ? &adj : nullptr, params, cfg, split.train, bc);
        }
        optimizer.step();

        auto [rec, logits] = evaluate(epoch);
        rec.train_loss = loss; // report the training-mode loss for the epoch
        const double val = rec.val_acc;
        const double test = rec.test_acc;
        report.epochs.push_back(std::move(rec));
        if (val > report.best_val_acc) {
            report.best_val_acc = val;
            report.best_epoch = epoch;
            report.test_acc_at_best = test;
            report.best_logits = std::move(logits);
            report.best_params = params;
        } else if (epoch - report.best_epoch >= cfg.patience) {
            break;
        }
    }

    report.train_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

BucketReport finalize(BucketReport rep) {
    rep.accuracy.resize(rep.counts.size(), 0.0);
    for (std::size_t b = 0; b < rep.counts.size(); ++b) {
        rep.accuracy[b] = rep.counts[b] ? double(rep.correct[b]) / double(rep.counts[b]) : 0.0;
    }
    return rep;
}

} // namespace

BucketReport bucket_by_homophily(const DenseMatrix& logits, const DatasetBundle& bundle,
                                 const std::vector<bool>& mask, std::int32_t num_buckets) {
    if (num_buckets < 1) throw ConfigError("bucket_by_homophily: need at least one bucket");
    const HomophilyReport hom = node_homophily(bundle.graph, bundle.labels);
    std::vector<bool> excluded(static_cast<std::size_t>(bundle.num_nodes()), false);
    for (const std::int32_t i : hom.excluded_nodes) excluded[static_cast<std::size_t>(i)] = true;

    BucketReport rep;
    const double width = 1.0 / double(num_buckets);
    for (std::int32_t b = 0; b < num_buckets; ++b) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.1f-%.1f", double(b) * width, double(b + 1) * width);
        rep.names.push_back(buf);
    }
    rep.names.push_back("undefined");
    rep.counts.assign(rep.names.size(), 0);
    rep.correct.assign(rep.names.size(), 0);

    const auto c = static_cast<std::int32_t>(logits.cols);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i] || bundle.labels.labels[i] == kUnlabeled) continue;
        std::size_t b;
        if (excluded[i]) {
            b = static_cast<std::size_t>(num_buckets);
        } else {
            const auto idx = static_cast<std::int32_t>(hom.node_ratios[i] / width);
            b = static_cast<std::size_t>(std::min(idx, num_buckets - 1));
        }
        ++rep.counts[b];
        if (ops::argmax_row(logits.row(i), c) == bundle.labels.labels[i]) ++rep.correct[b];
    }
    return finalize(std::move(rep));
}

BucketReport bucket_by_sld(const DenseMatrix& logits, const DatasetBundle& bundle,
                           const SplitSpec& split, const std::vector<bool>& mask) {
    const std::vector<std::int32_t> sld =
        shortest_label_distance(bundle.graph, bundle.labels, split.train);
    BucketReport rep;
    rep.names = {"1", "2", "3", ">=4", "unreachable"};
    rep.counts.assign(rep.names.size(), 0);
    rep.correct.assign(rep.names.size(), 0);
    const auto c = static_cast<std::int32_t>(logits.cols);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i] || bundle.labels.labels[i] == kUnlabeled) continue;
        std::size_t b;
        if (sld[i] == kUnreachable) {
            b = 4;
        } else if (sld[i] >= 4) {
            b = 3;
        } else if (sld[i] <= 1) {
            b = 0;
        } else {
            b = static_cast<std::size_t>(sld[i] - 1);
        }
        ++rep.counts[b];
        if (ops::argmax_row(logits.row(i), c) == bundle.labels.labels[i]) ++rep.correct[b];
    }
    return finalize(std::move(rep));
}

} // namespace pcgcn
