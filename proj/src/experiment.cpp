#include "pcgcn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>

#include "pcgcn/errors.hpp"
#include "pcgcn/rng.hpp"

namespace pcgcn {

void ExperimentSpec::validate() const {
    static const std::set<std::string> kinds{"main",            "label-budget", "missing-class",
                                             "partial-control", "ablation",     "match-oracle"};
    if (!kinds.count(kind)) throw ConfigError("config: unknown experiment kind '" + kind + "'");
    if (model != "pcgcn" && model != "gcn" && model != "mlp") {
        throw ConfigError("config: unknown model '" + model + "'");
    }
    if (replicates < 1) throw ConfigError("config: replicates must be >= 1");
    if (kind == "label-budget") {
        if (budgets.empty()) throw ConfigError("config: label-budget needs a budget list");
        for (const std::int32_t b : budgets) {
            if (b < 1) throw ConfigError("config: budgets must be positive");
        }
    }
    if (kind == "partial-control") {
        if (!(control_fraction >= 0.0 && control_fraction <= 1.0)) {
            throw ConfigError("config: control_fraction must be in [0, 1]");
        }
        for (const std::string& r : control_rules) {
            if (r != "random" && r != "min-degree" && r != "max-degree") {
                throw ConfigError("config: unknown control rule '" + r + "'");
            }
        }
        if (model != "pcgcn") {
            throw ConfigError("config: partial-control applies to the pcgcn model only");
        }
    }
    if (kind == "match-oracle") {
        if (rho_grid.empty()) throw ConfigError("config: match-oracle needs a rho grid");
        for (const double r : rho_grid) {
            if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("config: rho values must be in [0, 1]");
        }
        if (model != "pcgcn") {
            throw ConfigError("config: match-oracle applies to the pcgcn model only");
        }
    }
    config.validate();
}

namespace {

// Train-mask override for the label-budget protocol: k labeled nodes per
// class to train, the remainder split val/test in the original 32:20
// proportion of the default ratios.
SplitSpec budget_split(const LabelSet& labels, std::int32_t k, std::uint64_t seed) {
    const std::size_t n = labels.labels.size();
    SplitSpec s;
    s.seed = seed;
    s.ratios = {0.0, 0.32 / 0.52, 0.20 / 0.52}; // recorded for reference
    s.train.assign(n, false);
    s.val.assign(n, false);
    s.test.assign(n, false);
    for (std::int32_t c = 0; c < labels.num_classes; ++c) {
        std::vector<std::int32_t> ids;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels.labels[i] == c) ids.push_back(static_cast<std::int32_t>(i));
        }
        Rng rng = Rng::derive(seed, "budget:c" + std::to_string(c));
        rng.shuffle(ids);
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), ids.size());
        const std::size_t rest = ids.size() - take;
        const auto n_val = static_cast<std::size_t>(std::floor(double(rest) * 0.32 / 0.52));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto id = static_cast<std::size_t>(ids[i]);
            if (i < take) {
                s.train[id] = true;
            } else if (i < take + n_val) {
                s.val[id] = true;
            } else {
                s.test[id] = true;
            }
        }
    }
    return s;
}

std::vector<bool> partial_control_mask(const Graph& g, const std::string& rule, double fraction,
                                       std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(g.num_nodes);
    std::vector<std::int32_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int32_t>(i);
    if (rule == "random") {
        Rng rng = Rng::derive(seed, "control:random");
        rng.shuffle(ids);
    } else {
        const bool ascending = rule == "min-degree";
        std::sort(ids.begin(), ids.end(), [&g, ascending](std::int32_t a, std::int32_t b) {
            const std::int32_t da = g.degree(a), db = g.degree(b);
            if (da != db) return ascending ? da < db : da > db;
            return a < b; // degree ties -> lowest node id first
        });
    }
    std::vector<bool> mask(n, true);
    const auto k = static_cast<std::size_t>(std::llround(fraction * double(n)));
    for (std::size_t i = 0; i < k && i < n; ++i) {
        mask[static_cast<std::size_t>(ids[i])] = false;
    }
    return mask;
}

using CellSetup = std::function<void(PCGCNConfig&, SplitSpec&, std::uint64_t)>;

ExperimentRow run_cell(const DatasetBundle& bundle, const ExperimentSpec& spec,
                       const std::string& variant, const CellSetup& setup) {
    ExperimentRow row;
    row.dataset = bundle.name;
    row.model = spec.model;
    row.kind = spec.kind;
    row.variant = variant;
    std::vector<double> accs;
    for (std::int32_t r = 0; r < spec.replicates; ++r) {
        const std::uint64_t seed = spec.config.seed + static_cast<std::uint64_t>(r);
        PCGCNConfig cfg = spec.config;
        cfg.seed = seed;
        SplitSpec split = make_splits(bundle.labels, {0.48, 0.32, 0.20}, seed);
        if (setup) setup(cfg, split, seed);
        TrainReport rep = train(bundle, split, cfg, spec.model);
        accs.push_back(rep.test_acc_at_best);
        row.hom_buckets.push_back(bucket_by_homophily(rep.best_logits, bundle, split.test));
        row.sld_buckets.push_back(bucket_by_sld(rep.best_logits, bundle, split, split.test));
        row.reports.push_back(std::move(rep));
    }
    row.n_runs = static_cast<std::int32_t>(accs.size());
    double mean = 0.0;
    for (const double a : accs) mean += a;
    mean /= double(accs.size());
    double var = 0.0;
    for (const double a : accs) var += (a - mean) * (a - mean);
    row.mean = mean;
    row.stddev = accs.size() > 1 ? std::sqrt(var / double(accs.size() - 1)) : 0.0;
    return row;
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

ExperimentResult run_experiment(const DatasetBundle& bundle, const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult result;

    if (spec.kind == "main") {
        result.rows.push_back(run_cell(bundle, spec, "main", nullptr));
    } else if (spec.kind == "label-budget") {
        for (const std::int32_t k : spec.budgets) {
            result.rows.push_back(run_cell(
                bundle, spec, "budget=" + std::to_string(k),
                [&bundle, k](PCGCNConfig&, SplitSpec& split, std::uint64_t seed) {
                    split = budget_split(bundle.labels, k, seed);
                }));
        }
    } else if (spec.kind == "missing-class") {
        result.rows.push_back(run_cell(bundle, spec, "mask=none", nullptr));
        for (std::int32_t c = 0; c < bundle.num_classes(); ++c) {
            result.rows.push_back(run_cell(
                bundle, spec, "mask=" + std::to_string(c),
                [&bundle, c](PCGCNConfig&, SplitSpec& split, std::uint64_t) {
                    split = mask_classes(bundle.labels, split, {c});
                }));
        }
    } else if (spec.kind == "partial-control") {
        result.rows.push_back(run_cell(bundle, spec, "control=full", nullptr));
        for (const std::string& rule : spec.control_rules) {
            result.rows.push_back(run_cell(
                bundle, spec, "control=" + rule,
                [&bundle, &spec, rule](PCGCNConfig& cfg, SplitSpec&, std::uint64_t seed) {
                    cfg.control_mask =
                        partial_control_mask(bundle.graph, rule, spec.control_fraction, seed);
                }));
        }
    } else if (spec.kind == "ablation") {
        result.rows.push_back(run_cell(bundle, spec, "ablate=none", nullptr));
        const std::vector<std::string> flags{"hom_p", "het_p", "mp", "cl"};
        for (const std::string& flag : flags) {
            result.rows.push_back(
                run_cell(bundle, spec, "ablate=" + flag,
                         [flag](PCGCNConfig& cfg, SplitSpec&, std::uint64_t) {
                             if (flag == "hom_p") cfg.ablate_hom_p = true;
                             if (flag == "het_p") cfg.ablate_het_p = true;
                             if (flag == "mp") cfg.ablate_mp = true;
                             if (flag == "cl") cfg.ablate_cl = true;
                         }));
        }
    } else { // match-oracle
        for (const double rho : spec.rho_grid) {
            result.rows.push_back(run_cell(bundle, spec, "rho=" + format_g(rho),
                                           [rho](PCGCNConfig& cfg, SplitSpec&, std::uint64_t) {
                                               cfg.rho = rho;
                                           }));
        }
    }
    return result;
}

void write_experiment_csv(const ExperimentResult& result, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << "dataset,model,kind,variant,mean,std,n_runs\n";
    for (const ExperimentRow& row : result.rows) {
        out << row.dataset << ',' << row.model << ',' << row.kind << ',' << row.variant << ','
            << format_g(row.mean) << ',' << format_g(row.stddev) << ',' << row.n_runs << '\n';
    }
}

void write_bucket_csv(const ExperimentResult& result, const std::filesystem::path& file,
                      bool sld) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << "dataset,model,kind,variant,seed,bucket,count,correct,accuracy\n";
    for (const ExperimentRow& row : result.rows) {
        const auto& buckets = sld ? row.sld_buckets : row.hom_buckets;
        for (std::size_t r = 0; r < buckets.size(); ++r) {
            const BucketReport& rep = buckets[r];
            for (std::size_t b = 0; b < rep.names.size(); ++b) {
                out << row.dataset << ',' << row.model << ',' << row.kind << ',' << row.variant
                    << ',' << row.reports[r].seed << ',' << rep.names[b] << ',' << rep.counts[b]
                    << ',' << rep.correct[b] << ',' << format_g(rep.accuracy[b]) << '\n';
            }
        }
    }
}

} // namespace pcgcn
