#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcgcn/checkpoint.hpp"
#include "pcgcn/config.hpp"
#include "pcgcn/errors.hpp"
#include "pcgcn/experiment.hpp"
#include "pcgcn/graph.hpp"
#include "pcgcn/train.hpp"

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// A bundle argument is either a dataset directory or a `.synth` recipe file
/// (same key-value format as configs; only the generator keys matter).
pcgcn::DatasetBundle load_bundle(const std::string& path) {
    if (path.empty()) throw pcgcn::ConfigError("no dataset configured (key 'dataset')");
    const fs::path p(path);
    if (p.extension() == ".synth") {
        pcgcn::RunConfig rc;
        pcgcn::apply_config_file(rc, p);
        pcgcn::DatasetBundle bundle = pcgcn::generate_synthetic(rc.synth);
        bundle.name = p.stem().string();
        return bundle;
    }
    return pcgcn::load_dataset(p);
}

void write_json(const nlohmann::json& j, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw pcgcn::DataError("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

int cmd_train(const pcgcn::RunConfig& rc) {
    const pcgcn::DatasetBundle bundle = load_bundle(rc.dataset);
    const pcgcn::SplitSpec split =
        pcgcn::make_splits(bundle.labels, {0.48, 0.32, 0.20}, rc.model_cfg.seed);
    const pcgcn::TrainReport report = pcgcn::train(bundle, split, rc.model_cfg, rc.model);
    fs::create_directories(rc.out);
    write_json(pcgcn::report_to_json(report), fs::path(rc.out) / "report.json");
    pcgcn::save_checkpoint(report.best_params, report.config, fs::path(rc.out) / "model.ckpt");
    std::cout << "model " << report.model << " dataset " << report.dataset << " seed "
              << report.seed << '\n';
    std::cout << "best_epoch " << report.best_epoch << " val_accuracy "
              << fmt(report.best_val_acc) << " test_accuracy " << fmt(report.test_acc_at_best)
              << '\n';
    return 0;
}

int cmd_experiment(const pcgcn::RunConfig& rc) {
    const pcgcn::DatasetBundle bundle = load_bundle(rc.dataset);
    const pcgcn::ExperimentSpec spec = pcgcn::experiment_spec_from(rc);
    const pcgcn::ExperimentResult result = pcgcn::run_experiment(bundle, spec);
    fs::create_directories(rc.out);
    pcgcn::write_experiment_csv(result, fs::path(rc.out) / "results.csv");
    pcgcn::write_bucket_csv(result, fs::path(rc.out) / "buckets_homophily.csv", false);
    pcgcn::write_bucket_csv(result, fs::path(rc.out) / "buckets_sld.csv", true);
    write_json(pcgcn::experiment_to_json(result), fs::path(rc.out) / "results.json");
    for (const pcgcn::ExperimentRow& row : result.rows) {
        std::cout << row.dataset << ' ' << row.model << ' ' << row.kind << ' ' << row.variant
                  << " mean " << fmt(row.mean) << " std " << fmt(row.stddev) << " n "
                  << row.n_runs << '\n';
    }
    return 0;
}

int cmd_analyze(const std::string& sub, const std::string& path, std::uint64_t seed,
                const std::string& csv_out) {
    const pcgcn::DatasetBundle bundle = load_bundle(path);
    if (sub == "homophily") {
        const pcgcn::HomophilyReport rep = pcgcn::node_homophily(bundle.graph, bundle.labels);
        std::cout << "edge_homophily " << fmt(rep.edge_ratio) << '\n';
        std::cout << "node_homophily_mean " << fmt(rep.graph_mean) << '\n';
        std::cout << "excluded_nodes " << rep.excluded_nodes.size() << '\n';
        if (!csv_out.empty()) {
            std::ofstream out(csv_out);
            if (!out) throw pcgcn::DataError("cannot write " + csv_out);
            std::vector<bool> excluded(static_cast<std::size_t>(bundle.num_nodes()), false);
            for (const std::int32_t node : rep.excluded_nodes) excluded[node] = true;
            out << "node,label,homophily,excluded\n";
            for (std::int32_t i = 0; i < bundle.num_nodes(); ++i) {
                out << i << ',' << bundle.labels.labels[i] << ',' << fmt(rep.node_ratios[i])
                    << ',' << (excluded[i] ? 1 : 0) << '\n';
            }
        }
        return 0;
    }
    // sld: distances are measured against the train mask of the seed's split.
    const pcgcn::SplitSpec split = pcgcn::make_splits(bundle.labels, {0.48, 0.32, 0.20}, seed);
    const std::vector<std::int32_t> dist =
        pcgcn::shortest_label_distance(bundle.graph, bundle.labels, split.train);
    std::int64_t unreachable = 0, labeled = 0, reachable = 0;
    double total = 0.0;
    std::vector<std::int64_t> hist;
    for (std::int32_t i = 0; i < bundle.num_nodes(); ++i) {
        if (bundle.labels.labels[i] == pcgcn::kUnlabeled) continue;
        ++labeled;
        if (dist[i] == pcgcn::kUnreachable) {
            ++unreachable;
            continue;
        }
        ++reachable;
        total += dist[i];
        if (hist.size() <= static_cast<std::size_t>(dist[i])) hist.resize(dist[i] + 1, 0);
        ++hist[dist[i]];
    }
    std::cout << "labeled_nodes " << labeled << '\n';
    std::cout << "sld_mean " << fmt(reachable > 0 ? total / reachable : 0.0) << '\n';
    for (std::size_t d = 0; d < hist.size(); ++d) {
        std::cout << "sld_" << d << ' ' << hist[d] << '\n';
    }
    std::cout << "sld_unreachable " << unreachable << '\n';
    if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        if (!out) throw pcgcn::DataError("cannot write " + csv_out);
        out << "node,label,distance\n";
        for (std::int32_t i = 0; i < bundle.num_nodes(); ++i) {
            out << i << ',' << bundle.labels.labels[i] << ',' << dist[i] << '\n';
        }
    }
    return 0;
}

int cmd_synth(const pcgcn::RunConfig& rc) {
    pcgcn::DatasetBundle bundle = pcgcn::generate_synthetic(rc.synth);
    bundle.name = fs::path(rc.out).filename().string();
    pcgcn::save_dataset(bundle, rc.out);
    const pcgcn::HomophilyReport rep = pcgcn::node_homophily(bundle.graph, bundle.labels);
    std::cout << "wrote " << rc.out << " nodes " << bundle.num_nodes() << " edges "
              << bundle.graph.num_edges() << " classes " << bundle.num_classes() << '\n';
    std::cout << "edge_homophily " << fmt(rep.edge_ratio) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pinning-control steered graph convolution"};
    app.require_subcommand(1);

    std::string config_path, model, out, analyze_sub, bundle_path, csv_out;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;

    const auto add_common = [&](CLI::App* cmd, bool with_model) {
        cmd->add_option("--config", config_path, "key-value config file");
        cmd->add_option("--set", sets, "override, key=value, repeatable");
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_option("--out", out, "output directory");
        if (with_model) cmd->add_option("--model", model, "pcgcn, gcn, or mlp");
    };

    CLI::App* tr = app.add_subcommand("train", "train one model; writes report.json + model.ckpt");
    add_common(tr, true);
    CLI::App* ex =
        app.add_subcommand("experiment", "replicated protocol; writes CSV + JSON tables");
    add_common(ex, true);
    CLI::App* an = app.add_subcommand("analyze", "homophily / label-distance statistics");
    an->add_option("sub", analyze_sub, "homophily or sld")
        ->required()
        ->check(CLI::IsMember({"homophily", "sld"}));
    an->add_option("bundle", bundle_path, "dataset directory or .synth file")->required();
    an->add_option("--seed", seed, "split seed for sld");
    an->add_option("--out", csv_out, "per-node CSV path");
    CLI::App* sy = app.add_subcommand("synth", "generate and save a synthetic bundle");
    add_common(sy, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* cmd = app.get_subcommands().front();
    try {
        if (cmd == an) return cmd_analyze(analyze_sub, bundle_path, seed, csv_out);
        pcgcn::RunConfig rc;
        if (cmd->count("--config") > 0) pcgcn::apply_config_file(rc, config_path);
        for (const std::string& s : sets) pcgcn::apply_override(rc, s);
        const CLI::Option* model_opt = cmd->get_option_no_throw("--model");
        if (model_opt != nullptr && model_opt->count() > 0) pcgcn::apply_setting(rc, "model", model);
        if (cmd->count("--seed") > 0) pcgcn::apply_setting(rc, "seed", std::to_string(seed));
        if (cmd->count("--out") > 0) rc.out = out;
        if (cmd == tr) return cmd_train(rc);
        if (cmd == ex) return cmd_experiment(rc);
        return cmd_synth(rc);
    } catch (const pcgcn::ConfigError& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
    } catch (const pcgcn::DataError& e) {
        std::cerr << "error: data: " << e.what() << '\n';
        return 3;
    } catch (const pcgcn::DivergenceError& e) {
        std::cerr << "error: divergence: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
}
