#include "pcgcn/checkpoint.hpp"

#include <fstream>

#include "pcgcn/errors.hpp"

namespace pcgcn {

using nlohmann::json;

json config_to_json(const PCGCNConfig& cfg) {
    json j;
    j["layers"] = cfg.layers;
    j["hid"] = cfg.hidden;
    j["dropout"] = cfg.dropout;
    j["lr"] = cfg.lr;
    j["wd"] = cfg.wd;
    j["lambda"] = cfg.lambda;
    j["beta"] = cfg.beta;
    j["tau"] = cfg.tau;
    j["epochs"] = cfg.epochs;
    j["patience"] = cfg.patience;
    j["seed"] = cfg.seed;
    j["rho"] = cfg.rho;
    j["ablate_hom_p"] = cfg.ablate_hom_p;
    j["ablate_het_p"] = cfg.ablate_het_p;
    j["ablate_mp"] = cfg.ablate_mp;
    j["ablate_cl"] = cfg.ablate_cl;
    j["tie_transforms"] = cfg.tie_transforms;
    j["consistency_on_s_tilde"] = cfg.consistency_on_s_tilde;
    j["mean_reduction"] = cfg.mean_reduction;
    j["row_normalize"] = cfg.row_normalize;
    if (!cfg.control_mask.empty()) {
        std::vector<std::int64_t> uncontrolled;
        for (std::size_t i = 0; i < cfg.control_mask.size(); ++i) {
            if (!cfg.control_mask[i]) uncontrolled.push_back(static_cast<std::int64_t>(i));
        }
        j["num_nodes"] = cfg.control_mask.size();
        j["uncontrolled"] = uncontrolled;
    }
    return j;
}

PCGCNConfig config_from_json(const json& j) {
    PCGCNConfig cfg;
    try {
        cfg.layers = j.at("layers").get<std::int32_t>();
        cfg.hidden = j.at("hid").get<std::int32_t>();
        cfg.dropout = j.at("dropout").get<double>();
        cfg.lr = j.at("lr").get<double>();
        cfg.wd = j.at("wd").get<double>();
        cfg.lambda = j.at("lambda").get<double>();
        cfg.beta = j.at("beta").get<double>();
        cfg.tau = j.at("tau").get<double>();
        cfg.epochs = j.at("epochs").get<std::int32_t>();
        cfg.patience = j.at("patience").get<std::int32_t>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.rho = j.at("rho").get<double>();
        cfg.ablate_hom_p = j.at("ablate_hom_p").get<bool>();
        cfg.ablate_het_p = j.at("ablate_het_p").get<bool>();
        cfg.ablate_mp = j.at("ablate_mp").get<bool>();
        cfg.ablate_cl = j.at("ablate_cl").get<bool>();
        cfg.tie_transforms = j.at("tie_transforms").get<bool>();
        cfg.consistency_on_s_tilde = j.at("consistency_on_s_tilde").get<bool>();
        cfg.mean_reduction = j.at("mean_reduction").get<bool>();
        cfg.row_normalize = j.at("row_normalize").get<bool>();
        if (j.contains("uncontrolled")) {
            cfg.control_mask.assign(j.at("num_nodes").get<std::size_t>(), true);
            for (const auto& v : j.at("uncontrolled")) {
                cfg.control_mask[v.get<std::size_t>()] = false;
            }
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("config json: ") + e.what());
    }
    return cfg;
}

namespace {

json param_to_json(const Parameter& p) {
    return json{{"name", p.name},
                {"rows", p.value.rows},
                {"cols", p.value.cols},
                {"values", p.value.values}};
}

Parameter param_from_json(const json& j) {
    Parameter p(j.at("name").get<std::string>(), j.at("rows").get<std::size_t>(),
                j.at("cols").get<std::size_t>());
    const auto vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != p.value.size()) {
        throw DataError("checkpoint: value count mismatch for parameter " + p.name);
    }
    p.value.values = vals;
    return p;
}

} // namespace

void save_checkpoint(const ModelParams& params, const PCGCNConfig& cfg,
                     const std::filesystem::path& file) {
    json j;
    j["config"] = config_to_json(cfg);
    json plist = json::array();
    const auto add = [&plist](const Parameter& p) {
        if (p.value.size() > 0) plist.push_back(param_to_json(p));
    };
    add(params.in_w);
    add(params.in_b);
    if (!params.tied) {
        add(params.proto_w);
        add(params.proto_b);
    }
    for (const Parameter& w : params.layer_w) add(w);
    for (const Parameter& al : params.alpha) add(al);
    add(params.cls_w);
    add(params.cls_b);
    add(params.free_protos);
    j["params"] = std::move(plist);
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(file.string() + ": " + e.what());
    }
    Checkpoint ck;
    ck.config = config_from_json(j.at("config"));
    ck.params.tied = ck.config.tie_transforms;
    try {
        for (const json& pj : j.at("params")) {
            Parameter p = param_from_json(pj);
            const std::string& name = p.name;
            if (name == "in_w") {
                ck.params.in_w = std::move(p);
            } else if (name == "in_b") {
                ck.params.in_b = std::move(p);
            } else if (name == "proto_w") {
                ck.params.proto_w = std::move(p);
            } else if (name == "proto_b") {
                ck.params.proto_b = std::move(p);
            } else if (name == "cls_w") {
                ck.params.cls_w = std::move(p);
            } else if (name == "cls_b") {
                ck.params.cls_b = std::move(p);
            } else if (name == "free_protos") {
                ck.params.free_protos = std::move(p);
            } else if (name.rfind("layer_w", 0) == 0) {
                const auto idx = static_cast<std::size_t>(std::stoul(name.substr(7)));
                if (ck.params.layer_w.size() <= idx) ck.params.layer_w.resize(idx + 1);
                ck.params.layer_w[idx] = std::move(p);
            } else if (name.rfind("alpha", 0) == 0) {
                const auto idx = static_cast<std::size_t>(std::stoul(name.substr(5)));
                if (ck.params.alpha.size() <= idx) ck.params.alpha.resize(idx + 1);
                ck.params.alpha[idx] = std::move(p);
            } else {
                throw DataError("checkpoint: unknown parameter '" + name + "'");
            }
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    return ck;
}

json report_to_json(const TrainReport& report) {
    json j;
    j["model"] = report.model;
    j["dataset"] = report.dataset;
    j["seed"] = report.seed;
    j["config"] = config_to_json(report.config);
    j["best_epoch"] = report.best_epoch;
    j["best_val_accuracy"] = report.best_val_acc;
    j["test_accuracy"] = report.test_acc_at_best;
    j["train_time_sec"] = report.train_time_sec;
    json epochs = json::array();
    for (const EpochRecord& r : report.epochs) {
        json e;
        e["epoch"] = r.epoch;
        e["train_loss"] = r.train_loss;
        e["train_acc"] = r.train_acc;
        e["val_acc"] = r.val_acc;
        e["test_acc"] = r.test_acc;
        if (!r.match_degree.empty()) e["match_degree"] = r.match_degree;
        epochs.push_back(std::move(e));
    }
    j["epochs"] = std::move(epochs);
    return j;
}

json experiment_to_json(const ExperimentResult& result) {
    json rows = json::array();
    for (const ExperimentRow& row : result.rows) {
        json r;
        r["dataset"] = row.dataset;
        r["model"] = row.model;
        r["kind"] = row.kind;
        r["variant"] = row.variant;
        r["mean"] = row.mean;
        r["std"] = row.stddev;
        r["n_runs"] = row.n_runs;
        json runs = json::array();
        for (const TrainReport& rep : row.reports) runs.push_back(report_to_json(rep));
        r["runs"] = std::move(runs);
        rows.push_back(std::move(r));
    }
    return json{{"rows", std::move(rows)}};
}

} // namespace pcgcn
