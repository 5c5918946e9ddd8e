#include "pcgcn/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pcgcn/errors.hpp"

namespace pcgcn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = first + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ConfigError("bad value '" + value + "' for key '" + key + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ConfigError("bad value '" + value + "' for key '" + key +
                      "' (want 0/1/true/false)");
}

std::vector<std::string> split_csv(const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

} // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    PCGCNConfig& m = cfg.model_cfg;
    if (key == "dropout") {
        m.dropout = parse_number<double>(key, value);
    } else if (key == "hid") {
        m.hidden = parse_number<std::int32_t>(key, value);
    } else if (key == "layers") {
        m.layers = parse_number<std::int32_t>(key, value);
    } else if (key == "lr") {
        m.lr = parse_number<double>(key, value);
    } else if (key == "wd") {
        m.wd = parse_number<double>(key, value);
    } else if (key == "lambda") {
        m.lambda = parse_number<double>(key, value);
    } else if (key == "beta") {
        m.beta = parse_number<double>(key, value);
    } else if (key == "tau") {
        m.tau = parse_number<double>(key, value);
    } else if (key == "epochs") {
        m.epochs = parse_number<std::int32_t>(key, value);
    } else if (key == "patience") {
        m.patience = parse_number<std::int32_t>(key, value);
    } else if (key == "seed") {
        m.seed = parse_number<std::uint64_t>(key, value);
        cfg.synth.seed = m.seed;
    } else if (key == "rho") {
        m.rho = parse_number<double>(key, value);
    } else if (key == "ablate") {
        m.ablate_hom_p = m.ablate_het_p = m.ablate_mp = m.ablate_cl = false;
        if (value == "hom_p") {
            m.ablate_hom_p = true;
        } else if (value == "het_p") {
            m.ablate_het_p = true;
        } else if (value == "mp") {
            m.ablate_mp = true;
        } else if (value == "cl") {
            m.ablate_cl = true;
        } else if (value != "none") {
            throw ConfigError("bad value '" + value +
                              "' for key 'ablate' (want none|hom_p|het_p|mp|cl)");
        }
    } else if (key == "tie_transforms") {
        m.tie_transforms = parse_bool(key, value);
    } else if (key == "consistency_on") {
        if (value == "s") {
            m.consistency_on_s_tilde = false;
        } else if (value == "s_tilde") {
            m.consistency_on_s_tilde = true;
        } else {
            throw ConfigError("bad value '" + value +
                              "' for key 'consistency_on' (want s|s_tilde)");
        }
    } else if (key == "mean_reduction") {
        m.mean_reduction = parse_bool(key, value);
    } else if (key == "row_normalize") {
        m.row_normalize = parse_bool(key, value);
    } else if (key == "dataset") {
        cfg.dataset = value;
    } else if (key == "model") {
        if (value != "pcgcn" && value != "gcn" && value != "mlp") {
            throw ConfigError("bad value '" + value +
                              "' for key 'model' (want pcgcn|gcn|mlp)");
        }
        cfg.model = value;
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "kind") {
        cfg.kind = value;
    } else if (key == "replicates") {
        cfg.replicates = parse_number<std::int32_t>(key, value);
    } else if (key == "budgets") {
        cfg.budgets.clear();
        for (const std::string& item : split_csv(value)) {
            cfg.budgets.push_back(parse_number<std::int32_t>(key, item));
        }
    } else if (key == "rules") {
        cfg.rules = split_csv(value);
    } else if (key == "control_fraction") {
        cfg.control_fraction = parse_number<double>(key, value);
    } else if (key == "rho_grid") {
        cfg.rho_grid.clear();
        for (const std::string& item : split_csv(value)) {
            cfg.rho_grid.push_back(parse_number<double>(key, item));
        }
    } else if (key == "n") {
        cfg.synth.n = parse_number<std::int32_t>(key, value);
    } else if (key == "c") {
        cfg.synth.c = parse_number<std::int32_t>(key, value);
    } else if (key == "f") {
        cfg.synth.f = parse_number<std::int32_t>(key, value);
    } else if (key == "h") {
        cfg.synth.target_homophily = parse_number<double>(key, value);
    } else if (key == "mean_degree") {
        cfg.synth.mean_degree = parse_number<double>(key, value);
    } else if (key == "feature_separation") {
        cfg.synth.feature_separation = parse_number<double>(key, value);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not key=value");
    }
    apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto ws = line.find_first_of(" \t");
        if (ws == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": missing value for key '" + line + "'");
        }
        try {
            apply_setting(cfg, line.substr(0, ws), trim(line.substr(ws + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    RunConfig cfg;
    apply_config_file(cfg, path);
    return cfg;
}

ExperimentSpec experiment_spec_from(const RunConfig& cfg) {
    ExperimentSpec spec;
    spec.kind = cfg.kind;
    spec.model = cfg.model;
    spec.replicates = cfg.replicates;
    spec.budgets = cfg.budgets;
    spec.control_rules = cfg.rules;
    spec.control_fraction = cfg.control_fraction;
    spec.rho_grid = cfg.rho_grid;
    spec.config = cfg.model_cfg;
    return spec;
}

} // namespace pcgcn
