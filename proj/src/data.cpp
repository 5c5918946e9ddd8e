#include "pcgcn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "pcgcn/errors.hpp"
#include "pcgcn/rng.hpp"

namespace pcgcn {
namespace {

std::ifstream open_or_throw(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    return in;
}

[[noreturn]] void line_error(const std::filesystem::path& file, std::size_t line,
                             const std::string& what) {
    throw DataError(file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

bool parse_int(const char*& p, long& out) {
    char* end = nullptr;
    out = std::strtol(p, &end, 10);
    if (end == p) return false;
    p = end;
    return true;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

DatasetBundle load_dataset(const std::filesystem::path& dir) {
    DatasetBundle b;
    b.name = dir.filename().string();

    const auto labels_path = dir / "labels.txt";
    {
        std::ifstream in = open_or_throw(labels_path);
        std::string line;
        std::size_t lineno = 0;
        std::int32_t max_label = -1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() && in.peek() == EOF) break;
            const char* p = line.c_str();
            long v = 0;
            if (!parse_int(p, v)) line_error(labels_path, lineno, "expected an integer label");
            while (*p == ' ' || *p == '\r') ++p;
            if (*p != '\0') line_error(labels_path, lineno, "trailing characters after label");
            if (v < -1) line_error(labels_path, lineno, "label must be >= -1");
            b.labels.labels.push_back(static_cast<std::int32_t>(v));
            max_label = std::max(max_label, static_cast<std::int32_t>(v));
        }
        if (b.labels.labels.empty()) throw DataError(labels_path.string() + ": no labels");
        if (max_label < 1) throw DataError(labels_path.string() + ": need at least 2 classes");
        b.labels.num_classes = max_label + 1;
    }
    const auto n = static_cast<std::int32_t>(b.labels.labels.size());

    const auto feat_path = dir / "features.csv";
    {
        std::ifstream in = open_or_throw(feat_path);
        std::string line;
        std::size_t lineno = 0;
        std::vector<double> values;
        std::size_t cols = 0, rows = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() && in.peek() == EOF) break;
            std::size_t row_cols = 0;
            const char* p = line.c_str();
            while (true) {
                char* end = nullptr;
                const double v = std::strtod(p, &end);
                if (end == p) line_error(feat_path, lineno, "expected a number");
                if (!std::isfinite(v)) line_error(feat_path, lineno, "non-finite feature value");
                values.push_back(v);
                ++row_cols;
                p = end;
                while (*p == ' ' || *p == '\r') ++p;
                if (*p == '\0') break;
                if (*p != ',') line_error(feat_path, lineno, "expected ',' between values");
                ++p;
            }
            if (rows == 0) {
                cols = row_cols;
            } else if (row_cols != cols) {
                line_error(feat_path, lineno,
                           "expected " + std::to_string(cols) + " columns, got " +
                               std::to_string(row_cols));
            }
            ++rows;
        }
        if (rows != static_cast<std::size_t>(n)) {
            throw DataError(feat_path.filename().string() + ": " + std::to_string(rows) +
                            " rows but labels.txt has " + std::to_string(n));
        }
        b.features.rows = rows;
        b.features.cols = cols;
        b.features.values = std::move(values);
    }

    const auto edges_path = dir / "graph.edges";
    {
        std::ifstream in = open_or_throw(edges_path);
        std::string line;
        std::size_t lineno = 0;
        std::vector<std::pair<std::int32_t, std::int32_t>> edges;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() && in.peek() == EOF) break;
            const char* p = line.c_str();
            long u = 0, v = 0;
            if (!parse_int(p, u) || !parse_int(p, v)) {
                line_error(edges_path, lineno, "expected 'u v' node pair");
            }
            while (*p == ' ' || *p == '\r') ++p;
            if (*p != '\0') line_error(edges_path, lineno, "trailing characters after pair");
            edges.emplace_back(static_cast<std::int32_t>(u), static_cast<std::int32_t>(v));
        }
        try {
            b.graph = build_graph(edges, n);
        } catch (const DataError& e) {
            throw DataError(edges_path.filename().string() + ": " + e.what());
        }
    }
    return b;
}

void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "graph.edges");
        for (std::int32_t i = 0; i < bundle.graph.num_nodes; ++i) {
            for (const std::int32_t j : bundle.graph.neighbors(i)) {
                if (j > i) out << i << ' ' << j << '\n';
            }
        }
    }
    {
        std::ofstream out(dir / "features.csv");
        std::string row;
        for (std::size_t i = 0; i < bundle.features.rows; ++i) {
            row.clear();
            for (std::size_t j = 0; j < bundle.features.cols; ++j) {
                if (j) row += ',';
                row += format_double(bundle.features(i, j));
            }
            row += '\n';
            out << row;
        }
    }
    {
        std::ofstream out(dir / "labels.txt");
        for (const std::int32_t y : bundle.labels.labels) out << y << '\n';
    }
}

SplitSpec make_splits(const LabelSet& labels, std::array<double, 3> ratios, std::uint64_t seed) {
    double sum = 0.0;
    for (const double r : ratios) {
        if (r < 0.0) throw ConfigError("make_splits: negative ratio");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("make_splits: ratios sum to " + format_double(sum) + ", expected 1");
    }
    const std::size_t n = labels.labels.size();
    SplitSpec s;
    s.seed = seed;
    s.ratios = ratios;
    s.train.assign(n, false);
    s.val.assign(n, false);
    s.test.assign(n, false);
    for (std::int32_t c = 0; c < labels.num_classes; ++c) {
        std::vector<std::int32_t> ids;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels.labels[i] == c) ids.push_back(static_cast<std::int32_t>(i));
        }
        if (ids.empty()) continue;
        Rng rng = Rng::derive(seed, "split:c" + std::to_string(c));
        rng.shuffle(ids);
        const auto sz = ids.size();
        const auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * double(sz)));
        const auto n_val = static_cast<std::size_t>(std::floor(ratios[1] * double(sz)));
        for (std::size_t i = 0; i < sz; ++i) {
            const auto id = static_cast<std::size_t>(ids[i]);
            if (i < n_train) {
                s.train[id] = true;
            } else if (i < n_train + n_val) {
                s.val[id] = true;
            } else {
                s.test[id] = true;
            }
        }
    }
    return s;
}

SplitSpec mask_classes(const LabelSet& labels, const SplitSpec& split,
                       const std::vector<std::int32_t>& classes) {
    std::set<std::int32_t> masked;
    for (const std::int32_t c : classes) {
        if (c < 0 || c >= labels.num_classes) {
            throw ConfigError("mask_classes: class " + std::to_string(c) + " out of range");
        }
        masked.insert(c);
    }
    if (static_cast<std::int32_t>(masked.size()) == labels.num_classes) {
        throw ConfigError("mask_classes: cannot mask every class");
    }
    SplitSpec out = split;
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        if (out.train[i] && masked.count(labels.labels[i])) out.train[i] = false;
    }
    return out;
}

DatasetBundle generate_synthetic(const SynthSpec& spec) {
    if (spec.c < 2) throw ConfigError("generate_synthetic: need c >= 2");
    if (spec.n < 2 * spec.c) throw ConfigError("generate_synthetic: need n >= 2c");
    if (spec.f < spec.c) throw ConfigError("generate_synthetic: need f >= c");
    if (spec.target_homophily < 0.0 || spec.target_homophily > 1.0) {
        throw ConfigError("generate_synthetic: target homophily must be in [0, 1]");
    }
    if (spec.mean_degree < 0.0 || spec.mean_degree >= double(spec.n)) {
        throw ConfigError("generate_synthetic: mean degree must be in [0, n)");
    }
    if (spec.feature_separation < 0.0) {
        throw ConfigError("generate_synthetic: feature separation must be nonnegative");
    }

    DatasetBundle b;
    b.name = "synth";
    b.labels.num_classes = spec.c;
    b.labels.labels.resize(static_cast<std::size_t>(spec.n));
    std::vector<std::vector<std::int32_t>> members(static_cast<std::size_t>(spec.c));
    for (std::int32_t i = 0; i < spec.n; ++i) {
        const std::int32_t q = i % spec.c;
        b.labels.labels[static_cast<std::size_t>(i)] = q;
        members[static_cast<std::size_t>(q)].push_back(i);
    }

    Rng edge_rng = Rng::derive(spec.seed, "synth:edges");
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    const double per_node = spec.mean_degree / 2.0;
    const auto base = static_cast<std::int32_t>(std::floor(per_node));
    const double frac = per_node - double(base);
    for (std::int32_t i = 0; i < spec.n; ++i) {
        const std::int32_t q = i % spec.c;
        const auto& mine = members[static_cast<std::size_t>(q)];
        const std::int32_t draws = base + (edge_rng.uniform() < frac ? 1 : 0);
        for (std::int32_t d = 0; d < draws; ++d) {
            const bool intra = edge_rng.uniform() < spec.target_homophily && mine.size() >= 2;
            std::int32_t partner;
            if (intra) {
                const std::size_t pos = static_cast<std::size_t>(i / spec.c);
                auto idx = static_cast<std::size_t>(edge_rng.below(mine.size() - 1));
                if (idx >= pos) ++idx;
                partner = mine[idx];
            } else {
                int tries = 0;
                do {
                    partner = static_cast<std::int32_t>(edge_rng.below(std::uint64_t(spec.n)));
                    if (++tries > 10000) {
                        throw DataError("generate_synthetic: cannot find cross-class partner");
                    }
                } while (partner % spec.c == q);
            }
            edges.emplace_back(i, partner);
        }
    }
    b.graph = build_graph(edges, spec.n);

    Rng feat_rng = Rng::derive(spec.seed, "synth:features");
    b.features = DenseMatrix(static_cast<std::size_t>(spec.n), static_cast<std::size_t>(spec.f));
    const double mean_coord = spec.feature_separation / std::sqrt(2.0);
    for (std::int32_t i = 0; i < spec.n; ++i) {
        double* row = b.features.row(static_cast<std::size_t>(i));
        for (std::int32_t j = 0; j < spec.f; ++j) row[j] = feat_rng.normal();
        row[i % spec.c] += mean_coord;
    }
    return b;
}

void save_splits(const SplitSpec& split, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << "seed " << split.seed << '\n';
    out << "ratios " << format_double(split.ratios[0]) << ' ' << format_double(split.ratios[1])
        << ' ' << format_double(split.ratios[2]) << '\n';
    const auto dump = [&out](const char* name, const std::vector<bool>& mask) {
        out << name;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i]) out << ' ' << i;
        }
        out << '\n';
    };
    dump("train", split.train);
    dump("val", split.val);
    dump("test", split.test);
}

SplitSpec load_splits(const std::filesystem::path& file, std::int32_t num_nodes) {
    std::ifstream in = open_or_throw(file);
    SplitSpec s;
    s.train.assign(static_cast<std::size_t>(num_nodes), false);
    s.val.assign(static_cast<std::size_t>(num_nodes), false);
    s.test.assign(static_cast<std::size_t>(num_nodes), false);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string key;
        iss >> key;
        if (key == "seed") {
            iss >> s.seed;
        } else if (key == "ratios") {
            iss >> s.ratios[0] >> s.ratios[1] >> s.ratios[2];
        } else if (key == "train" || key == "val" || key == "test") {
            auto& mask = key == "train" ? s.train : key == "val" ? s.val : s.test;
            long idx = 0;
            while (iss >> idx) {
                if (idx < 0 || idx >= num_nodes) {
                    line_error(file, lineno, "node index out of range");
                }
                mask[static_cast<std::size_t>(idx)] = true;
            }
        } else {
            line_error(file, lineno, "unknown key '" + key + "'");
        }
    }
    return s;
}

void row_normalize_features(DenseMatrix& features) {
    for (std::size_t i = 0; i < features.rows; ++i) {
        double* row = features.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < features.cols; ++j) sum += row[j];
        if (std::abs(sum) < 1e-12) continue;
        for (std::size_t j = 0; j < features.cols; ++j) row[j] /= sum;
    }
}

} // namespace pcgcn
