#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pcgcn/data.hpp"
#include "pcgcn/errors.hpp"
#include "pcgcn/graph.hpp"
#include "pcgcn/rng.hpp"

using namespace pcgcn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / ("pcgcn_data_" + leaf);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::int64_t count(const std::vector<bool>& mask) {
    std::int64_t n = 0;
    for (const bool b : mask) n += b ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("load_dataset: hand-written 2-node toy directory") {
    const fs::path dir = fresh_dir("toy");
    write_file(dir / "graph.edges", "0 1\n");
    write_file(dir / "features.csv", "1.5,2.5\n-3.0,0.25\n");
    write_file(dir / "labels.txt", "0\n1\n");

    const DatasetBundle b = load_dataset(dir);
    CHECK(b.num_nodes() == 2);
    CHECK(b.num_features() == 2);
    CHECK(b.num_classes() == 2);
    CHECK(b.graph.has_edge(0, 1));
    CHECK(b.features(0, 1) == 2.5);
    CHECK(b.features(1, 0) == -3.0);
    CHECK(b.labels.labels == std::vector<std::int32_t>{0, 1});
    CHECK(b.name == dir.filename().string());
}

TEST_CASE("load_dataset: ragged feature row error names file and line") {
    const fs::path dir = fresh_dir("ragged");
    write_file(dir / "graph.edges", "0 1\n");
    write_file(dir / "features.csv", "1,2,3\n4,5\n6,7,8\n");
    write_file(dir / "labels.txt", "0\n1\n0\n");
    try {
        (void)load_dataset(dir);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("features.csv") != std::string::npos);
        CHECK(msg.find(":2") != std::string::npos);
    }
}

TEST_CASE("load_dataset: missing files and degenerate labels are data errors") {
    const fs::path dir = fresh_dir("missing");
    write_file(dir / "labels.txt", "0\n0\n");
    CHECK_THROWS_AS((void)load_dataset(dir), DataError); // no features.csv

    write_file(dir / "features.csv", "1\n2\n");
    write_file(dir / "graph.edges", "0 1\n");
    CHECK_THROWS_AS((void)load_dataset(dir), DataError); // only one class

    write_file(dir / "labels.txt", "0\n-2\n");
    CHECK_THROWS_AS((void)load_dataset(dir), DataError); // label below -1
}

TEST_CASE("save -> load round-trip is bit-exact") {
    const SynthSpec spec{.n = 120, .c = 3, .f = 7, .target_homophily = 0.4,
                         .mean_degree = 6.0, .feature_separation = 1.5, .seed = 11};
    DatasetBundle b = generate_synthetic(spec);
    b.labels.labels[5] = kUnlabeled; // exercise the -1 path
    const fs::path dir = fresh_dir("roundtrip");
    save_dataset(b, dir);
    const DatasetBundle b2 = load_dataset(dir);
    CHECK(b2.graph.row_offsets == b.graph.row_offsets);
    CHECK(b2.graph.col_indices == b.graph.col_indices);
    CHECK(b2.labels.labels == b.labels.labels);
    CHECK(b2.labels.num_classes == b.labels.num_classes);
    CHECK(b2.features.values == b.features.values); // %.17g survives exactly

    // a second save of the reloaded bundle produces identical bytes
    const fs::path dir2 = fresh_dir("roundtrip2");
    save_dataset(b2, dir2);
    for (const char* f : {"graph.edges", "features.csv", "labels.txt"}) {
        std::ifstream a(dir / f), c(dir2 / f);
        const std::string sa((std::istreambuf_iterator<char>(a)), {});
        const std::string sc((std::istreambuf_iterator<char>(c)), {});
        CHECK(sa == sc);
    }
}

TEST_CASE("make_splits: exact sizes on a single populated class") {
    LabelSet ls{std::vector<std::int32_t>(100, 0), 2};
    const SplitSpec s = make_splits(ls, {0.48, 0.32, 0.20}, 3);
    CHECK(count(s.train) == 48);
    CHECK(count(s.val) == 32);
    CHECK(count(s.test) == 20);
}

TEST_CASE("make_splits: deterministic in seed, disjoint, covers labeled nodes") {
    const SynthSpec spec{.n = 211, .c = 4, .f = 6, .target_homophily = 0.5,
                         .mean_degree = 5.0, .feature_separation = 1.0, .seed = 2};
    DatasetBundle b = generate_synthetic(spec);
    b.labels.labels[0] = kUnlabeled;
    b.labels.labels[77] = kUnlabeled;

    const SplitSpec s1 = make_splits(b.labels, {0.48, 0.32, 0.20}, 5);
    const SplitSpec s2 = make_splits(b.labels, {0.48, 0.32, 0.20}, 5);
    const SplitSpec s3 = make_splits(b.labels, {0.48, 0.32, 0.20}, 6);
    CHECK(s1.train == s2.train);
    CHECK(s1.val == s2.val);
    CHECK(s1.test == s2.test);
    CHECK(s1.train != s3.train);

    for (std::int32_t i = 0; i < b.num_nodes(); ++i) {
        const int hits = int(s1.train[i]) + int(s1.val[i]) + int(s1.test[i]);
        CHECK(hits == (b.labels.labels[i] == kUnlabeled ? 0 : 1));
    }
}

TEST_CASE("make_splits: per-class train fraction within one node of 0.48") {
    const SynthSpec spec{.n = 503, .c = 5, .f = 6, .target_homophily = 0.5,
                         .mean_degree = 5.0, .feature_separation = 1.0, .seed = 4};
    const DatasetBundle b = generate_synthetic(spec);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SplitSpec s = make_splits(b.labels, {0.48, 0.32, 0.20}, seed);
        for (std::int32_t c = 0; c < b.num_classes(); ++c) {
            std::int64_t total = 0, in_train = 0;
            for (std::int32_t i = 0; i < b.num_nodes(); ++i) {
                if (b.labels.labels[i] != c) continue;
                ++total;
                in_train += s.train[i] ? 1 : 0;
            }
            CHECK(std::abs(double(in_train) - 0.48 * double(total)) <= 1.0);
        }
    }
}

TEST_CASE("make_splits: bad ratios rejected") {
    LabelSet ls{std::vector<std::int32_t>(10, 0), 2};
    CHECK_THROWS_AS((void)make_splits(ls, {0.5, 0.4, 0.2}, 0), ConfigError);
}

TEST_CASE("mask_classes: train-only removal, identity on empty set") {
    LabelSet ls{{0, 0, 1, 1, 2, 2, 0, 1, 2, 0}, 3};
    const SplitSpec s = make_splits(ls, {0.48, 0.32, 0.20}, 9);
    const SplitSpec masked = mask_classes(ls, s, {0});
    for (std::int32_t i = 0; i < 10; ++i) {
        if (ls.labels[i] == 0) {
            CHECK_FALSE(masked.train[i]);
        } else {
            CHECK(masked.train[i] == s.train[i]);
        }
        CHECK(masked.val[i] == s.val[i]);
        CHECK(masked.test[i] == s.test[i]);
    }

    const SplitSpec same = mask_classes(ls, s, {});
    CHECK(same.train == s.train);

    CHECK_THROWS_AS((void)mask_classes(ls, s, {0, 1, 2}), ConfigError);
    CHECK_THROWS_AS((void)mask_classes(ls, s, {3}), ConfigError);
}

TEST_CASE("generate_synthetic: exact extremes and homophily targeting") {
    SynthSpec spec{.n = 600, .c = 4, .f = 5, .target_homophily = 1.0,
                   .mean_degree = 8.0, .feature_separation = 1.0, .seed = 13};
    const DatasetBundle all_intra = generate_synthetic(spec);
    CHECK(edge_homophily(all_intra.graph, all_intra.labels) == 1.0);

    spec.target_homophily = 0.0;
    const DatasetBundle all_inter = generate_synthetic(spec);
    CHECK(edge_homophily(all_inter.graph, all_inter.labels) == 0.0);

    spec.n = 1000;
    spec.target_homophily = 0.25;
    spec.mean_degree = 10.0;
    const DatasetBundle mid = generate_synthetic(spec);
    const HomophilyReport rep = node_homophily(mid.graph, mid.labels);
    CHECK(rep.graph_mean >= 0.22);
    CHECK(rep.graph_mean <= 0.28);
}

TEST_CASE("generate_synthetic: node-level mean lands within 0.03 of h for n >= 500") {
    for (const double h : {0.1, 0.35, 0.6, 0.85}) {
        const SynthSpec spec{.n = 800, .c = 4, .f = 4, .target_homophily = h,
                             .mean_degree = 9.0, .feature_separation = 1.0,
                             .seed = 17 + std::uint64_t(h * 100)};
        const DatasetBundle b = generate_synthetic(spec);
        const HomophilyReport rep = node_homophily(b.graph, b.labels);
        CHECK(std::abs(rep.graph_mean - h) <= 0.03);
    }
}

TEST_CASE("generate_synthetic: infeasible specs rejected") {
    SynthSpec spec;
    spec.mean_degree = 1000.0;
    spec.n = 100;
    CHECK_THROWS_AS((void)generate_synthetic(spec), ConfigError);
    spec = SynthSpec{};
    spec.target_homophily = 1.5;
    CHECK_THROWS_AS((void)generate_synthetic(spec), ConfigError);
    spec = SynthSpec{};
    spec.c = 1;
    CHECK_THROWS_AS((void)generate_synthetic(spec), ConfigError);
}

TEST_CASE("splits serialize and reload exactly") {
    LabelSet ls{{0, 1, 0, 1, 0, 1, 0, 1, kUnlabeled, 0}, 2};
    const SplitSpec s = make_splits(ls, {0.48, 0.32, 0.20}, 21);
    const fs::path file = fresh_dir("splits") / "split.txt";
    save_splits(s, file);
    const SplitSpec r = load_splits(file, 10);
    CHECK(r.train == s.train);
    CHECK(r.val == s.val);
    CHECK(r.test == s.test);
    CHECK(r.seed == s.seed);
    CHECK(r.ratios == s.ratios);
}

TEST_CASE("row_normalize_features: unit row sums, zero rows untouched") {
    DenseMatrix m(3, 3);
    m(0, 0) = 2.0;
    m(0, 2) = 6.0;
    m(2, 1) = -4.0;
    row_normalize_features(m);
    CHECK(m(0, 0) == 0.25);
    CHECK(m(0, 2) == 0.75);
    CHECK(m(1, 0) == 0.0); // all-zero row left alone
    CHECK(m(2, 1) == 1.0);
}
