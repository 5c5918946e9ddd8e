#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcgcn/dense.hpp"
#include "pcgcn/graph.hpp"

namespace pcgcn {

/// One dataset: graph + node features + ground-truth labels.
struct DatasetBundle {
    std::string name;
    Graph graph;
    DenseMatrix features;
    LabelSet labels;

    std::int32_t num_nodes() const { return graph.num_nodes; }
    std::int32_t num_features() const { return static_cast<std::int32_t>(features.cols); }
    std::int32_t num_classes() const { return labels.num_classes; }
};

/// Disjoint stratified masks over the labeled nodes.
struct SplitSpec {
    std::vector<bool> train, val, test;
    std::uint64_t seed = 0;
    std::array<double, 3> ratios{0.48, 0.32, 0.20};
};

/// Recipe for a homophily-controlled synthetic bundle. Nodes are assigned
/// to the c classes round-robin; each node draws partners that are
/// same-class with probability target_homophily; features are spherical
/// unit Gaussians around axis-aligned class means at pairwise distance
/// feature_separation.
struct SynthSpec {
    std::int32_t n = 1000;
    std::int32_t c = 4;
    std::int32_t f = 16;
    double target_homophily = 0.5;
    double mean_degree = 10.0;
    double feature_separation = 1.0;
    std::uint64_t seed = 0;
};

/// Reads `graph.edges` (one `u v` pair per line, 0-indexed), `features.csv`
/// (n rows of comma-separated reals), `labels.txt` (one integer per line,
/// -1 = unlabeled) from the directory. Errors name the file and line.
DatasetBundle load_dataset(const std::filesystem::path& dir);

/// Inverse of load_dataset; features printed with round-trip precision so
/// load(save(b)) is bit-exact.
void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir);

/// Per-class stratified shuffle: floor(ratio*size) to train and val, the
/// remainder to test. Pure function of (labels, ratios, seed).
SplitSpec make_splits(const LabelSet& labels,
                      std::array<double, 3> ratios = {0.48, 0.32, 0.20},
                      std::uint64_t seed = 0);

/// Removes the given classes from the train mask only (val/test untouched);
/// the emptied classes exercise the free-prototype path downstream.
SplitSpec mask_classes(const LabelSet& labels, const SplitSpec& split,
                       const std::vector<std::int32_t>& classes);

DatasetBundle generate_synthetic(const SynthSpec& spec);

void save_splits(const SplitSpec& split, const std::filesystem::path& file);
SplitSpec load_splits(const std::filesystem::path& file, std::int32_t num_nodes);

/// Optional L1 row normalization (config flag `row_normalize`); zero-sum
/// rows are left unchanged.
void row_normalize_features(DenseMatrix& features);

} // namespace pcgcn
