#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcgcn/adam.hpp"
#include "pcgcn/data.hpp"
#include "pcgcn/dense.hpp"
#include "pcgcn/graph.hpp"
#include "pcgcn/rng.hpp"

namespace pcgcn {

/// Training and model knobs. Key names in config files mirror these fields
/// (dropout, hid, layers, lr, wd, lambda, beta, tau, epochs, patience, seed).
struct PCGCNConfig {
    std::int32_t layers = 2;  // L
    std::int32_t hidden = 64; // d
    double dropout = 0.5;
    double lr = 0.01;
    double wd = 5e-4;
    double lambda = 1.0; // consistency weight
    double beta = 1.0;   // control gain, may be negative
    double tau = 1.0;    // matching temperature
    std::int32_t epochs = 500;
    std::int32_t patience = 100;
    std::uint64_t seed = 0;
    double rho = 0.0; // oracle match fraction

    bool ablate_hom_p = false; // S̃ = (I-Â)S only
    bool ablate_het_p = false; // S̃ = ÂS only
    bool ablate_mp = false;    // hybrid layer uses H instead of ÂH
    bool ablate_cl = false;    // consistency weight forced to 0

    bool tie_transforms = false;        // g_θ shares ĝ_θ's parameters
    bool consistency_on_s_tilde = false; // z̃ from S̃ instead of S
    bool mean_reduction = false;        // average losses over masked nodes
    bool row_normalize = false;         // L1-normalize feature rows

    std::vector<bool> control_mask; // δ; empty means every node controlled

    double effective_lambda() const { return ablate_cl ? 0.0 : lambda; }
    bool controlled(std::size_t node) const {
        return control_mask.empty() || control_mask[node];
    }
    void validate() const; // throws ConfigError
};

/// All trainable tensors. GCN/MLP instances leave the pinning-specific
/// parameters empty; trainable() skips empty tensors.
struct ModelParams {
    Parameter in_w, in_b;       // input transform ĝ_θ: f×d, 1×d
    Parameter proto_w, proto_b; // prototype transform g_θ (empty when tied)
    std::vector<Parameter> layer_w; // W^(l): d×d
    std::vector<Parameter> alpha;   // one unconstrained scalar per layer
    Parameter cls_w, cls_b;     // classifier: d×c, 1×c
    Parameter free_protos;      // c×d rows for train-empty classes
    bool tied = false;

    Parameter& g_w() { return tied ? in_w : proto_w; }
    Parameter& g_b() { return tied ? in_b : proto_b; }
    const Parameter& g_w() const { return tied ? in_w : proto_w; }
    const Parameter& g_b() const { return tied ? in_b : proto_b; }

    /// Per-layer α squashed into (0,1).
    double alpha_value(std::size_t l) const;

    std::vector<Parameter*> trainable();

    /// Every parameter draws from its own named stream, so models sharing a
    /// parameter name initialize it identically regardless of which other
    /// parameters exist.
    static ModelParams init_pcgcn(std::int32_t f, std::int32_t d, std::int32_t c,
                                  std::int32_t layers, bool tie_transforms, std::uint64_t seed);
    static ModelParams init_baseline(std::int32_t f, std::int32_t d, std::int32_t c,
                                     std::int32_t layers, std::uint64_t seed);
};

/// Class prototypes plus the bookkeeping needed to route gradients back
/// into g_θ (data-derived rows) or the free rows (train-empty classes).
struct PrototypeSet {
    DenseMatrix embeddings;           // c×d
    std::vector<bool> free_learnable; // per class
    std::vector<std::int32_t> train_ids;
    std::vector<std::vector<std::int32_t>> class_rows; // positions in train_ids per class
    DenseMatrix Xt; // gathered train features, t×f
    DenseMatrix Gt; // g_θ(Xt), t×d
};

/// Per-layer matching diagnostics and intermediates.
struct MatchState {
    DenseMatrix S;       // n×c pin similarity
    DenseMatrix AS;      // Â·S (kept for the backward pass)
    DenseMatrix S_tilde; // propagated similarity
    DenseMatrix soft;    // row_softmax(S̃ / τ)
    DenseMatrix z_tilde; // row_softmax of S (or S̃ per config)
    std::vector<std::int32_t> assignment; // hard matching, one class per node
};

struct LayerCache {
    MatchState match;
    DenseMatrix AH;  // ÂH^(l-1), or H^(l-1) under the MP ablation
    DenseMatrix U;   // AH + β(H − BP)⊙δ
    DenseMatrix pre; // U·W
    DenseMatrix out; // activation (+dropout on hidden layers)
    DenseMatrix drop_mask;
};

struct ForwardCache {
    PrototypeSet protos;
    DenseMatrix H0; // dropout(ĝ_θ(X))
    DenseMatrix H0_mask;
    std::vector<LayerCache> layers;
    DenseMatrix logits;

    const DenseMatrix& layer_input(std::size_t l) const {
        return l == 0 ? H0 : layers[l - 1].out;
    }
};

/// Mean of g_θ(X_i) over each class's training nodes; classes with no
/// training node take the free-learnable row instead.
PrototypeSet compute_prototypes(const DenseMatrix& features, const LabelSet& labels,
                                const std::vector<bool>& train_mask, const ModelParams& params);

/// S = H·P_cᵀ.
DenseMatrix pin_similarity(const DenseMatrix& h, const PrototypeSet& protos);

/// S̃ = α·ÂS + (1−α)·(I−Â)S, with the two single-term ablations.
/// as_out receives Â·S for reuse in the backward pass.
DenseMatrix propagate_similarity(const DenseMatrix& s, const NormalizedAdjacency& a,
                                 double alpha, const PCGCNConfig& cfg, DenseMatrix* as_out);

/// Hard assignment: argmax of row_softmax(S̃/τ), ties to the lowest class.
/// rho > 0 overrides a seeded rho-fraction of non-train labeled nodes to
/// their ground-truth class. soft_out receives the softmax when requested.
std::vector<std::int32_t> match_nodes(const DenseMatrix& s_tilde, double tau,
                                      const LabelSet& labels, const std::vector<bool>& train_mask,
                                      double rho, Rng& rng, DenseMatrix* soft_out = nullptr);

/// One hybrid layer: out = σ(ÂHW + β(H − BP)W ⊙ δ). BP holds each node's
/// matched prototype row. Fills AH/U/pre in the cache and returns the
/// activation (ReLU when hidden_activation, identity otherwise). When
/// beta == 0 the control term is skipped entirely, making the layer the
/// plain convolution of the baseline.
DenseMatrix hybrid_layer(const DenseMatrix& h, const NormalizedAdjacency& a, const DenseMatrix& w,
                         const DenseMatrix& bp, double beta, const PCGCNConfig& cfg,
                         bool hidden_activation, LayerCache& lc);

/// Full forward pass (Algorithm-style): prototypes, then per layer
/// match + hybrid aggregation, then the linear classifier. Dropout draws
/// come from drop_rng only in training mode; match_rng is consumed only
/// when rho > 0.
ForwardCache pcgcn_forward(const DatasetBundle& bundle, const NormalizedAdjacency& a,
                           const ModelParams& params, const PCGCNConfig& cfg,
                           const std::vector<bool>& train_mask, bool training,
                           Rng& drop_rng, Rng& match_rng);

/// L̃ = CE(logits, train) + λ Σ_l CE(S^(l), train); the consistency term
/// reads S̃ instead when the config says so.
double total_loss(const DenseMatrix& logits, const std::vector<MatchState>& matches,
                  const LabelSet& labels, const std::vector<bool>& train_mask,
                  const PCGCNConfig& cfg);
double total_loss(const ForwardCache& cache, const LabelSet& labels,
                  const std::vector<bool>& train_mask, const PCGCNConfig& cfg);

/// Reverse pass of pcgcn_forward + total_loss; accumulates into the
/// parameter grad slots.
void pcgcn_backward(const DatasetBundle& bundle, const NormalizedAdjacency& a,
                    ModelParams& params, const PCGCNConfig& cfg,
                    const std::vector<bool>& train_mask, const ForwardCache& cache);

/// Baselines share the PCGCN skeleton (input transform, L conv layers with
/// ReLU between, linear classifier) so the β=0, λ=0 reduction is exact.
/// The MLP is the same network without the graph term.
struct BaselineCache {
    DenseMatrix H0;
    DenseMatrix H0_mask;
    struct Layer {
        DenseMatrix AH, pre, out, drop_mask;
    };
    std::vector<Layer> layers;
    DenseMatrix logits;

    const DenseMatrix& layer_input(std::size_t l) const {
        return l == 0 ? H0 : layers[l - 1].out;
    }
};

BaselineCache gcn_forward(const DatasetBundle& bundle, const NormalizedAdjacency& a,
                          const ModelParams& params, const PCGCNConfig& cfg, bool training,
                          Rng& drop_rng);
BaselineCache mlp_forward(const DatasetBundle& bundle, const ModelParams& params,
                          const PCGCNConfig& cfg, bool training, Rng& drop_rng);
void baseline_backward(const DatasetBundle& bundle, const NormalizedAdjacency* a,
                       ModelParams& params, const PCGCNConfig& cfg,
                       const std::vector<bool>& train_mask, const BaselineCache& cache);

} // namespace pcgcn
