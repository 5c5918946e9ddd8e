#include "pcgcn/model.hpp"

#include <algorithm>
#include <cmath>

#include "pcgcn/errors.hpp"
#include "pcgcn/kernels.hpp"
#include "pcgcn/ops.hpp"

namespace pcgcn {

void PCGCNConfig::validate() const {
    if (layers < 1) throw ConfigError("config: layers must be >= 1");
    if (hidden < 1) throw ConfigError("config: hid must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("config: dropout must be in [0, 1)");
    if (!(lr > 0.0)) throw ConfigError("config: lr must be positive");
    if (wd < 0.0) throw ConfigError("config: wd must be nonnegative");
    if (lambda < 0.0) throw ConfigError("config: lambda must be nonnegative");
    if (!(tau > 0.0)) throw ConfigError("config: tau must be positive");
    if (epochs < 0) throw ConfigError("config: epochs must be nonnegative");
    if (patience < 1) throw ConfigError("config: patience must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("config: rho must be in [0, 1]");
    if (ablate_hom_p && ablate_het_p) {
        throw ConfigError("config: cannot ablate both similarity propagation terms");
    }
}

namespace {

void glorot_init(Parameter& p, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, "init:" + p.name);
    const double s = std::sqrt(6.0 / double(p.value.rows + p.value.cols));
    for (double& v : p.value.values) v = (2.0 * rng.uniform() - 1.0) * s;
}

void add_bias_rows(DenseMatrix& m, const Parameter& bias) {
    kernels::active().add_bias(m.data(), bias.value.data(), m.rows, m.cols);
}

void accum_colsum(Parameter& bias, const DenseMatrix& d_out) {
    kernels::active().colsum(bias.grad.data(), d_out.data(), d_out.rows, d_out.cols);
}

} // namespace

double ModelParams::alpha_value(std::size_t l) const {
    return 1.0 / (1.0 + std::exp(-alpha[l].scalar()));
}

std::vector<Parameter*> ModelParams::trainable() {
    std::vector<Parameter*> out;
    const auto add = [&out](Parameter& p) {
        if (p.value.size() > 0) out.push_back(&p);
    };
    add(in_w);
    add(in_b);
    if (!tied) {
        add(proto_w);
        add(proto_b);
    }
    for (Parameter& w : layer_w) add(w);
    for (Parameter& al : alpha) add(al);
    add(cls_w);
    add(cls_b);
    add(free_protos);
    return out;
}

ModelParams ModelParams::init_baseline(std::int32_t f, std::int32_t d, std::int32_t c,
                                       std::int32_t layers, std::uint64_t seed) {
    ModelParams p;
    p.in_w = Parameter("in_w", static_cast<std::size_t>(f), static_cast<std::size_t>(d));
    glorot_init(p.in_w, seed);
    p.in_b = Parameter("in_b", 1, static_cast<std::size_t>(d));
    for (std::int32_t l = 0; l < layers; ++l) {
        p.layer_w.emplace_back("layer_w" + std::to_string(l), static_cast<std::size_t>(d),
                               static_cast<std::size_t>(d));
        glorot_init(p.layer_w.back(), seed);
    }
    p.cls_w = Parameter("cls_w", static_cast<std::size_t>(d), static_cast<std::size_t>(c));
    glorot_init(p.cls_w, seed);
    p.cls_b = Parameter("cls_b", 1, static_cast<std::size_t>(c));
    return p;
}

ModelParams ModelParams::init_pcgcn(std::int32_t f, std::int32_t d, std::int32_t c,
                                    std::int32_t layers, bool tie_transforms, std::uint64_t seed) {
    ModelParams p = init_baseline(f, d, c, layers, seed);
    p.tied = tie_transforms;
    if (!tie_transforms) {
        p.proto_w = Parameter("proto_w", static_cast<std::size_t>(f), static_cast<std::size_t>(d));
        glorot_init(p.proto_w, seed);
        p.proto_b = Parameter("proto_b", 1, static_cast<std::size_t>(d));
    }
    for (std::int32_t l = 0; l < layers; ++l) {
        p.alpha.emplace_back("alpha" + std::to_string(l), 1, 1);
    }
    p.free_protos = Parameter("free_protos", static_cast<std::size_t>(c),
                              static_cast<std::size_t>(d));
    {
        Rng rng = Rng::derive(seed, "init:free_protos");
        const double s = 1.0 / std::sqrt(double(d));
        for (double& v : p.free_protos.value.values) v = rng.normal() * s;
    }
    return p;
}

PrototypeSet compute_prototypes(const DenseMatrix& features, const LabelSet& labels,
                                const std::vector<bool>& train_mask, const ModelParams& params) {
    const auto c = static_cast<std::size_t>(labels.num_classes);
    const std::size_t d = params.g_w().value.cols;
    PrototypeSet ps;
    ps.free_learnable.assign(c, false);
    ps.class_rows.assign(c, {});
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        if (!train_mask[i] || labels.labels[i] == kUnlabeled) continue;
        ps.class_rows[static_cast<std::size_t>(labels.labels[i])].push_back(
            static_cast<std::int32_t>(ps.train_ids.size()));
        ps.train_ids.push_back(static_cast<std::int32_t>(i));
    }
    const std::size_t t = ps.train_ids.size();
    ps.Xt = DenseMatrix(t, features.cols);
    for (std::size_t r = 0; r < t; ++r) {
        const double* src = features.row(static_cast<std::size_t>(ps.train_ids[r]));
        std::copy(src, src + features.cols, ps.Xt.row(r));
    }
    ps.Gt = ops::matmul(ps.Xt, params.g_w().value);
    add_bias_rows(ps.Gt, params.g_b());

    ps.embeddings = DenseMatrix(c, d);
    for (std::size_t j = 0; j < c; ++j) {
        double* row = ps.embeddings.row(j);
        const auto& rows = ps.class_rows[j];
        if (rows.empty()) {
            ps.free_learnable[j] = true;
            const double* src = params.free_protos.value.row(j);
            std::copy(src, src + d, row);
            continue;
        }
        for (const std::int32_t r : rows) {
            const double* g = ps.Gt.row(static_cast<std::size_t>(r));
            for (std::size_t k = 0; k < d; ++k) row[k] += g[k];
        }
        const double inv = 1.0 / double(rows.size());
        for (std::size_t k = 0; k < d; ++k) row[k] *= inv;
    }
    return ps;
}

DenseMatrix pin_similarity(const DenseMatrix& h, const PrototypeSet& protos) {
    if (h.cols != protos.embeddings.cols) {
        throw ShapeError("pin_similarity: width " + std::to_string(h.cols) +
                         " != prototype width " + std::to_string(protos.embeddings.cols));
    }
    const DenseMatrix pt = transpose(protos.embeddings);
    return ops::matmul(h, pt);
}

DenseMatrix propagate_similarity(const DenseMatrix& s, const NormalizedAdjacency& a,
                                 double alpha, const PCGCNConfig& cfg, DenseMatrix* as_out) {
    DenseMatrix as = ops::spmm(a, s);
    DenseMatrix st(s.rows, s.cols);
    if (cfg.ablate_hom_p) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            st.values[i] = s.values[i] - as.values[i];
        }
    } else if (cfg.ablate_het_p) {
        st.values = as.values;
    } else {
        const double one_minus = 1.0 - alpha;
        for (std::size_t i = 0; i < s.size(); ++i) {
            st.values[i] = alpha * as.values[i] + one_minus * (s.values[i] - as.values[i]);
        }
    }
    if (as_out) *as_out = std::move(as);
    return st;
}

std::vector<std::int32_t> match_nodes(const DenseMatrix& s_tilde, double tau,
                                      const LabelSet& labels, const std::vector<bool>& train_mask,
                                      double rho, Rng& rng, DenseMatrix* soft_out) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("match_nodes: rho must be in [0, 1]");
    DenseMatrix soft = ops::row_softmax(s_tilde, tau);
    const auto cols = static_cast<std::int32_t>(soft.cols);
    std::vector<std::int32_t> assignment(soft.rows);
    for (std::size_t i = 0; i < soft.rows; ++i) {
        assignment[i] = ops::argmax_row(soft.row(i), cols);
    }
    if (rho > 0.0) {
        std::vector<std::int32_t> pool;
        for (std::size_t i = 0; i < labels.labels.size(); ++i) {
            if (!train_mask[i] && labels.labels[i] != kUnlabeled) {
                pool.push_back(static_cast<std::int32_t>(i));
            }
        }
        rng.shuffle(pool);
        const auto k = static_cast<std::size_t>(std::llround(rho * double(pool.size())));
        for (std::size_t r = 0; r < k && r < pool.size(); ++r) {
            const auto id = static_cast<std::size_t>(pool[r]);
            assignment[id] = labels.labels[id];
        }
    }
    if (soft_out) *soft_out = std::move(soft);
    return assignment;
}

DenseMatrix hybrid_layer(const DenseMatrix& h, const NormalizedAdjacency& a, const DenseMatrix& w,
                         const DenseMatrix& bp, double beta, const PCGCNConfig& cfg,
                         bool hidden_activation, LayerCache& lc) {
    lc.AH = cfg.ablate_mp ? h : ops::spmm(a, h);
    lc.U = lc.AH;
    if (beta != 0.0) {
        if (!bp.same_shape(h)) throw ShapeError("hybrid_layer: BP shape does not match H");
        for (std::size_t i = 0; i < h.rows; ++i) {
            if (!cfg.controlled(i)) continue;
            double* u = lc.U.row(i);
            const double* hi = h.row(i);
            const double* bi = bp.row(i);
            for (std::size_t j = 0; j < h.cols; ++j) u[j] += beta * (hi[j] - bi[j]);
        }
    }
    lc.pre = ops::matmul(lc.U, w);
    return hidden_activation ? ops::relu(lc.pre) : lc.pre;
}

ForwardCache pcgcn_forward(const DatasetBundle& bundle, const NormalizedAdjacency& a,
                           const ModelParams& params, const PCGCNConfig& cfg,
                           const std::vector<bool>& train_mask, bool training,
                           Rng& drop_rng, Rng& match_rng) {
    const auto n = static_cast<std::size_t>(bundle.num_nodes());
    ForwardCache cache;
    cache.protos = compute_prototypes(bundle.features, bundle.labels, train_mask, params);

    DenseMatrix h0 = ops::matmul(bundle.features, params.in_w.value);
    add_bias_rows(h0, params.in_b);
    cache.H0 = ops::dropout(h0, cfg.dropout, training, drop_rng, &cache.H0_mask);

    const auto layers = static_cast<std::size_t>(cfg.layers);
    cache.layers.reserve(layers);
    for (std::size_t l = 1; l <= layers; ++l) {
        const DenseMatrix& h = cache.layer_input(l - 1);
        LayerCache lc;
        lc.match.S = pin_similarity(h, cache.protos);
        const double alpha = params.alpha_value(l - 1);
        lc.match.S_tilde = propagate_similarity(lc.match.S, a, alpha, cfg, &lc.match.AS);
        lc.match.assignment = match_nodes(lc.match.S_tilde, cfg.tau, bundle.labels, train_mask,
                                          cfg.rho, match_rng, &lc.match.soft);
        lc.match.z_tilde =
            ops::row_softmax(cfg.consistency_on_s_tilde ? lc.match.S_tilde : lc.match.S, 1.0);

        DenseMatrix bp;
        if (cfg.beta != 0.0) {
            bp = DenseMatrix(n, h.cols);
            for (std::size_t i = 0; i < n; ++i) {
                const double* src =
                    cache.protos.embeddings.row(static_cast<std::size_t>(lc.match.assignment[i]));
                std::copy(src, src + h.cols, bp.row(i));
            }
        }
        const bool hidden = l < layers;
        DenseMatrix act =
            hybrid_layer(h, a, params.layer_w[l - 1].value, bp, cfg.beta, cfg, hidden, lc);
        lc.out = hidden ? ops::dropout(act, cfg.dropout, training, drop_rng, &lc.drop_mask)
                        : std::move(act);
        cache.layers.push_back(std::move(lc));
    }
    cache.logits = ops::matmul(cache.layers.back().out, params.cls_w.value);
    add_bias_rows(cache.logits, params.cls_b);
    return cache;
}

double total_loss(const DenseMatrix& logits, const std::vector<MatchState>& matches,
                  const LabelSet& labels, const std::vector<bool>& train_mask,
                  const PCGCNConfig& cfg) {
    double loss = ops::masked_cross_entropy(logits, labels, train_mask, cfg.mean_reduction);
    const double lam = cfg.effective_lambda();
    if (lam != 0.0) {
        for (const MatchState& ms : matches) {
            const DenseMatrix& s = cfg.consistency_on_s_tilde ? ms.S_tilde : ms.S;
            loss += lam * ops::masked_cross_entropy(s, labels, train_mask, cfg.mean_reduction);
        }
    }
    return loss;
}

double total_loss(const ForwardCache& cache, const LabelSet& labels,
                  const std::vector<bool>& train_mask, const PCGCNConfig& cfg) {
    std::vector<MatchState> matches;
    matches.reserve(cache.layers.size());
    for (const LayerCache& lc : cache.layers) matches.push_back(lc.match);
    return total_loss(cache.logits, matches, labels, train_mask, cfg);
}

void pcgcn_backward(const DatasetBundle& bundle, const NormalizedAdjacency& a,
                    ModelParams& params, const PCGCNConfig& cfg,
                    const std::vector<bool>& train_mask, const ForwardCache& cache) {
    const auto n = static_cast<std::size_t>(bundle.num_nodes());
    const auto c = static_cast<std::size_t>(bundle.num_classes());
    const std::size_t d = params.in_w.value.cols;
    const double lam = cfg.effective_lambda();
    const auto& k = kernels::active();

    DenseMatrix dlogits(n, c);
    ops::masked_cross_entropy_backward(cache.logits, bundle.labels, train_mask, dlogits, 1.0,
                                       cfg.mean_reduction);
    DenseMatrix dh(n, d);
    ops::matmul_backward(cache.layers.back().out, params.cls_w.value, dlogits, &dh,
                         &params.cls_w.grad);
    accum_colsum(params.cls_b, dlogits);

    DenseMatrix dp(c, d);
    bool dp_any = false;
    for (std::size_t l = cache.layers.size(); l >= 1; --l) {
        const LayerCache& lc = cache.layers[l - 1];
        const DenseMatrix& h_prev = cache.layer_input(l - 1);

        DenseMatrix dpre;
        if (l < cache.layers.size()) {
            DenseMatrix dact(n, d);
            k.hadamard(dact.data(), dh.data(), lc.drop_mask.data(), dh.size());
            dpre = DenseMatrix(n, d);
            ops::relu_backward(lc.pre, dact, dpre);
        } else {
            dpre = std::move(dh);
        }

        DenseMatrix du(n, d);
        ops::matmul_backward(lc.U, params.layer_w[l - 1].value, dpre, &du,
                             &params.layer_w[l - 1].grad);

        DenseMatrix dh_new = cfg.ablate_mp ? du : ops::spmm(a, du);
        if (cfg.beta != 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!cfg.controlled(i)) continue;
                const double* dui = du.row(i);
                double* dhi = dh_new.row(i);
                double* dpj = dp.row(static_cast<std::size_t>(lc.match.assignment[i]));
                for (std::size_t j = 0; j < d; ++j) {
                    dhi[j] += cfg.beta * dui[j];
                    dpj[j] -= cfg.beta * dui[j];
                }
            }
            dp_any = true;
        }

        if (lam != 0.0) {
            DenseMatrix ds(n, c);
            if (cfg.consistency_on_s_tilde) {
                DenseMatrix dst(n, c);
                ops::masked_cross_entropy_backward(lc.match.S_tilde, bundle.labels, train_mask,
                                                   dst, lam, cfg.mean_reduction);
                DenseMatrix das(n, c);
                if (cfg.ablate_hom_p) { // S̃ = S − ÂS
                    for (std::size_t i = 0; i < ds.size(); ++i) {
                        ds.values[i] += dst.values[i];
                        das.values[i] = -dst.values[i];
                    }
                } else if (cfg.ablate_het_p) { // S̃ = ÂS
                    das.values = dst.values;
                } else {
                    const double alpha = params.alpha_value(l - 1);
                    double dalpha = 0.0;
                    for (std::size_t i = 0; i < ds.size(); ++i) {
                        das.values[i] = (2.0 * alpha - 1.0) * dst.values[i];
                        ds.values[i] += (1.0 - alpha) * dst.values[i];
                        dalpha += dst.values[i] *
                                  (2.0 * lc.match.AS.values[i] - lc.match.S.values[i]);
                    }
                    params.alpha[l - 1].grad.values[0] += dalpha * alpha * (1.0 - alpha);
                }
                const DenseMatrix d_from_as = ops::spmm(a, das);
                k.axpy(ds.data(), d_from_as.data(), 1.0, ds.size());
            } else {
                ops::masked_cross_entropy_backward(lc.match.S, bundle.labels, train_mask, ds, lam,
                                                   cfg.mean_reduction);
            }
            // S = H_prev · Pᵀ
            k.matmul(dh_new.data(), ds.data(), cache.protos.embeddings.data(), n, c, d, true);
            k.matmul_at_b(dp.data(), ds.data(), h_prev.data(), n, c, d);
            dp_any = true;
        }
        dh = std::move(dh_new);
    }

    DenseMatrix dh0(n, d);
    k.hadamard(dh0.data(), dh.data(), cache.H0_mask.data(), dh.size());
    ops::matmul_backward(bundle.features, params.in_w.value, dh0, nullptr, &params.in_w.grad);
    accum_colsum(params.in_b, dh0);

    if (dp_any) {
        const PrototypeSet& ps = cache.protos;
        const std::size_t t = ps.train_ids.size();
        DenseMatrix dgt(t, d);
        for (std::size_t j = 0; j < c; ++j) {
            const double* dpj = dp.row(j);
            if (ps.free_learnable[j]) {
                double* g = params.free_protos.grad.row(j);
                for (std::size_t kk = 0; kk < d; ++kk) g[kk] += dpj[kk];
                continue;
            }
            const double inv = 1.0 / double(ps.class_rows[j].size());
            for (const std::int32_t r : ps.class_rows[j]) {
                double* g = dgt.row(static_cast<std::size_t>(r));
                for (std::size_t kk = 0; kk < d; ++kk) g[kk] += dpj[kk] * inv;
            }
        }
        ops::matmul_backward(ps.Xt, params.g_w().value, dgt, nullptr, &params.g_w().grad);
        accum_colsum(params.g_b(), dgt);
    }
}

namespace {

BaselineCache baseline_forward_impl(const DatasetBundle& bundle, const NormalizedAdjacency* a,
                                    const ModelParams& params, const PCGCNConfig& cfg,
                                    bool training, Rng& drop_rng) {
    BaselineCache cache;
    DenseMatrix h0 = ops::matmul(bundle.features, params.in_w.value);
    add_bias_rows(h0, params.in_b);
    cache.H0 = ops::dropout(h0, cfg.dropout, training, drop_rng, &cache.H0_mask);

    const auto layers = static_cast<std::size_t>(cfg.layers);
    for (std::size_t l = 1; l <= layers; ++l) {
        const DenseMatrix& h = cache.layer_input(l - 1);
        BaselineCache::Layer lc;
        lc.AH = a ? ops::spmm(*a, h) : h;
        lc.pre = ops::matmul(lc.AH, params.layer_w[l - 1].value);
        if (l < layers) {
            DenseMatrix act = ops::relu(lc.pre);
            lc.out = ops::dropout(act, cfg.dropout, training, drop_rng, &lc.drop_mask);
        } else {
            lc.out = lc.pre;
        }
        cache.layers.push_back(std::move(lc));
    }
    cache.logits = ops::matmul(cache.layers.back().out, params.cls_w.value);
    add_bias_rows(cache.logits, params.cls_b);
    return cache;
}

} // namespace

BaselineCache gcn_forward(const DatasetBundle& bundle, const NormalizedAdjacency& a,
                          const ModelParams& params, const PCGCNConfig& cfg, bool training,
                          Rng& drop_rng) {
    return baseline_forward_impl(bundle, &a, params, cfg, training, drop_rng);
}

BaselineCache mlp_forward(const DatasetBundle& bundle, const ModelParams& params,
                          const PCGCNConfig& cfg, bool training, Rng& drop_rng) {
    return baseline_forward_impl(bundle, nullptr, params, cfg, training, drop_rng);
}

void baseline_backward(const DatasetBundle& bundle, const NormalizedAdjacency* a,
                       ModelParams& params, const PCGCNConfig& cfg,
                       const std::vector<bool>& train_mask, const BaselineCache& cache) {
    const auto n = static_cast<std::size_t>(bundle.num_nodes());
    const auto c = static_cast<std::size_t>(bundle.num_classes());
    const std::size_t d = params.in_w.value.cols;
    const auto& k = kernels::active();

    DenseMatrix dlogits(n, c);
    ops::masked_cross_entropy_backward(cache.logits, bundle.labels, train_mask, dlogits, 1.0,
                                       cfg.mean_reduction);
    DenseMatrix dh(n, d);
    ops::matmul_backward(cache.layers.back().out, params.cls_w.value, dlogits, &dh,
                         &params.cls_w.grad);
    accum_colsum(params.cls_b, dlogits);

    for (std::size_t l = cache.layers.size(); l >= 1; --l) {
        const BaselineCache::Layer& lc = cache.layers[l - 1];
        DenseMatrix dpre;
        if (l < cache.layers.size()) {
            DenseMatrix dact(n, d);
            k.hadamard(dact.data(), dh.data(), lc.drop_mask.data(), dh.size());
            dpre = DenseMatrix(n, d);
            ops::relu_backward(lc.pre, dact, dpre);
        } else {
            dpre = std::move(dh);
        }
        DenseMatrix du(n, d);
        ops::matmul_backward(lc.AH, params.layer_w[l - 1].value, dpre, &du,
                             &params.layer_w[l - 1].grad);
        dh = a ? ops::spmm(*a, du) : std::move(du);
    }

    DenseMatrix dh0(n, d);
    k.hadamard(dh0.data(), dh.data(), cache.H0_mask.data(), dh.size());
    ops::matmul_backward(bundle.features, params.in_w.value, dh0, nullptr, &params.in_w.grad);
    accum_colsum(params.in_b, dh0);
}

} // namespace pcgcn
