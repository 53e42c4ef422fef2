#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "charisma/errors.hpp"
#include "charisma/nn.hpp"

namespace charisma {

// Architecture description for the bidirectional encoder. Presets are
// looked up by name; vocab_size comes from the vocabulary at build time.
struct EncoderSpec {
    std::string name = "mini-uncased";
    int vocab_size = 0;
    int hidden_size = 64;
    int num_layers = 2;
    int num_heads = 2;
    int intermediate_size = 128;
    int max_position = 64;
    int num_classes = 9;
    double layer_norm_eps = 1e-12;
};

// Known architecture presets. vocab_size stays 0 until a vocabulary is
// attached. Unknown names raise ConfigError.
EncoderSpec encoder_preset(const std::string& name);

void validate_encoder_spec(const EncoderSpec& spec);

template <typename Scalar>
struct EncoderLayerParams {
    Mat<Scalar> wq, wk, wv, wo;  // hidden x hidden
    Vec<Scalar> bq, bk, bv, bo;
    Vec<Scalar> ln1_gamma, ln1_beta;
    Mat<Scalar> w1;  // hidden x intermediate
    Vec<Scalar> b1;
    Mat<Scalar> w2;  // intermediate x hidden
    Vec<Scalar> b2;
    Vec<Scalar> ln2_gamma, ln2_beta;
};

template <typename Scalar>
struct ModelParams {
    Mat<Scalar> token_embedding;     // vocab x hidden
    Mat<Scalar> position_embedding;  // max_position x hidden
    Vec<Scalar> emb_ln_gamma, emb_ln_beta;
    std::vector<EncoderLayerParams<Scalar>> layers;
    Mat<Scalar> pooler_w;  // hidden x hidden
    Vec<Scalar> pooler_b;
    Mat<Scalar> head_w;  // hidden x classes
    Vec<Scalar> head_b;
};

namespace detail {

template <typename Layer, typename F>
void visit_layer(Layer& layer, F&& f) {
    f(layer.wq);
    f(layer.bq);
    f(layer.wk);
    f(layer.bk);
    f(layer.wv);
    f(layer.bv);
    f(layer.wo);
    f(layer.bo);
    f(layer.ln1_gamma);
    f(layer.ln1_beta);
    f(layer.w1);
    f(layer.b1);
    f(layer.w2);
    f(layer.b2);
    f(layer.ln2_gamma);
    f(layer.ln2_beta);
}

// Applies f to every parameter matrix in a fixed order. The order defines
// both the optimizer slot layout and the weights file layout. Params may
// be const or mutable.
template <typename Params, typename F>
void visit_impl(Params& params, F&& f) {
    f(params.token_embedding);
    f(params.position_embedding);
    f(params.emb_ln_gamma);
    f(params.emb_ln_beta);
    for (auto& layer : params.layers) {
        detail::visit_layer(layer, f);
    }
    f(params.pooler_w);
    f(params.pooler_b);
    f(params.head_w);
    f(params.head_b);
}

}  // namespace detail

template <typename Scalar, typename F>
void visit_parameters(ModelParams<Scalar>& params, F&& f) {
    detail::visit_impl(params, std::forward<F>(f));
}

template <typename Scalar, typename F>
void visit_parameters(const ModelParams<Scalar>& params, F&& f) {
    detail::visit_impl(params, std::forward<F>(f));
}

// Flat views over every parameter, in visit order.
template <typename Scalar>
std::vector<Eigen::Map<Vec<Scalar>>> parameter_views(ModelParams<Scalar>& params) {
    std::vector<Eigen::Map<Vec<Scalar>>> views;
    visit_parameters(params, [&](auto& m) {
        views.emplace_back(m.data(), m.size());
    });
    return views;
}

// Views over the classifier head only (pooler + linear head), for
// frozen-encoder training.
template <typename Scalar>
std::vector<Eigen::Map<Vec<Scalar>>> head_parameter_views(ModelParams<Scalar>& params) {
    std::vector<Eigen::Map<Vec<Scalar>>> views;
    for (auto* m : {&params.pooler_w, &params.head_w}) {
        views.emplace_back(m->data(), m->size());
    }
    for (auto* v : {&params.pooler_b, &params.head_b}) {
        views.emplace_back(v->data(), v->size());
    }
    return views;
}

template <typename Scalar>
std::int64_t parameter_count(const ModelParams<Scalar>& params) {
    std::int64_t total = 0;
    visit_parameters(params, [&](const auto& m) { total += m.size(); });
    return total;
}

// Allocates parameters shaped per spec: normals (std 0.02, clamped to two
// sigma) for weights and embeddings, ones for norm gains, zeros for the
// rest. Everything flows from the seed.
template <typename Scalar>
ModelParams<Scalar> init_parameters(const EncoderSpec& spec, std::uint64_t seed) {
    validate_encoder_spec(spec);
    const int h = spec.hidden_size;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 0.02);
    auto fill_normal = [&](auto& m) {
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            double v = dist(rng);
            if (v > 0.04) v = 0.04;
            if (v < -0.04) v = -0.04;
            m.data()[i] = static_cast<Scalar>(v);
        }
    };

    ModelParams<Scalar> p;
    p.token_embedding.resize(spec.vocab_size, h);
    fill_normal(p.token_embedding);
    p.position_embedding.resize(spec.max_position, h);
    fill_normal(p.position_embedding);
    p.emb_ln_gamma = Vec<Scalar>::Ones(h);
    p.emb_ln_beta = Vec<Scalar>::Zero(h);

    p.layers.resize(static_cast<std::size_t>(spec.num_layers));
    for (auto& layer : p.layers) {
        for (auto* w : {&layer.wq, &layer.wk, &layer.wv, &layer.wo}) {
            w->resize(h, h);
            fill_normal(*w);
        }
        for (auto* b : {&layer.bq, &layer.bk, &layer.bv, &layer.bo}) {
            *b = Vec<Scalar>::Zero(h);
        }
        layer.ln1_gamma = Vec<Scalar>::Ones(h);
        layer.ln1_beta = Vec<Scalar>::Zero(h);
        layer.w1.resize(h, spec.intermediate_size);
        fill_normal(layer.w1);
        layer.b1 = Vec<Scalar>::Zero(spec.intermediate_size);
        layer.w2.resize(spec.intermediate_size, h);
        fill_normal(layer.w2);
        layer.b2 = Vec<Scalar>::Zero(h);
        layer.ln2_gamma = Vec<Scalar>::Ones(h);
        layer.ln2_beta = Vec<Scalar>::Zero(h);
    }

    p.pooler_w.resize(h, h);
    fill_normal(p.pooler_w);
    p.pooler_b = Vec<Scalar>::Zero(h);
    p.head_w.resize(h, spec.num_classes);
    fill_normal(p.head_w);
    p.head_b = Vec<Scalar>::Zero(spec.num_classes);
    return p;
}

// Same shapes as source, all zeros. Used for gradients and moments.
template <typename Scalar>
ModelParams<Scalar> zeros_like(const ModelParams<Scalar>& source) {
    ModelParams<Scalar> z = source;
    visit_parameters(z, [](auto& m) { m.setZero(); });
    return z;
}

template <typename Scalar>
struct LayerCache {
    Mat<Scalar> input;             // residual stream entering the layer
    Mat<Scalar> q, k, v;           // projected activations
    std::vector<Mat<Scalar>> attn_probs;  // per head, L x L
    Mat<Scalar> concat;            // attention output before wo
    LayerNormCache<Scalar> ln1;
    Mat<Scalar> r1;                // input + attention, pre norm
    Mat<Scalar> x1;                // ffn input (post ln1)
    Mat<Scalar> z;                 // pre gelu
    Mat<Scalar> g;                 // post gelu
    LayerNormCache<Scalar> ln2;
    Mat<Scalar> r2;                // x1 + ffn, pre norm
};

template <typename Scalar>
struct SequenceCache {
    std::vector<int> ids;
    Mat<Scalar> embedded;  // pre-norm embedding sum
    LayerNormCache<Scalar> emb_ln;
    std::vector<LayerCache<Scalar>> layers;
    Mat<Scalar> encoded;      // final hidden states, L x hidden
    RowVec<Scalar> cls;       // first row of encoded
    RowVec<Scalar> pooled_pre;
    RowVec<Scalar> pooled;    // tanh activation
    RowVec<Scalar> logits;
};

// Runs the encoder over one unpadded sequence and produces class logits.
// The cache keeps every activation backward_sequence needs; pass nullptr
// for inference.
template <typename Scalar>
RowVec<Scalar> forward_sequence(const EncoderSpec& spec, const ModelParams<Scalar>& p,
                                const std::vector<int>& ids,
                                SequenceCache<Scalar>* cache = nullptr) {
    const int len = static_cast<int>(ids.size());
    if (len < 1) {
        throw ArgumentError("empty token sequence");
    }
    if (len > spec.max_position) {
        throw ArgumentError("sequence length " + std::to_string(len) +
                            " exceeds max_position " + std::to_string(spec.max_position));
    }
    const int h = spec.hidden_size;
    const int heads = spec.num_heads;
    const int dh = h / heads;
    const Scalar eps = static_cast<Scalar>(spec.layer_norm_eps);
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

    Mat<Scalar> x0(len, h);
    for (int t = 0; t < len; ++t) {
        const int id = ids[static_cast<std::size_t>(t)];
        if (id < 0 || id >= spec.vocab_size) {
            throw ArgumentError("token id " + std::to_string(id) + " outside vocabulary");
        }
        x0.row(t) = p.token_embedding.row(id) + p.position_embedding.row(t);
    }

    LayerNormCache<Scalar> emb_ln_local;
    LayerNormCache<Scalar>* emb_ln = cache ? &cache->emb_ln : &emb_ln_local;
    Mat<Scalar> x = layer_norm_rows(x0, p.emb_ln_gamma, p.emb_ln_beta, eps, emb_ln);
    if (cache != nullptr) {
        cache->ids = ids;
        cache->embedded = x0;
        cache->layers.assign(p.layers.size(), LayerCache<Scalar>{});
    }

    for (std::size_t li = 0; li < p.layers.size(); ++li) {
        const auto& lp = p.layers[li];
        LayerCache<Scalar> local;
        LayerCache<Scalar>& lc = cache ? cache->layers[li] : local;
        lc.input = x;

        lc.q = (x * lp.wq).rowwise() + lp.bq.transpose();
        lc.k = (x * lp.wk).rowwise() + lp.bk.transpose();
        lc.v = (x * lp.wv).rowwise() + lp.bv.transpose();

        lc.concat.resize(len, h);
        lc.attn_probs.assign(static_cast<std::size_t>(heads), Mat<Scalar>());
        for (int hd = 0; hd < heads; ++hd) {
            auto qh = lc.q.middleCols(hd * dh, dh);
            auto kh = lc.k.middleCols(hd * dh, dh);
            auto vh = lc.v.middleCols(hd * dh, dh);
            Mat<Scalar> scores = (qh * kh.transpose()) * scale;
            Mat<Scalar> probs = softmax_rows(scores);
            lc.concat.middleCols(hd * dh, dh) = probs * vh;
            lc.attn_probs[static_cast<std::size_t>(hd)] = std::move(probs);
        }

        Mat<Scalar> attn_out = (lc.concat * lp.wo).rowwise() + lp.bo.transpose();
        lc.r1 = x + attn_out;
        lc.x1 = layer_norm_rows(lc.r1, lp.ln1_gamma, lp.ln1_beta, eps, &lc.ln1);

        lc.z = (lc.x1 * lp.w1).rowwise() + lp.b1.transpose();
        lc.g = gelu(lc.z);
        Mat<Scalar> ffn_out = (lc.g * lp.w2).rowwise() + lp.b2.transpose();
        lc.r2 = lc.x1 + ffn_out;
        x = layer_norm_rows(lc.r2, lp.ln2_gamma, lp.ln2_beta, eps, &lc.ln2);
    }

    RowVec<Scalar> cls = x.row(0);
    RowVec<Scalar> pooled_pre = cls * p.pooler_w + p.pooler_b.transpose();
    RowVec<Scalar> pooled = pooled_pre.array().tanh().matrix();
    RowVec<Scalar> logits = pooled * p.head_w + p.head_b.transpose();
    if (cache != nullptr) {
        cache->encoded = std::move(x);
        cache->cls = cls;
        cache->pooled_pre = pooled_pre;
        cache->pooled = pooled;
        cache->logits = logits;
    }
    return logits;
}

// Accumulates gradients for one sequence given the loss gradient at the
// logits. Mirrors forward_sequence step by step in reverse.
template <typename Scalar>
void backward_sequence(const EncoderSpec& spec, const ModelParams<Scalar>& p,
                       const SequenceCache<Scalar>& cache, const RowVec<Scalar>& dlogits,
                       ModelParams<Scalar>& grads) {
    const int len = static_cast<int>(cache.ids.size());
    const int h = spec.hidden_size;
    const int heads = spec.num_heads;
    const int dh = h / heads;
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

    grads.head_w += cache.pooled.transpose() * dlogits;
    grads.head_b += dlogits.transpose();
    RowVec<Scalar> dpooled = dlogits * p.head_w.transpose();
    RowVec<Scalar> dpooled_pre =
        (dpooled.array() * (Scalar(1) - cache.pooled.array().square())).matrix();
    grads.pooler_w += cache.cls.transpose() * dpooled_pre;
    grads.pooler_b += dpooled_pre.transpose();

    Mat<Scalar> dx = Mat<Scalar>::Zero(len, h);
    dx.row(0) = dpooled_pre * p.pooler_w.transpose();

    for (std::size_t li = p.layers.size(); li-- > 0;) {
        const auto& lp = p.layers[li];
        const auto& lc = cache.layers[li];
        auto& lg = grads.layers[li];

        Mat<Scalar> dr2 =
            layer_norm_backward(dx, lc.ln2, lp.ln2_gamma, lg.ln2_gamma, lg.ln2_beta);
        Mat<Scalar> dx1 = dr2;
        const Mat<Scalar>& du = dr2;

        lg.w2 += lc.g.transpose() * du;
        lg.b2 += du.colwise().sum().transpose();
        Mat<Scalar> dg = du * lp.w2.transpose();
        Mat<Scalar> dz = (dg.array() * gelu_grad(lc.z).array()).matrix();
        lg.w1 += lc.x1.transpose() * dz;
        lg.b1 += dz.colwise().sum().transpose();
        dx1 += dz * lp.w1.transpose();

        Mat<Scalar> dr1 =
            layer_norm_backward(dx1, lc.ln1, lp.ln1_gamma, lg.ln1_gamma, lg.ln1_beta);
        Mat<Scalar> dxin = dr1;
        const Mat<Scalar>& dattn = dr1;

        lg.wo += lc.concat.transpose() * dattn;
        lg.bo += dattn.colwise().sum().transpose();
        Mat<Scalar> dconcat = dattn * lp.wo.transpose();

        Mat<Scalar> dq(len, h), dk(len, h), dv(len, h);
        for (int hd = 0; hd < heads; ++hd) {
            auto qh = lc.q.middleCols(hd * dh, dh);
            auto kh = lc.k.middleCols(hd * dh, dh);
            auto vh = lc.v.middleCols(hd * dh, dh);
            const auto& probs = lc.attn_probs[static_cast<std::size_t>(hd)];
            Mat<Scalar> dch = dconcat.middleCols(hd * dh, dh);

            Mat<Scalar> dprobs = dch * vh.transpose();
            dv.middleCols(hd * dh, dh) = probs.transpose() * dch;
            Mat<Scalar> dscores = softmax_rows_backward(dprobs, probs);
            dq.middleCols(hd * dh, dh) = (dscores * kh) * scale;
            dk.middleCols(hd * dh, dh) = (dscores.transpose() * qh) * scale;
        }

        lg.wq += lc.input.transpose() * dq;
        lg.bq += dq.colwise().sum().transpose();
        lg.wk += lc.input.transpose() * dk;
        lg.bk += dk.colwise().sum().transpose();
        lg.wv += lc.input.transpose() * dv;
        lg.bv += dv.colwise().sum().transpose();
        dxin += dq * lp.wq.transpose() + dk * lp.wk.transpose() + dv * lp.wv.transpose();

        dx = std::move(dxin);
    }

    Mat<Scalar> dx0 =
        layer_norm_backward(dx, cache.emb_ln, p.emb_ln_gamma, grads.emb_ln_gamma,
                            grads.emb_ln_beta);
    for (int t = 0; t < len; ++t) {
        grads.token_embedding.row(cache.ids[static_cast<std::size_t>(t)]) += dx0.row(t);
        grads.position_embedding.row(t) += dx0.row(t);
    }
}

// Cross entropy of one logits row against a class index. dlogits, when
// requested, is the gradient for a weight-1 sample (softmax minus onehot).
template <typename Scalar>
Scalar cross_entropy(const RowVec<Scalar>& logits, int target,
                     RowVec<Scalar>* dlogits = nullptr) {
    if (target < 0 || target >= logits.size()) {
        throw ArgumentError("class index " + std::to_string(target) + " out of range");
    }
    Mat<Scalar> probs = softmax_rows(logits);
    Scalar p = probs(0, target);
    const Scalar floor = std::numeric_limits<Scalar>::min();
    if (p < floor) {
        p = floor;
    }
    if (dlogits != nullptr) {
        *dlogits = probs.row(0);
        (*dlogits)(target) -= Scalar(1);
    }
    return -std::log(p);
}

}  // namespace charisma
