#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "model/config.hpp"
#include "model/tensors.hpp"

namespace uniasm {

template <typename T>
struct LayerParams {
    Mat<T> wq, wk, wv, wo;   // d x d attention projections, no biases
    Mat<T> ffn_in;           // d x intermediate
    Vec<T> ffn_in_b;         // intermediate
    Mat<T> ffn_out;          // intermediate x d
    Vec<T> ffn_out_b;        // d
    Vec<T> ln1_g, ln1_b;     // post-attention layer norm
    Vec<T> ln2_g, ln2_b;     // post-FFN layer norm
};

template <typename T>
struct Parameters {
    ModelConfig config;
    Mat<T> ex;               // vocab x d token table, also the tied LM weight
    Mat<T> ep;               // max_sl x d position table
    Mat<T> es;               // 2 x d segment table
    std::vector<LayerParams<T>> layers;
    Mat<T> wf;               // d x d function-embedding head
    Vec<T> lm_bias;          // vocab

    // Visits every tensor in checkpoint order with a stable name. Vectors are
    // passed as single-column matrix views via the rank-1 callback.
    void for_each_tensor(const std::function<void(const std::string&, Mat<T>&)>& on_mat,
                         const std::function<void(const std::string&, Vec<T>&)>& on_vec);
};

// All-zero tensors at the configured shapes.
template <typename T>
Parameters<T> alloc_parameters(const ModelConfig& config);

template <typename T>
Parameters<T> init_parameters(const ModelConfig& config, uint64_t seed);

// Same shapes, all zeros; gradient and optimizer-moment container.
template <typename T>
Parameters<T> zeros_like(const Parameters<T>& p);

// Flat (pointer, element count) views over every tensor, in checkpoint
// order. Matrices are row-major contiguous, so elementwise passes (optimizer
// updates, norms) can zip several parameter sets.
template <typename T>
std::vector<std::pair<T*, size_t>> tensor_buffers(Parameters<T>& p) {
    std::vector<std::pair<T*, size_t>> out;
    p.for_each_tensor(
        [&](const std::string&, Mat<T>& m) {
            out.emplace_back(m.data(), static_cast<size_t>(m.size()));
        },
        [&](const std::string&, Vec<T>& v) {
            out.emplace_back(v.data(), static_cast<size_t>(v.size()));
        });
    return out;
}

template <typename T>
void Parameters<T>::for_each_tensor(
    const std::function<void(const std::string&, Mat<T>&)>& on_mat,
    const std::function<void(const std::string&, Vec<T>&)>& on_vec) {
    on_mat("ex", ex);
    on_mat("ep", ep);
    on_mat("es", es);
    for (size_t l = 0; l < layers.size(); ++l) {
        std::string prefix = "layers." + std::to_string(l) + ".";
        on_mat(prefix + "wq", layers[l].wq);
        on_mat(prefix + "wk", layers[l].wk);
        on_mat(prefix + "wv", layers[l].wv);
        on_mat(prefix + "wo", layers[l].wo);
        on_mat(prefix + "ffn_in", layers[l].ffn_in);
        on_vec(prefix + "ffn_in_b", layers[l].ffn_in_b);
        on_mat(prefix + "ffn_out", layers[l].ffn_out);
        on_vec(prefix + "ffn_out_b", layers[l].ffn_out_b);
        on_vec(prefix + "ln1_g", layers[l].ln1_g);
        on_vec(prefix + "ln1_b", layers[l].ln1_b);
        on_vec(prefix + "ln2_g", layers[l].ln2_g);
        on_vec(prefix + "ln2_b", layers[l].ln2_b);
    }
    on_mat("wf", wf);
    on_vec("lm_bias", lm_bias);
}

template <typename T>
Parameters<T> alloc_parameters(const ModelConfig& config) {
    config.validate();
    Parameters<T> p;
    p.config = config;
    Eigen::Index d = config.hidden;
    Eigen::Index inter = config.intermediate;

    p.ex = Mat<T>::Zero(config.vocab, d);
    p.ep = Mat<T>::Zero(config.max_sl, d);
    p.es = Mat<T>::Zero(2, d);
    p.layers.resize(config.layers);
    for (auto& layer : p.layers) {
        layer.wq = Mat<T>::Zero(d, d);
        layer.wk = Mat<T>::Zero(d, d);
        layer.wv = Mat<T>::Zero(d, d);
        layer.wo = Mat<T>::Zero(d, d);
        layer.ffn_in = Mat<T>::Zero(d, inter);
        layer.ffn_in_b = Vec<T>::Zero(inter);
        layer.ffn_out = Mat<T>::Zero(inter, d);
        layer.ffn_out_b = Vec<T>::Zero(d);
        layer.ln1_g = Vec<T>::Zero(d);
        layer.ln1_b = Vec<T>::Zero(d);
        layer.ln2_g = Vec<T>::Zero(d);
        layer.ln2_b = Vec<T>::Zero(d);
    }
    p.wf = Mat<T>::Zero(d, d);
    p.lm_bias = Vec<T>::Zero(config.vocab);
    return p;
}

template <typename T>
Parameters<T> init_parameters(const ModelConfig& config, uint64_t seed) {
    Parameters<T> p = alloc_parameters<T>(config);
    TruncatedNormal draw(seed, 0.02);
    auto fill = [&](Mat<T>& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = static_cast<T>(draw.next());
        }
    };

    fill(p.ex);
    fill(p.ep);
    fill(p.es);
    for (auto& layer : p.layers) {
        fill(layer.wq);
        fill(layer.wk);
        fill(layer.wv);
        fill(layer.wo);
        fill(layer.ffn_in);
        fill(layer.ffn_out);
        layer.ln1_g.setOnes();
        layer.ln2_g.setOnes();
    }
    fill(p.wf);
    return p;
}

template <typename T>
Parameters<T> zeros_like(const Parameters<T>& p) {
    Parameters<T> z;
    z.config = p.config;
    z.ex = Mat<T>::Zero(p.ex.rows(), p.ex.cols());
    z.ep = Mat<T>::Zero(p.ep.rows(), p.ep.cols());
    z.es = Mat<T>::Zero(p.es.rows(), p.es.cols());
    z.layers.resize(p.layers.size());
    for (size_t l = 0; l < p.layers.size(); ++l) {
        const auto& src = p.layers[l];
        auto& dst = z.layers[l];
        dst.wq = Mat<T>::Zero(src.wq.rows(), src.wq.cols());
        dst.wk = Mat<T>::Zero(src.wk.rows(), src.wk.cols());
        dst.wv = Mat<T>::Zero(src.wv.rows(), src.wv.cols());
        dst.wo = Mat<T>::Zero(src.wo.rows(), src.wo.cols());
        dst.ffn_in = Mat<T>::Zero(src.ffn_in.rows(), src.ffn_in.cols());
        dst.ffn_in_b = Vec<T>::Zero(src.ffn_in_b.size());
        dst.ffn_out = Mat<T>::Zero(src.ffn_out.rows(), src.ffn_out.cols());
        dst.ffn_out_b = Vec<T>::Zero(src.ffn_out_b.size());
        dst.ln1_g = Vec<T>::Zero(src.ln1_g.size());
        dst.ln1_b = Vec<T>::Zero(src.ln1_b.size());
        dst.ln2_g = Vec<T>::Zero(src.ln2_g.size());
        dst.ln2_b = Vec<T>::Zero(src.ln2_b.size());
    }
    z.wf = Mat<T>::Zero(p.wf.rows(), p.wf.cols());
    z.lm_bias = Vec<T>::Zero(p.lm_bias.size());
    return z;
}

} // namespace uniasm
