#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "common/errors.hpp"
#include "model/params.hpp"

namespace uniasm {

enum class MaskMode : uint8_t { Bidirectional = 0, Alg = 1 };

// Large negative finite stand-in for -inf: softmax turns blocked logits into
// exact zero weights (the exponential underflows), without inf-inf NaNs.
template <typename T>
inline constexpr T kMaskBlocked = static_cast<T>(-1e9);

// len_first/len_second are function token counts; the packed layout adds CLS
// and the SEPs. Positions past the packed length are padding: blocked as
// columns everywhere and fully blocked as rows.
template <typename T>
Mat<T> build_mask(size_t len_first, size_t len_second, size_t total_len, MaskMode mode) {
    size_t prefix = len_first + 2;
    size_t second = len_second > 0 ? len_second + 1 : 0;
    size_t packed = prefix + second;
    if (packed > total_len) {
        throw ValidationError("packed length " + std::to_string(packed) +
                              " exceeds total length " + std::to_string(total_len));
    }

    Mat<T> m = Mat<T>::Constant(total_len, total_len, kMaskBlocked<T>);
    if (mode == MaskMode::Bidirectional) {
        for (size_t i = 0; i < packed; ++i) {
            for (size_t j = 0; j < packed; ++j) m(i, j) = T(0);
        }
        return m;
    }
    for (size_t i = 0; i < prefix; ++i) {
        for (size_t j = 0; j < prefix; ++j) m(i, j) = T(0);
    }
    for (size_t t = 0; t < second; ++t) {
        for (size_t j = 0; j < prefix + t + 1; ++j) m(prefix + t, j) = T(0);
    }
    return m;
}

template <typename T>
struct LayerTrace {
    Mat<T> x;                  // layer input
    Mat<T> q, k, v;            // n x d projections
    std::vector<Mat<T>> probs; // per-head attention weights, n x n
    Mat<T> ctx;                // concatenated head outputs before wo
    Mat<T> r1;                 // x + attention (pre-LN input)
    Mat<T> xhat1;
    Vec<T> inv_std1;
    Mat<T> y1;                 // LN1 output, FFN input
    Mat<T> u;                  // FFN pre-activation
    Mat<T> g;                  // gelu(u)
    Mat<T> r2;                 // y1 + FFN (pre-LN input)
    Mat<T> xhat2;
    Vec<T> inv_std2;
};

template <typename T>
struct ForwardTrace {
    std::vector<int32_t> ids;
    std::vector<int8_t> segments;
    std::vector<LayerTrace<T>> layers;
    Mat<T> h_final;
};

namespace detail {

template <typename T>
inline constexpr T kLnEps = static_cast<T>(1e-12);

// Row softmax with max subtraction, accumulated in ascending column order.
// Blocked columns come out as exact zeros.
template <typename T>
void row_softmax_inplace(Mat<T>& scores) {
    const Eigen::Index n = scores.cols();
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        T mx = scores(i, 0);
        for (Eigen::Index j = 1; j < n; ++j) mx = std::max(mx, scores(i, j));
        T sum = T(0);
        for (Eigen::Index j = 0; j < n; ++j) {
            T e = std::exp(scores(i, j) - mx);
            scores(i, j) = e;
            sum += e;
        }
        for (Eigen::Index j = 0; j < n; ++j) scores(i, j) /= sum;
    }
}

// y = gain (.) (x - mean)/sqrt(var + eps) + bias, per row; biased variance.
template <typename T>
void layer_norm(const Mat<T>& x, const Vec<T>& gain, const Vec<T>& bias, Mat<T>& y, Mat<T>& xhat,
                Vec<T>& inv_std) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    y.resize(n, d);
    xhat.resize(n, d);
    inv_std.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        T mean = T(0);
        for (Eigen::Index c = 0; c < d; ++c) mean += x(r, c);
        mean /= static_cast<T>(d);
        T var = T(0);
        for (Eigen::Index c = 0; c < d; ++c) {
            T centered = x(r, c) - mean;
            var += centered * centered;
        }
        var /= static_cast<T>(d);
        T is = T(1) / std::sqrt(var + kLnEps<T>);
        inv_std(r) = is;
        for (Eigen::Index c = 0; c < d; ++c) {
            T xh = (x(r, c) - mean) * is;
            xhat(r, c) = xh;
            y(r, c) = gain(c) * xh + bias(c);
        }
    }
}

// dX for layer norm given dY; accumulates dGain/dBias.
template <typename T>
void layer_norm_backward(const Mat<T>& dy, const Mat<T>& xhat, const Vec<T>& inv_std,
                         const Vec<T>& gain, Mat<T>& dx, Vec<T>& dgain, Vec<T>& dbias) {
    const Eigen::Index n = dy.rows();
    const Eigen::Index d = dy.cols();
    dx.resize(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        T m1 = T(0);
        T m2 = T(0);
        for (Eigen::Index c = 0; c < d; ++c) {
            T dxh = dy(r, c) * gain(c);
            m1 += dxh;
            m2 += dxh * xhat(r, c);
            dgain(c) += dy(r, c) * xhat(r, c);
            dbias(c) += dy(r, c);
        }
        m1 /= static_cast<T>(d);
        m2 /= static_cast<T>(d);
        for (Eigen::Index c = 0; c < d; ++c) {
            T dxh = dy(r, c) * gain(c);
            dx(r, c) = inv_std(r) * (dxh - m1 - xhat(r, c) * m2);
        }
    }
}

template <typename T>
inline constexpr T kInvSqrt2 = static_cast<T>(1.0 / std::numbers::sqrt2);

template <typename T>
T gelu(T x) {
    return T(0.5) * x * (T(1) + std::erf(x * kInvSqrt2<T>));
}

template <typename T>
T gelu_grad(T x) {
    // 1/sqrt(2*pi), the standard normal density at its mode
    constexpr T inv_sqrt_2pi = static_cast<T>(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
    return T(0.5) * (T(1) + std::erf(x * kInvSqrt2<T>)) +
           x * inv_sqrt_2pi * std::exp(T(-0.5) * x * x);
}

} // namespace detail

// Runs the stack over one (possibly padded) sequence. `mask` is n x n with
// entries 0 or the blocked sentinel. Returns H^L; pass `trace` to keep the
// activations backward needs.
template <typename T>
Mat<T> forward(const std::vector<int32_t>& ids, const std::vector<int8_t>& segments,
               const Mat<T>& mask, const Parameters<T>& params,
               ForwardTrace<T>* trace = nullptr) {
    const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
    const Eigen::Index d = params.ex.cols();
    if (n == 0) throw ValidationError("empty sequence");
    if (ids.size() != segments.size()) throw ValidationError("ids/segments length mismatch");
    if (n > params.ep.rows()) {
        throw ValidationError("sequence length " + std::to_string(ids.size()) +
                              " exceeds MaxSL " + std::to_string(params.ep.rows()));
    }
    if (mask.rows() != n || mask.cols() != n) throw ValidationError("mask shape mismatch");
    for (size_t p = 0; p < ids.size(); ++p) {
        if (ids[p] < 0 || ids[p] >= params.ex.rows()) {
            throw ValidationError("token id out of range: " + std::to_string(ids[p]));
        }
        if (segments[p] != 0 && segments[p] != 1) {
            throw ValidationError("segment id out of range");
        }
    }

    const size_t num_layers = params.layers.size();
    const Eigen::Index heads = params.config.heads;
    const Eigen::Index dk = d / heads;
    const T scale = T(1) / std::sqrt(static_cast<T>(dk));

    if (trace) {
        trace->ids = ids;
        trace->segments = segments;
        trace->layers.clear();
        trace->layers.resize(num_layers);
    }

    Mat<T> h(n, d);
    for (Eigen::Index p = 0; p < n; ++p) {
        h.row(p) = params.ex.row(ids[static_cast<size_t>(p)]) + params.ep.row(p) +
                   params.es.row(segments[static_cast<size_t>(p)]);
    }

    for (size_t l = 0; l < num_layers; ++l) {
        const auto& layer = params.layers[l];
        LayerTrace<T> lt;
        lt.x = h;

        lt.q = lt.x * layer.wq;
        lt.k = lt.x * layer.wk;
        lt.v = lt.x * layer.wv;

        lt.ctx.resize(n, d);
        lt.probs.clear();
        lt.probs.reserve(static_cast<size_t>(heads));
        for (Eigen::Index a = 0; a < heads; ++a) {
            auto qa = lt.q.middleCols(a * dk, dk);
            auto ka = lt.k.middleCols(a * dk, dk);
            auto va = lt.v.middleCols(a * dk, dk);
            Mat<T> probs = qa * ka.transpose();
            probs *= scale;
            probs += mask;
            detail::row_softmax_inplace(probs);

            auto ctx_a = lt.ctx.middleCols(a * dk, dk);
            for (Eigen::Index i = 0; i < n; ++i) {
                ctx_a.row(i).setZero();
                for (Eigen::Index j = 0; j < n; ++j) {
                    T pij = probs(i, j);
                    if (pij != T(0)) ctx_a.row(i) += pij * va.row(j);
                }
            }
            lt.probs.push_back(std::move(probs));
        }

        lt.r1 = lt.x + lt.ctx * layer.wo;
        detail::layer_norm(lt.r1, layer.ln1_g, layer.ln1_b, lt.y1, lt.xhat1, lt.inv_std1);

        lt.u = (lt.y1 * layer.ffn_in).rowwise() + layer.ffn_in_b.transpose();
        lt.g = lt.u.unaryExpr([](T x) { return detail::gelu(x); });
        lt.r2 = lt.y1 + ((lt.g * layer.ffn_out).rowwise() + layer.ffn_out_b.transpose());

        Mat<T> xhat2;
        Vec<T> inv_std2;
        detail::layer_norm(lt.r2, layer.ln2_g, layer.ln2_b, h, xhat2, inv_std2);
        lt.xhat2 = std::move(xhat2);
        lt.inv_std2 = std::move(inv_std2);

        if (!h.allFinite()) {
            throw RuntimeFault("non-finite activation in layer " + std::to_string(l));
        }
        if (trace) {
            trace->layers[l] = std::move(lt);
        }
    }

    if (trace) trace->h_final = h;
    return h;
}

// v_F = tanh(h_CLS) . W^F
template <typename T>
Vec<T> function_embedding(const Vec<T>& h_cls, const Parameters<T>& params) {
    Vec<T> t = h_cls.unaryExpr([](T x) { return std::tanh(x); });
    return params.wf.transpose() * t;
}

// Given dL/dv_F, returns dL/dh_CLS and accumulates dW^F.
template <typename T>
Vec<T> function_embedding_backward(const Vec<T>& h_cls, const Parameters<T>& params,
                                   const Vec<T>& d_vf, Parameters<T>& grads) {
    Vec<T> t = h_cls.unaryExpr([](T x) { return std::tanh(x); });
    grads.wf += t * d_vf.transpose();
    Vec<T> dt = params.wf * d_vf;
    return dt.cwiseProduct(t.unaryExpr([](T x) { return T(1) - x * x; }));
}

// logits = rows . Ex^T + bias, weight-tied to the token table.
template <typename T>
Mat<T> lm_logits(const Mat<T>& rows, const Parameters<T>& params) {
    Mat<T> logits = rows * params.ex.transpose();
    logits.rowwise() += params.lm_bias.transpose();
    return logits;
}

// Given dL/dlogits, returns dL/drows and accumulates dEx (tied) and dBias.
template <typename T>
Mat<T> lm_logits_backward(const Mat<T>& rows, const Mat<T>& d_logits,
                          const Parameters<T>& params, Parameters<T>& grads) {
    grads.ex += d_logits.transpose() * rows;
    grads.lm_bias += d_logits.colwise().sum().transpose();
    return d_logits * params.ex;
}

// Exact reverse pass for `forward`. `d_h_final` is dL/dH^L; parameter
// gradients are accumulated into `grads` (token-table gradients from the tied
// LM head belong to the caller via lm_logits_backward).
template <typename T>
void backward(const ForwardTrace<T>& trace, const Mat<T>& d_h_final, const Parameters<T>& params,
              Parameters<T>& grads) {
    if (trace.layers.size() != params.layers.size() || trace.h_final.size() == 0) {
        throw ValidationError("backward requires a trace from a train-mode forward");
    }
    const Eigen::Index n = trace.h_final.rows();
    const Eigen::Index d = trace.h_final.cols();
    if (d_h_final.rows() != n || d_h_final.cols() != d) {
        throw ValidationError("upstream gradient shape mismatch");
    }
    const Eigen::Index heads = params.config.heads;
    const Eigen::Index dk = d / heads;
    const T scale = T(1) / std::sqrt(static_cast<T>(dk));

    Mat<T> dh = d_h_final;
    for (size_t li = params.layers.size(); li-- > 0;) {
        const auto& layer = params.layers[li];
        const auto& lt = trace.layers[li];
        auto& gl = grads.layers[li];

        Mat<T> dr2;
        detail::layer_norm_backward(dh, lt.xhat2, lt.inv_std2, layer.ln2_g, dr2, gl.ln2_g,
                                    gl.ln2_b);

        // r2 = y1 + gelu(y1 * ffn_in + b) * ffn_out + b
        Mat<T> dy1 = dr2;
        Mat<T> dg = dr2 * layer.ffn_out.transpose();
        gl.ffn_out += lt.g.transpose() * dr2;
        gl.ffn_out_b += dr2.colwise().sum().transpose();
        Mat<T> du = dg.cwiseProduct(lt.u.unaryExpr([](T x) { return detail::gelu_grad(x); }));
        dy1 += du * layer.ffn_in.transpose();
        gl.ffn_in += lt.y1.transpose() * du;
        gl.ffn_in_b += du.colwise().sum().transpose();

        Mat<T> dr1;
        detail::layer_norm_backward(dy1, lt.xhat1, lt.inv_std1, layer.ln1_g, dr1, gl.ln1_g,
                                    gl.ln1_b);

        // r1 = x + ctx * wo
        Mat<T> dx = dr1;
        Mat<T> dctx = dr1 * layer.wo.transpose();
        gl.wo += lt.ctx.transpose() * dr1;

        Mat<T> dq(n, d);
        Mat<T> dkm(n, d);
        Mat<T> dv(n, d);
        for (Eigen::Index a = 0; a < heads; ++a) {
            const Mat<T>& probs = lt.probs[static_cast<size_t>(a)];
            auto qa = lt.q.middleCols(a * dk, dk);
            auto ka = lt.k.middleCols(a * dk, dk);
            auto va = lt.v.middleCols(a * dk, dk);
            auto dctx_a = dctx.middleCols(a * dk, dk);

            Mat<T> dp = dctx_a * va.transpose();
            dv.middleCols(a * dk, dk) = probs.transpose() * dctx_a;

            Mat<T> ds(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                T dot = T(0);
                for (Eigen::Index j = 0; j < n; ++j) dot += dp(i, j) * probs(i, j);
                for (Eigen::Index j = 0; j < n; ++j) {
                    ds(i, j) = probs(i, j) * (dp(i, j) - dot);
                }
            }
            ds *= scale;
            dq.middleCols(a * dk, dk) = ds * ka;
            dkm.middleCols(a * dk, dk) = ds.transpose() * qa;
        }

        dx += dq * layer.wq.transpose();
        dx += dkm * layer.wk.transpose();
        dx += dv * layer.wv.transpose();
        gl.wq += lt.x.transpose() * dq;
        gl.wk += lt.x.transpose() * dkm;
        gl.wv += lt.x.transpose() * dv;

        dh = std::move(dx);
    }

    for (Eigen::Index p = 0; p < n; ++p) {
        grads.ex.row(trace.ids[static_cast<size_t>(p)]) += dh.row(p);
        grads.ep.row(p) += dh.row(p);
        grads.es.row(trace.segments[static_cast<size_t>(p)]) += dh.row(p);
    }
}

} // namespace uniasm
