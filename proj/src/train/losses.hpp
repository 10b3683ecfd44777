#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "common/errors.hpp"
#include "dataset/dataset.hpp"
#include "model/net.hpp"
#include "tokenizer/vocab.hpp"

namespace uniasm {

namespace detail {

// Row-wise softmax cross-entropy over the vocabulary. Returns the summed
// -log p(target); when d_logits is non-null each row receives
// softmax - onehot, unscaled (the caller applies its reduction factor).
template <typename T>
T cross_entropy_rows(const Mat<T>& logits, const std::vector<int32_t>& targets,
                     Mat<T>* d_logits) {
    const Eigen::Index rows = logits.rows();
    const Eigen::Index v = logits.cols();
    if (static_cast<size_t>(rows) != targets.size()) {
        throw ValidationError("target count does not match logit rows");
    }
    if (d_logits) d_logits->resize(rows, v);

    T total = T(0);
    for (Eigen::Index r = 0; r < rows; ++r) {
        int32_t target = targets[static_cast<size_t>(r)];
        if (target < 0 || target >= v) throw ValidationError("target id out of range");
        T mx = logits(r, 0);
        for (Eigen::Index c = 1; c < v; ++c) mx = std::max(mx, logits(r, c));
        T sum = T(0);
        for (Eigen::Index c = 0; c < v; ++c) sum += std::exp(logits(r, c) - mx);
        T lse = mx + std::log(sum);
        total += lse - logits(r, target);
        if (d_logits) {
            for (Eigen::Index c = 0; c < v; ++c) {
                d_logits->coeffRef(r, c) = std::exp(logits(r, c) - lse);
            }
            d_logits->coeffRef(r, target) -= T(1);
        }
    }
    return total;
}

// dv for a row normalized as v / sqrt(v.v + eps).
template <typename T>
void l2_normalize_backward(const Vec<T>& v, T norm, const Vec<T>& d_normalized, Vec<T>& dv) {
    T inv = T(1) / norm;
    T along = v.dot(d_normalized);
    dv = d_normalized * inv - v * (along * inv * inv * inv);
}

} // namespace detail

inline constexpr double kNormEps = 1e-12;

// L2 row normalization with the epsilon guard inside the square root. An
// exactly zero-norm row is a numeric fault.
template <typename T>
Mat<T> l2_normalize_rows(const Mat<T>& m, Vec<T>* norms = nullptr) {
    Mat<T> out(m.rows(), m.cols());
    if (norms) norms->resize(m.rows());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        T sumsq = m.row(r).squaredNorm();
        if (sumsq == T(0)) throw RuntimeFault("zero-norm function embedding");
        T norm = std::sqrt(sumsq + static_cast<T>(kNormEps));
        out.row(r) = m.row(r) / norm;
        if (norms) (*norms)(r) = norm;
    }
    return out;
}

// Contrastive loss over a batch of pair embeddings arranged so rows 2k and
// 2k+1 are a pair and its swap: similarity matrix of the normalized rows,
// diagonal replaced by the blocked sentinel, row softmax, mean -log
// probability of each row's partner (k XOR 1).
template <typename T>
T sfp_from_embeddings(const Mat<T>& embeddings, Mat<T>* d_embeddings) {
    const Eigen::Index b = embeddings.rows();
    if (b < 2 || b % 2 != 0) throw ValidationError("SFP batch size must be even and >= 2");

    Vec<T> norms;
    Mat<T> normalized = l2_normalize_rows(embeddings, &norms);
    Mat<T> sims = normalized * normalized.transpose();
    for (Eigen::Index k = 0; k < b; ++k) sims(k, k) = kMaskBlocked<T>;

    Mat<T> probs = sims;
    detail::row_softmax_inplace(probs);

    T loss = T(0);
    for (Eigen::Index k = 0; k < b; ++k) {
        Eigen::Index partner = k ^ 1;
        // log of the softmax row recomputed stably from the raw scores
        T mx = sims(k, 0);
        for (Eigen::Index j = 1; j < b; ++j) mx = std::max(mx, sims(k, j));
        T sum = T(0);
        for (Eigen::Index j = 0; j < b; ++j) sum += std::exp(sims(k, j) - mx);
        loss += (mx + std::log(sum)) - sims(k, partner);
    }
    loss /= static_cast<T>(b);

    if (d_embeddings) {
        Mat<T> d_sims = probs / static_cast<T>(b);
        for (Eigen::Index k = 0; k < b; ++k) d_sims(k, k ^ 1) -= T(1) / static_cast<T>(b);
        // the diagonal was overwritten by a constant, so no gradient flows
        // through it; softmax already left it at exactly zero
        Mat<T> d_normalized = (d_sims + d_sims.transpose()) * normalized;
        d_embeddings->resize(b, embeddings.cols());
        for (Eigen::Index k = 0; k < b; ++k) {
            Vec<T> dv;
            Vec<T> row = embeddings.row(k).transpose();
            Vec<T> drow = d_normalized.row(k).transpose();
            detail::l2_normalize_backward(row, norms(k), drow, dv);
            d_embeddings->row(k) = dv.transpose();
        }
    }
    return loss;
}

struct BatchLosses {
    double alg = 0.0;
    double sfp = 0.0;
    double total = 0.0;
    size_t alg_targets = 0;
};

// One forward per sample under the generation mask serves both objectives:
// next-token prediction on the second segment (shifted logits, final SEP
// included) and the contrastive loss over the CLS function embeddings. The
// CLS row only attends the prefix, so its embedding matches single-function
// inference. Gradients accumulate into `grads` when non-null.
template <typename T>
BatchLosses joint_loss(const std::vector<const PackedSequence*>& batch,
                       const Parameters<T>& params, bool do_alg, bool do_sfp,
                       Parameters<T>* grads) {
    if (batch.empty()) throw ValidationError("empty batch");
    if (!do_alg && !do_sfp) throw ValidationError("no training task enabled");
    const size_t b = batch.size();
    if (do_sfp && (b < 2 || b % 2 != 0)) {
        throw ValidationError("SFP requires an even batch of at least 2");
    }
    const Eigen::Index d = params.ex.cols();

    struct SampleState {
        ForwardTrace<T> trace;
        Mat<T> h;
        Mat<T> rows;      // logit input rows for the ALG shift
        Mat<T> d_logits;  // softmax - onehot, unscaled
        size_t row_start = 0;
    };
    std::vector<SampleState> states(b);

    size_t total_targets = 0;
    double alg_sum = 0.0;
    Mat<T> embeddings(b, d);
    for (size_t s = 0; s < b; ++s) {
        const PackedSequence& seq = *batch[s];
        Mat<T> mask =
            build_mask<T>(seq.len_first, seq.len_second, seq.ids.size(), MaskMode::Alg);
        states[s].h = forward<T>(seq.ids, seq.segments, mask, params,
                                 grads ? &states[s].trace : nullptr);

        if (do_alg && seq.len_second > 0) {
            size_t prefix = seq.len_first + 2;
            size_t m = seq.len_second + 1;
            states[s].row_start = prefix - 1;
            states[s].rows = states[s].h.middleRows(static_cast<Eigen::Index>(prefix - 1),
                                                    static_cast<Eigen::Index>(m));
            Mat<T> logits = lm_logits(states[s].rows, params);
            std::vector<int32_t> targets(seq.ids.begin() + static_cast<long>(prefix),
                                         seq.ids.begin() + static_cast<long>(prefix + m));
            alg_sum += static_cast<double>(detail::cross_entropy_rows(
                logits, targets, grads ? &states[s].d_logits : nullptr));
            total_targets += m;
        }
        if (do_sfp) {
            Vec<T> h_cls = states[s].h.row(0).transpose();
            embeddings.row(static_cast<Eigen::Index>(s)) =
                function_embedding(h_cls, params).transpose();
        }
    }

    BatchLosses out;
    if (do_alg) {
        if (total_targets == 0) throw ValidationError("batch contains zero generation targets");
        out.alg = alg_sum / static_cast<double>(total_targets);
        out.alg_targets = total_targets;
    }

    Mat<T> d_embeddings;
    if (do_sfp) {
        out.sfp = static_cast<double>(
            sfp_from_embeddings<T>(embeddings, grads ? &d_embeddings : nullptr));
    }
    out.total = out.alg + out.sfp;

    if (grads) {
        for (size_t s = 0; s < b; ++s) {
            const PackedSequence& seq = *batch[s];
            Mat<T> d_h = Mat<T>::Zero(states[s].h.rows(), d);
            if (do_alg && seq.len_second > 0) {
                states[s].d_logits /= static_cast<T>(total_targets);
                Mat<T> d_rows =
                    lm_logits_backward(states[s].rows, states[s].d_logits, params, *grads);
                d_h.middleRows(static_cast<Eigen::Index>(states[s].row_start), d_rows.rows()) +=
                    d_rows;
            }
            if (do_sfp) {
                Vec<T> h_cls = states[s].h.row(0).transpose();
                Vec<T> d_vf = d_embeddings.row(static_cast<Eigen::Index>(s)).transpose();
                Vec<T> d_cls = function_embedding_backward(h_cls, params, d_vf, *grads);
                d_h.row(0) += d_cls.transpose();
            }
            backward(states[s].trace, d_h, params, *grads);
        }
    }
    return out;
}

struct MlmResult {
    double loss = 0.0;
    size_t masked_positions = 0;
    size_t skipped_samples = 0;
};

// Masked-token ablation objective: per sample, round-half-up mask_rate of the
// non-special positions are replaced by MASK under a bidirectional mask, and
// the model predicts the originals. Samples too short to mask are skipped.
template <typename T>
MlmResult mlm_loss(const std::vector<const PackedSequence*>& batch, const Parameters<T>& params,
                   double mask_rate, uint64_t seed, Parameters<T>* grads) {
    if (batch.empty()) throw ValidationError("empty batch");
    if (!(mask_rate > 0.0 && mask_rate < 1.0)) {
        throw ValidationError("mlm mask rate must lie in (0, 1)");
    }
    std::mt19937_64 rng(seed);
    const Eigen::Index d = params.ex.cols();

    struct SampleState {
        ForwardTrace<T> trace;
        Mat<T> h;
        Mat<T> rows;
        Mat<T> d_logits;
        std::vector<size_t> positions;
    };
    std::vector<SampleState> states;
    states.reserve(batch.size());

    MlmResult out;
    double sum = 0.0;
    for (const PackedSequence* seqp : batch) {
        const PackedSequence& seq = *seqp;
        std::vector<size_t> maskable;
        for (size_t p = 0; p < seq.ids.size(); ++p) {
            int32_t id = seq.ids[p];
            if (id != kPadId && id != kClsId && id != kSepId && id != kMaskId) {
                maskable.push_back(p);
            }
        }
        size_t count = static_cast<size_t>(
            std::floor(mask_rate * static_cast<double>(maskable.size()) + 0.5));
        if (count == 0) {
            ++out.skipped_samples;
            continue;
        }
        for (size_t i = 0; i < count; ++i) {
            size_t j = i + static_cast<size_t>(rng() % (maskable.size() - i));
            std::swap(maskable[i], maskable[j]);
        }
        maskable.resize(count);
        std::sort(maskable.begin(), maskable.end());

        std::vector<int32_t> masked_ids = seq.ids;
        for (size_t p : maskable) masked_ids[p] = kMaskId;

        SampleState st;
        st.positions = maskable;
        Mat<T> mask =
            build_mask<T>(seq.len_first, seq.len_second, seq.ids.size(), MaskMode::Bidirectional);
        st.h = forward<T>(masked_ids, seq.segments, mask, params, grads ? &st.trace : nullptr);

        st.rows.resize(static_cast<Eigen::Index>(count), d);
        std::vector<int32_t> targets(count);
        for (size_t r = 0; r < count; ++r) {
            st.rows.row(static_cast<Eigen::Index>(r)) =
                st.h.row(static_cast<Eigen::Index>(maskable[r]));
            targets[r] = seq.ids[maskable[r]];
        }
        Mat<T> logits = lm_logits(st.rows, params);
        sum += static_cast<double>(
            detail::cross_entropy_rows(logits, targets, grads ? &st.d_logits : nullptr));
        out.masked_positions += count;
        states.push_back(std::move(st));
    }

    // A batch where every sample was too short contributes nothing.
    if (out.masked_positions == 0) {
        out.loss = 0.0;
        return out;
    }
    out.loss = sum / static_cast<double>(out.masked_positions);

    if (grads) {
        for (auto& st : states) {
            st.d_logits /= static_cast<T>(out.masked_positions);
            Mat<T> d_rows = lm_logits_backward(st.rows, st.d_logits, params, *grads);
            Mat<T> d_h = Mat<T>::Zero(st.h.rows(), d);
            for (size_t r = 0; r < st.positions.size(); ++r) {
                d_h.row(static_cast<Eigen::Index>(st.positions[r])) +=
                    d_rows.row(static_cast<Eigen::Index>(r));
            }
            backward(st.trace, d_h, params, *grads);
        }
    }
    return out;
}

} // namespace uniasm
