#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace charisma {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Row-wise softmax with max subtraction so large logits stay finite.
template <typename Derived>
Mat<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    Mat<Scalar> shifted = x.colwise() - x.rowwise().maxCoeff();
    Mat<Scalar> e = shifted.array().exp().matrix();
    Vec<Scalar> sums = e.rowwise().sum();
    return (e.array().colwise() / sums.array()).matrix();
}

// Exact gaussian gelu, 0.5 x (1 + erf(x / sqrt 2)).
template <typename Derived>
Mat<typename Derived::Scalar> gelu(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
    return x.array()
        .unaryExpr([inv_sqrt2](Scalar v) {
            return Scalar(0.5) * v * (Scalar(1) + std::erf(v * inv_sqrt2));
        })
        .matrix();
}

template <typename Derived>
Mat<typename Derived::Scalar> gelu_grad(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
    const Scalar inv_sqrt2pi = Scalar(0.39894228040143267794L);
    return x.array()
        .unaryExpr([inv_sqrt2, inv_sqrt2pi](Scalar v) {
            Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(v * inv_sqrt2));
            Scalar pdf = inv_sqrt2pi * std::exp(Scalar(-0.5) * v * v);
            return cdf + v * pdf;
        })
        .matrix();
}

template <typename Scalar>
struct LayerNormCache {
    Mat<Scalar> normalized;  // x-hat, same shape as the input
    Vec<Scalar> rstd;        // per-row reciprocal standard deviation
};

// Normalizes each row to zero mean and unit variance, then scales and
// shifts. Biased variance, matching the transformer convention.
template <typename Scalar>
Mat<Scalar> layer_norm_rows(const Mat<Scalar>& x, const Vec<Scalar>& gamma,
                            const Vec<Scalar>& beta, Scalar eps,
                            LayerNormCache<Scalar>* cache = nullptr) {
    Vec<Scalar> mean = x.rowwise().mean();
    Mat<Scalar> centered = x.colwise() - mean;
    Vec<Scalar> var = centered.array().square().rowwise().mean().matrix();
    Vec<Scalar> rstd = (var.array() + eps).rsqrt().matrix();
    Mat<Scalar> normalized = (centered.array().colwise() * rstd.array()).matrix();
    Mat<Scalar> out = ((normalized.array().rowwise() * gamma.transpose().array())
                           .rowwise() +
                       beta.transpose().array())
                          .matrix();
    if (cache != nullptr) {
        cache->normalized = normalized;
        cache->rstd = std::move(rstd);
    }
    return out;
}

// Backward pass for layer_norm_rows. Accumulates parameter gradients into
// dgamma/dbeta and returns the gradient with respect to the input.
template <typename Scalar>
Mat<Scalar> layer_norm_backward(const Mat<Scalar>& dout,
                                const LayerNormCache<Scalar>& cache,
                                const Vec<Scalar>& gamma, Vec<Scalar>& dgamma,
                                Vec<Scalar>& dbeta) {
    const Scalar n = static_cast<Scalar>(dout.cols());
    dgamma +=
        (dout.array() * cache.normalized.array()).colwise().sum().transpose().matrix();
    dbeta += dout.colwise().sum().transpose();

    Mat<Scalar> dxhat = (dout.array().rowwise() * gamma.transpose().array()).matrix();
    Vec<Scalar> sum_dxhat = dxhat.rowwise().sum();
    Vec<Scalar> sum_dxhat_xhat =
        (dxhat.array() * cache.normalized.array()).rowwise().sum().matrix();

    Mat<Scalar> inner = dxhat;
    inner.colwise() -= sum_dxhat / n;
    inner -= (cache.normalized.array().colwise() * (sum_dxhat_xhat / n).array()).matrix();
    return (inner.array().colwise() * cache.rstd.array()).matrix();
}

// Softmax Jacobian applied row-wise: dS = P o (dP - rowsum(dP o P)).
template <typename Scalar>
Mat<Scalar> softmax_rows_backward(const Mat<Scalar>& dprobs, const Mat<Scalar>& probs) {
    Vec<Scalar> dot = (dprobs.array() * probs.array()).rowwise().sum().matrix();
    Mat<Scalar> shifted = dprobs;
    shifted.colwise() -= dot;
    return (probs.array() * shifted.array()).matrix();
}

}  // namespace charisma
