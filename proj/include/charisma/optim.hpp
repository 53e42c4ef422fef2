#pragma once

#include <vector>

#include "charisma/errors.hpp"
#include "charisma/nn.hpp"

namespace charisma {

// Decoupled weight decay Adam. Defaults follow the reference
// implementation shipped with the major deep learning framework:
// betas (0.9, 0.999), eps 1e-8, weight decay 0.01, decay applied to
// every parameter in the single group.
struct AdamWConfig {
    double learning_rate = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

template <typename Scalar>
class AdamW {
public:
    using Views = std::vector<Eigen::Map<Vec<Scalar>>>;

    explicit AdamW(const AdamWConfig& config) : config_(config) {
        if (config.learning_rate <= 0) {
            throw ArgumentError("learning rate must be positive");
        }
    }

    // Applies one update. params and grads must come from the same
    // visit order; slot shapes are fixed on first call.
    void step(Views& params, const Views& grads) {
        if (params.size() != grads.size()) {
            throw ArgumentError("parameter/gradient slot mismatch");
        }
        if (m_.empty()) {
            for (const auto& p : params) {
                m_.emplace_back(Vec<Scalar>::Zero(p.size()));
                v_.emplace_back(Vec<Scalar>::Zero(p.size()));
            }
        }
        ++t_;
        const Scalar lr = static_cast<Scalar>(config_.learning_rate);
        const Scalar b1 = static_cast<Scalar>(config_.beta1);
        const Scalar b2 = static_cast<Scalar>(config_.beta2);
        const Scalar eps = static_cast<Scalar>(config_.eps);
        const Scalar wd = static_cast<Scalar>(config_.weight_decay);
        const Scalar bc1 = Scalar(1) - static_cast<Scalar>(std::pow(config_.beta1, t_));
        const Scalar bc2 = Scalar(1) - static_cast<Scalar>(std::pow(config_.beta2, t_));

        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& p = params[i];
            const auto& g = grads[i];
            auto& m = m_[i];
            auto& v = v_[i];
            m = b1 * m + (Scalar(1) - b1) * g;
            v = (b2 * v.array() + (Scalar(1) - b2) * g.array().square()).matrix();
            p = ((Scalar(1) - lr * wd) * p.array() -
                 lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps))
                    .matrix();
        }
    }

    long long steps_taken() const { return t_; }
    const AdamWConfig& config() const { return config_; }

private:
    AdamWConfig config_;
    std::vector<Vec<Scalar>> m_;
    std::vector<Vec<Scalar>> v_;
    long long t_ = 0;
};

}  // namespace charisma
