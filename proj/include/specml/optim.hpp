#pragma once

#include <cstdint>
#include <vector>

#include "specml/tensor.hpp"

namespace specml {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
};

struct AdamState {
    int64_t step = 0;
    std::vector<Tensor> m, v;
};

AdamState make_adam_state(const std::vector<Tensor*>& params);

/// Standard bias-corrected Adam step, in place.
void adam_update(const AdamConfig& cfg, AdamState& state,
                 const std::vector<Tensor*>& params,
                 const std::vector<const Tensor*>& grads);

/// ema <- decay * ema + (1 - decay) * params, in place.
void ema_update(std::vector<Tensor>& ema, const std::vector<Tensor*>& params,
                double decay = 0.98);

}  // namespace specml
