#include "specml/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace specml {

AdamState make_adam_state(const std::vector<Tensor*>& params) {
    AdamState s;
    for (const Tensor* p : params) {
        s.m.emplace_back(p->dims, p->nx, p->ny, p->channels);
        s.v.emplace_back(p->dims, p->nx, p->ny, p->channels);
    }
    return s;
}

void adam_update(const AdamConfig& cfg, AdamState& state,
                 const std::vector<Tensor*>& params,
                 const std::vector<const Tensor*>& grads) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam: param/grad/state count mismatch");

    state.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = *grads[i];
        require_same_shape(p, g, "adam");
        Tensor &m = state.m[i], &v = state.v[i];
        for (int64_t j = 0; j < p.numel(); ++j) {
            m.data[j] = cfg.beta1 * m.data[j] + (1.0 - cfg.beta1) * g.data[j];
            v.data[j] = cfg.beta2 * v.data[j] +
                        (1.0 - cfg.beta2) * g.data[j] * g.data[j];
            double m_hat = m.data[j] / bc1;
            double v_hat = v.data[j] / bc2;
            p.data[j] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

void ema_update(std::vector<Tensor>& ema, const std::vector<Tensor*>& params,
                double decay) {
    if (ema.size() != params.size())
        throw std::invalid_argument("ema: param count mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        require_same_shape(ema[i], *params[i], "ema");
        for (int64_t j = 0; j < ema[i].numel(); ++j)
            ema[i].data[j] = decay * ema[i].data[j] +
                             (1.0 - decay) * params[i]->data[j];
    }
}

}  // namespace specml
