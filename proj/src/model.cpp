#include "specml/model.hpp"

#include <stdexcept>

namespace specml {

namespace {

CorrectionFn correction_fn_for(const Model& model) {
    CorrectionConfig cfg = model.correction;
    switch (model.type) {
        case ModelType::spectral_only:
            return CorrectionFn{};
        case ModelType::split_operator:
            cfg.mode = CorrectionMode::split_operator;
            return make_correction_fn(cfg, model.params);
        case ModelType::nonlinear_term:
            cfg.mode = CorrectionMode::nonlinear_term;
            return make_correction_fn(cfg, model.params);
        case ModelType::pure_ml:
            throw std::logic_error("pure_ml is not a physics correction");
    }
    throw std::logic_error("bad model type");
}

}  // namespace

ModelType model_type_from_string(const std::string& s) {
    if (s == "spectral_only") return ModelType::spectral_only;
    if (s == "split_operator") return ModelType::split_operator;
    if (s == "nonlinear_term") return ModelType::nonlinear_term;
    if (s == "pure_ml") return ModelType::pure_ml;
    throw std::invalid_argument("unknown model type: " + s);
}

std::string to_string(ModelType t) {
    switch (t) {
        case ModelType::spectral_only: return "spectral_only";
        case ModelType::split_operator: return "split_operator";
        case ModelType::nonlinear_term: return "nonlinear_term";
        case ModelType::pure_ml: return "pure_ml";
    }
    throw std::logic_error("bad model type");
}

SpectralState model_step(const Model& model, const EquationSpec& spec,
                         const StepperConfig& cfg,
                         const SpectralState& state) {
    switch (model.type) {
        case ModelType::spectral_only:
            return physics_step(spec, state, cfg);
        case ModelType::split_operator:
            return hybrid_step(spec, state, cfg, correction_fn_for(model));
        case ModelType::nonlinear_term:
            return nonlinear_corrected_step(spec, state, cfg,
                                            correction_fn_for(model));
        case ModelType::pure_ml: {
            SpectralState next =
                pure_ml_step(model.correction, model.params, state, cfg.dt);
            if (!all_finite(next)) throw SolverDivergence(next.time);
            return next;
        }
    }
    throw std::logic_error("bad model type");
}

UnrollResult model_unroll(const Model& model, const EquationSpec& spec,
                          const StepperConfig& cfg, const SpectralState& state,
                          int n_steps, int stride) {
    if (model.type != ModelType::pure_ml)
        return unroll(spec, state, cfg, correction_fn_for(model), n_steps,
                      stride);

    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    UnrollResult result;
    result.states.reserve((n_steps + stride - 1) / stride);
    SpectralState current = state;
    for (int s = 1; s <= n_steps; ++s) {
        current = pure_ml_step(model.correction, model.params, current, cfg.dt);
        if (!all_finite(current) || real_space_max(current) > 1e6) {
            result.diverged = true;
            break;
        }
        result.last_finite_step = s;
        if (s % stride == 0 || s == n_steps) result.states.push_back(current);
    }
    return result;
}

}  // namespace specml
