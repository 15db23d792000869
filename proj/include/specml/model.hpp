#pragma once

#include <string>

#include "specml/correction.hpp"
#include "specml/stepper.hpp"

namespace specml {

/// Solver variants compared in experiments: the coarse spectral solver
/// alone, physics plus a learned correction (split-operator or inside the
/// nonlinear term), or the network stepping on its own.
enum class ModelType { spectral_only, split_operator, nonlinear_term, pure_ml };

ModelType model_type_from_string(const std::string& s);
std::string to_string(ModelType t);

struct Model {
    ModelType type = ModelType::spectral_only;
    CorrectionConfig correction;  // ignored for spectral_only
    EpdParams params;             // ignored for spectral_only
};

SpectralState model_step(const Model& model, const EquationSpec& spec,
                         const StepperConfig& cfg, const SpectralState& state);

/// unroll() driven by the model; pure_ml replaces the physics step entirely
/// and shares the divergence handling (truncate and flag, never throw).
UnrollResult model_unroll(const Model& model, const EquationSpec& spec,
                          const StepperConfig& cfg, const SpectralState& state,
                          int n_steps, int stride = 1);

}  // namespace specml
