#pragma once

#include <functional>

#include "specml/equations.hpp"
#include "specml/stepper.hpp"
#include "specml/tape.hpp"
#include "specml/tensor.hpp"

namespace specml {

/// Correction hook on the tape; receives the real-space state and returns a
/// same-shaped correction field.
using TapeCorrection = std::function<Var(Tape&, Var)>;

/// Differentiable mirror of the production stepper: the same IMEX template
/// evaluated over tape variables, with every per-mode factor precomputed as
/// a spectral symbol. States are real-space one-channel tensors; production
/// and tape trajectories agree to spectral round-off.
class TapeStepper {
  public:
    TapeStepper(const EquationSpec& spec, const StepperConfig& cfg);

    const EquationSpec& equation() const { return spec_; }
    const StepperConfig& config() const { return cfg_; }
    double dt() const { return cfg_.dt; }

    Tensor state_tensor(const SpectralState& state) const;
    SpectralState spectral_state(const Tensor& state, double time = 0.0) const;

    Var physics_step(Tape& tape, Var u) const;
    /// physics_step(u) + dt * correction(u).
    Var hybrid_step(Tape& tape, Var u, const TapeCorrection& correction) const;
    /// Explicit tendency replaced by N(u) - correction(u) per sub-stage.
    Var nonlinear_corrected_step(Tape& tape, Var u,
                                 const TapeCorrection& correction) const;
    Var tendency(Tape& tape, Var u) const;

  private:
    friend class TapeVarOps;

    EquationSpec spec_;
    StepperConfig cfg_;
    Symbol d1_;                  // 1D first derivative
    Symbol dx_, dy_, vx_, vy_;   // 2D vorticity gradient and velocity solve
    Symbol cn_gain_half_, cn_tend_half_;  // a = dt/2
    Symbol cn_gain_full_, cn_tend_full_;  // a = dt
    Symbol euler_gain_;
    Symbol filter_;              // empty when the filter is disabled
    Tensor forcing_;
    bool forced_ = false;
};

}  // namespace specml
