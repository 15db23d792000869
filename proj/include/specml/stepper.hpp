#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "specml/equations.hpp"
#include "specml/spectral_ops.hpp"
#include "specml/state.hpp"

namespace specml {

enum class Scheme { imex_cn_rk4, forward_euler };

struct StepperConfig {
    double dt = 0.0;
    double cfl_safety = 1.0;
    FilterSpec filter;
    bool filter_enabled = true;
    FilterMode filter_mode = FilterMode::separable;
    Scheme scheme = Scheme::imex_cn_rk4;
};

enum class CorrectionMode { none, split_operator, nonlinear_term };

/// The learned correction hook. split_operator: added to the step output
/// scaled by dt (Euler split). nonlinear_term: evaluated inside every RK
/// sub-stage and subtracted from the explicit tendency.
struct CorrectionFn {
    CorrectionMode mode = CorrectionMode::none;
    std::function<SpectralState(const SpectralState&)> fn;
};

struct SolverDivergence : std::runtime_error {
    explicit SolverDivergence(double t);
    double time;
};

/// One step of the configured scheme plus the exponential filter; advances
/// state.time by cfg.dt. Throws SolverDivergence on non-finite output.
SpectralState physics_step(const EquationSpec& spec, const SpectralState& state,
                           const StepperConfig& cfg);

/// physics_step(state) + dt * correction(state). Mode none reduces to
/// physics_step bit-for-bit.
SpectralState hybrid_step(const EquationSpec& spec, const SpectralState& state,
                          const StepperConfig& cfg,
                          const CorrectionFn& correction);

/// Same scheme as physics_step with the explicit tendency replaced by
/// N(u) - correction(u), per sub-stage (2D only).
SpectralState nonlinear_corrected_step(const EquationSpec& spec,
                                       const SpectralState& state,
                                       const StepperConfig& cfg,
                                       const CorrectionFn& correction);

/// CFL bound: safety * dx / v_max.
double stable_time_step(const Grid& grid, double v_max, double safety);

struct UnrollResult {
    std::vector<SpectralState> states;  // sampled every `stride` steps
    bool diverged = false;
    int last_finite_step = 0;
};

/// Repeated stepping with the correction dispatched by its mode. States are
/// recorded after every stride-th step and after the final step, giving
/// ceil(n_steps/stride) entries. On divergence the trajectory is truncated
/// and flagged instead of throwing.
UnrollResult unroll(const EquationSpec& spec, const SpectralState& state,
                    const StepperConfig& cfg, const CorrectionFn& correction,
                    int n_steps, int stride = 1);

/// Largest |u| over real-space samples of all channels (divergence probe;
/// does not require exact conjugate symmetry).
double real_space_max(const SpectralState& state);

}  // namespace specml
