#pragma once

#include <string>

#include "specml/epd.hpp"
#include "specml/state.hpp"
#include "specml/stepper.hpp"
#include "specml/tape_stepper.hpp"

namespace specml {

/// What the network sees. 2D states are vorticity unless the state already
/// carries two channels, in which case `velocity` passes them through (the
/// pure-ML velocity variant never computes vorticity).
enum class Representation {
    velocity,
    vorticity,
    velocity_and_vorticity,
    identity_1d,
};

Representation representation_from_string(const std::string& s);
std::string to_string(Representation r);

struct CorrectionConfig {
    Representation representation = Representation::identity_1d;
    double input_scale = 1.0;
    double output_scale = 1.0;
    EpdConfig epd;
    CorrectionMode mode = CorrectionMode::split_operator;
};

/// Network input channel count for a state with `state_channels` channels.
int correction_input_channels(const CorrectionConfig& cfg, int dims,
                              int state_channels);

/// Real-space network input: representation channels scaled by input_scale.
/// nonlinear_term mode always feeds (v_x, v_y, dω/dx, dω/dy).
RealField state_transform(const CorrectionConfig& cfg,
                          const SpectralState& state);

/// FFT(output_scale * EPD(state_transform(state))); channel layout matches
/// the prognostic state.
SpectralState learned_correction(const CorrectionConfig& cfg,
                                 const EpdParams& params,
                                 const SpectralState& state);

/// state + h * learned_correction(state): first-order Euler, no physics.
SpectralState pure_ml_step(const CorrectionConfig& cfg,
                           const EpdParams& params, const SpectralState& state,
                           double h);

/// Production-stepper hook evaluating the learned correction eagerly.
CorrectionFn make_correction_fn(const CorrectionConfig& cfg,
                                const EpdParams& params);

/// Tape-side correction for training; `vars` must be lifted on the tape the
/// returned callback is invoked with.
TapeCorrection make_tape_correction(const CorrectionConfig& cfg,
                                    const Grid& grid, const EpdVars& vars);

}  // namespace specml
