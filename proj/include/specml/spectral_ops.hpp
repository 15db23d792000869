#pragma once

#include "specml/state.hpp"

namespace specml {

/// Exponential low-pass filter exp(-alpha * |k/k_max|^(2p)).
struct FilterSpec {
    double alpha = 6.0;
    int p = 16;
};

enum class FilterMode { separable, radial };

/// Per-axis wavenumbers for symbol construction. For odd derivative orders
/// the asymmetric Nyquist mode is zeroed to keep derivatives real-valued.
std::vector<double> axis_wavenumbers(const Grid& grid, bool zero_nyquist);

/// Element-wise multiplication by (i*k_axis)^order.
SpectralState spectral_derivative(const SpectralState& state, int order,
                                  int axis = 0);

/// Per-mode filter factor in (0, 1]; separable mode multiplies per-axis
/// factors, radial mode uses |k| against the per-axis maximum.
std::vector<double> filter_factors(const Grid& grid, const FilterSpec& spec,
                                   FilterMode mode = FilterMode::separable);

SpectralState exponential_filter(const SpectralState& state,
                                 const FilterSpec& spec,
                                 FilterMode mode = FilterMode::separable);

/// Fourier-space block filter: keeps the modes representable on the target
/// grid and discards the rest. Content at the target Nyquist frequency is
/// folded from the +-N/2 source pair so real-space values of band-limited
/// fields are preserved. Coefficients carry no resolution scaling under the
/// 1/N transform convention.
SpectralState truncate_downsample(const SpectralState& state,
                                  const Grid& target);

/// Recovers velocity from 2D vorticity: psi_hat = w_hat/|k|^2 (zero mean),
/// v_hat = (i k_y psi_hat, -i k_x psi_hat). Output channels (v_x, v_y).
SpectralState velocity_solve(const SpectralState& vorticity);

/// Symbols used by velocity_solve, exposed for the differentiable path.
std::vector<Complex> velocity_solve_symbol(const Grid& grid, int component);
std::vector<Complex> derivative_symbol(const Grid& grid, int order, int axis);

/// Sum of squared coefficient magnitudes over all channels.
double spectral_energy(const SpectralState& state);

}  // namespace specml
