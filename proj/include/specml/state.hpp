#pragma once

#include <complex>
#include <vector>

#include "specml/grid.hpp"

namespace specml {

using Complex = std::complex<double>;
using SpectralChannel = std::vector<Complex>;
using RealChannel = std::vector<double>;

/// Solution state as complex Fourier coefficients, one channel per field.
/// Channels of a real field satisfy u_hat(-k) = conj(u_hat(k)).
struct SpectralState {
    Grid grid;
    std::vector<SpectralChannel> channels;
    double time = 0.0;

    SpectralState() = default;
    SpectralState(const Grid& g, int num_channels = 1, double t = 0.0)
        : grid(g), channels(num_channels, SpectralChannel(g.num_points())), time(t) {}

    int num_channels() const { return static_cast<int>(channels.size()); }
};

/// Real-valued samples on the equispaced grid.
struct RealField {
    Grid grid;
    std::vector<RealChannel> channels;
    double time = 0.0;

    RealField() = default;
    RealField(const Grid& g, int num_channels = 1, double t = 0.0)
        : grid(g), channels(num_channels, RealChannel(g.num_points())), time(t) {}

    int num_channels() const { return static_cast<int>(channels.size()); }
};

/// Largest |u_hat(k) - conj(u_hat(-k))| over all modes, relative to the
/// largest coefficient magnitude. Zero for the spectrum of a real field.
double conjugate_symmetry_error(const SpectralState& state);

/// Inverse transform to real space. Throws "non-real field" if the input is
/// not conjugate-symmetric (relative imaginary residue above 1e-8).
RealField to_real(const SpectralState& state);

/// Forward transform of real samples.
SpectralState to_spectral(const RealField& field);

/// Largest absolute sample value over all channels.
double max_abs(const RealField& field);

bool all_finite(const SpectralState& state);

}  // namespace specml
