#pragma once

#include <complex>

#include "specml/grid.hpp"

namespace specml {

/// Forward transform, scaled by 1/N per dimension so that coefficient
/// magnitudes are resolution-independent. in and out may alias.
void fft_forward(const Grid& grid, const std::complex<double>* in,
                 std::complex<double>* out);

/// Unscaled inverse transform (exact inverse of fft_forward).
void fft_inverse(const Grid& grid, const std::complex<double>* in,
                 std::complex<double>* out);

}  // namespace specml
