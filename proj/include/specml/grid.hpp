#pragma once

#include <stdexcept>
#include <vector>

namespace specml {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Periodic equispaced grid: N points per dimension on [0, L)^dims.
/// Wavenumbers are k = 2*pi*m/L for mode index m in {-N/2, ..., N/2-1}.
struct Grid {
    int dims = 1;
    int resolution = 0;      // points per dimension, even, >= 4
    double domain_length = 0;

    Grid() = default;
    Grid(int dims_, int resolution_, double domain_length_)
        : dims(dims_), resolution(resolution_), domain_length(domain_length_) {
        if (dims != 1 && dims != 2)
            throw std::invalid_argument("grid dims must be 1 or 2");
        if (resolution < 4 || resolution % 2 != 0)
            throw std::invalid_argument("grid resolution must be even and >= 4");
        if (!(domain_length > 0))
            throw std::invalid_argument("grid domain length must be positive");
    }

    int num_points() const {
        return dims == 1 ? resolution : resolution * resolution;
    }
    double spacing() const { return domain_length / resolution; }
    double fundamental_wavenumber() const { return kTwoPi / domain_length; }

    /// Signed mode index of storage slot i along one axis.
    int mode_index(int i) const {
        return i < resolution / 2 ? i : i - resolution;
    }
    /// Physical wavenumber of storage slot i along one axis.
    double wavenumber(int i) const {
        return fundamental_wavenumber() * mode_index(i);
    }
    /// Largest represented wavenumber magnitude per axis (the Nyquist mode).
    double max_wavenumber() const {
        return fundamental_wavenumber() * (resolution / 2);
    }

    bool operator==(const Grid& o) const {
        return dims == o.dims && resolution == o.resolution &&
               domain_length == o.domain_length;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Real-space coordinates along one axis.
std::vector<double> grid_coordinates(const Grid& grid);

}  // namespace specml
