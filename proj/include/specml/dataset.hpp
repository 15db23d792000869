#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specml/equations.hpp"
#include "specml/rng.hpp"
#include "specml/state.hpp"
#include "specml/stepper.hpp"
#include "specml/tensor.hpp"

namespace specml {

/// Equation choice plus the parameters of whichever equation is active;
/// reconstructs an EquationSpec at any resolution.
struct EquationConfig {
    EquationName name = EquationName::ks;
    KsParams ks;
    UnstableBurgersParams burgers;
    KolmogorovParams kolmogorov;
    NonlinearForm nonlinear_form = NonlinearForm::advective;

    int dims() const { return name == EquationName::kolmogorov ? 2 : 1; }
    double domain_length() const;
    EquationSpec make(int resolution) const;
};

struct GenerationConfig {
    EquationConfig equation;
    int reference_resolution = 256;
    double reference_dt = 0.0;
    double warmup_time = 0.0;
    double simulation_time = 0.0;
    int sample_count = 16;
    std::vector<int> target_resolutions;
    FilterSpec filter;
    FilterMode filter_mode = FilterMode::separable;
    uint64_t seed = 0;
    /// Discrete form the reference solver integrates. Defaults to the
    /// equation's own form; a stabilized override (skew_symmetric) keeps the
    /// ground truth alive where the recorded form aliases itself to death.
    std::optional<NonlinearForm> reference_nonlinear_form;
};

/// One target resolution's worth of filtered ground truth. Data layout is
/// [sample][time][channel][x(,y)] row-major, real space.
struct TrajectoryDataset {
    int format_version = 1;
    EquationConfig equation;
    int resolution = 0;
    int reference_resolution = 0;
    double reference_dt = 0.0;
    int temporal_stride = 1;
    double coarse_dt = 0.0;
    double warmup_time = 0.0;
    double simulation_time = 0.0;
    FilterSpec filter;
    FilterMode filter_mode = FilterMode::separable;
    std::string scheme = "imex_cn_rk4";
    NonlinearForm reference_nonlinear_form = NonlinearForm::advective;
    uint64_t seed = 0;
    int sample_count = 0;
    int time_count = 0;
    int channels = 1;

    std::vector<double> times;
    std::vector<double> data;

    int spatial_size() const;
    int64_t frame_size() const { return int64_t{channels} * spatial_size(); }
    double* frame(int sample, int time_index);
    const double* frame(int sample, int time_index) const;
    Tensor state(int sample, int time_index) const;
    RealField field(int sample, int time_index) const;
    Grid grid() const;
};

/// Zero-mean Gaussian random field, unit real-space RMS. Mode stddev falls
/// as 1/|k| in 1D; in 2D it is |k| exp(-|k|^2 / (2 * 4^2)), peaked at
/// wavenumber 4. Nyquist modes stay empty.
SpectralState random_initial_condition(const Grid& grid, Rng& rng);

/// Fig.-3 pipeline: per sample an IC is warmed up and solved at the
/// reference resolution; each recorded state is truncated to every target
/// resolution, exponentially filtered, and stored every
/// (reference/target)-th step. Samples whose reference solve diverges are
/// skipped with a note on stderr.
std::vector<TrajectoryDataset> generate(const GenerationConfig& config);

/// Directory layout: manifest.json + data.bin (little-endian f64) +
/// checksums (crc32 of both files).
void write_dataset(const std::string& dir, const TrajectoryDataset& ds);
TrajectoryDataset read_dataset(const std::string& dir);

}  // namespace specml
