#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "specml/dataset.hpp"
#include "specml/model.hpp"

namespace specml {

/// Summed absolute pointwise error; `normalized` divides by the number of
/// points instead.
double mae(const RealField& pred, const RealField& truth,
           bool normalized = false);

/// Cosine similarity of the flattened fields, no mean subtraction.
double correlation(const RealField& pred, const RealField& truth);

/// Sentinel for "the correlation never dipped below the threshold".
inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// First time stamp whose correlation < threshold; kNever if none. The two
/// trajectories must carry identical time stamps.
double time_to_decorrelation(const std::vector<RealField>& pred,
                             const std::vector<RealField>& truth,
                             double threshold = 0.95);

/// Field the metrics are computed on: u itself in 1D; in 2D the velocity
/// recovered from vorticity (2D two-channel states pass through as-is).
RealField metric_field(const SpectralState& state);

/// One entrant of a model-comparison sweep; `seed` labels the parameter
/// initialization the weights came from.
struct EvalModel {
    std::string label;
    uint64_t seed = 0;
    Model model;
};

struct TrajectoryMetrics {
    std::string label;
    uint64_t seed = 0;
    int sample = 0;
    std::vector<double> times;       // recorded metric times
    std::vector<double> mae_series;
    std::vector<double> corr_series;
    double decorrelation_time = kNever;
    bool diverged = false;
};

/// Aggregates across every (seed, sample) trajectory of one label. A run
/// that diverges before the horizon scores mae = inf and corr = 0 there.
struct ModelSummary {
    std::string label;
    double median_mae = 0.0;
    double best_mae = 0.0;    // smallest
    double median_corr = 0.0;
    double best_corr = 0.0;   // largest
    double median_decorrelation_time = kNever;
    double best_decorrelation_time = kNever;  // largest
    int diverged_count = 0;
};

struct MetricsReport {
    std::vector<TrajectoryMetrics> trajectories;
    std::vector<ModelSummary> summaries;
    double threshold = 0.95;
    int horizon_steps = 0;
    double horizon_time = 0.0;
};

/// Runs every model from every sample's first frame for `horizon_steps`
/// coarse steps, scoring each recorded step against the stored trajectory.
/// Metrics are recorded every `stride` steps and at the horizon; diverged
/// runs are truncated and flagged.
MetricsReport compare_models(const std::vector<EvalModel>& models,
                             const TrajectoryDataset& data, int horizon_steps,
                             double threshold = 0.95, int stride = 1);

/// Columns: model, seed, sample, t, mae, corr, time_to_decorrelation,
/// diverged. Detail rows repeat the trajectory's decorrelation time;
/// summary rows carry sample = median|best and seed = all.
void write_metrics_csv(const std::string& path, const MetricsReport& report);

}  // namespace specml
