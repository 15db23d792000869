#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specml/dataset.hpp"
#include "specml/evaluation.hpp"
#include "specml/model.hpp"
#include "specml/optim.hpp"

namespace specml {

struct TrainConfig {
    ModelType model_type = ModelType::split_operator;
    CorrectionConfig correction;
    int unroll_steps = 8;
    int batch_size = 8;
    int64_t total_steps = 5000;
    AdamConfig adam;
    double ema_decay = 0.98;
    uint64_t seed = 0;
    int64_t eval_every = 100;     // learning-curve cadence
    int long_unroll_steps = 64;   // curve horizon, in coarse steps
    double clamp_factor = 1e6;    // per-step squared-error cap, times 1/beta
    int patience = 10;            // dead or non-finite batches before abort
    StepperConfig stepper;        // dt 0 means the dataset's coarse dt
    std::string checkpoint_path;  // empty: keep state in memory only
    int64_t checkpoint_every = 1000;
};

struct CurvePoint {
    int64_t step = 0;
    double train_loss = 0.0;
    double long_unroll_mse = 0.0;  // EMA weights, median over val samples
    double corr_at_horizon = 0.0;  // EMA weights, median over val samples
    double wallclock_s = 0.0;
    double val_loss_ema = 0.0;     // diagnostics, not part of the CSV
    double val_loss_raw = 0.0;
};

struct TrainResult {
    EpdParams params;
    EpdParams ema;
    AdamState adam;
    int64_t steps_done = 0;
    bool aborted = false;  // patience exceeded; params hold last live state
    std::vector<CurvePoint> curve;
    double final_val_loss = 0.0;  // T-step loss with EMA weights
};

/// A training window: `unroll_steps` transitions starting at frame `start`
/// of sample `sample`.
struct Window {
    int sample = 0;
    int start = 0;
};

int64_t window_count(const TrajectoryDataset& data, int unroll_steps);

/// Batch for global step `step`: consecutive positions of an epoch-wise
/// reshuffled stream over all windows. Stateless in `step`.
std::vector<Window> batch_windows(const TrajectoryDataset& data,
                                  int unroll_steps, int batch_size,
                                  uint64_t seed, int64_t step);

/// β with β⁻¹ = Σ over the batch of |u(x,0) − u(x,t)|², t = 1..T, so the
/// "no change" prediction scores loss 1. Throws on an all-static batch.
double beta_constant(const TrajectoryDataset& data,
                     const std::vector<Window>& batch, int unroll_steps);

struct LossResult {
    double loss = 0.0;
    bool diverged = false;  // some window was truncated and clamped
    bool dead = false;      // every window died on its first step
};

/// β-normalized unrolled squared error of the configured model over one
/// batch, differentiated end-to-end when `grads` is non-null (aligned with
/// epd_param_tensors order; empty for spectral_only).
LossResult unrolled_loss(const TrainConfig& cfg, const TrajectoryDataset& data,
                         const std::vector<Window>& batch,
                         const EpdParams& params, std::vector<Tensor>* grads);

/// The same loss evaluated eagerly over non-overlapping windows covering
/// the dataset (validation protocol).
double validation_loss(const TrainConfig& cfg, const TrajectoryDataset& data,
                       const EpdParams& params);

TrainResult train(const TrainConfig& cfg, const TrajectoryDataset& train_data,
                  const TrajectoryDataset& val_data);

/// Columns: step, train_loss, long_unroll_mse, corr_at_horizon, wallclock_s.
void write_curve_csv(const std::string& path,
                     const std::vector<CurvePoint>& curve);

}  // namespace specml
