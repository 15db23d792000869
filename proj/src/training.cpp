#include "specml/training.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "specml/checkpoint.hpp"
#include "specml/spectral_ops.hpp"
#include "specml/tape_stepper.hpp"

namespace specml {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kParamStream = 1;
constexpr uint64_t kShuffleStream = 2;

void check_window(const TrajectoryDataset& data, const Window& w, int T) {
    if (w.sample < 0 || w.sample >= data.sample_count || w.start < 0 ||
        w.start + T > data.time_count - 1)
        throw std::invalid_argument("window exceeds the dataset");
}

StepperConfig stepper_for(const TrainConfig& cfg,
                          const TrajectoryDataset& data) {
    StepperConfig scfg = cfg.stepper;
    if (scfg.dt == 0.0) scfg.dt = data.coarse_dt;
    return scfg;
}

CorrectionConfig correction_for(const TrainConfig& cfg) {
    CorrectionConfig ccfg = cfg.correction;
    ccfg.mode = cfg.model_type == ModelType::nonlinear_term
                    ? CorrectionMode::nonlinear_term
                    : CorrectionMode::split_operator;
    return ccfg;
}

bool tensor_sane(const Tensor& t) {
    for (double v : t.data)
        if (!std::isfinite(v) || std::abs(v) > 1e6) return false;
    return true;
}

double median(std::vector<double> values) {
    size_t n = values.size();
    std::sort(values.begin(), values.end());
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Fisher-Yates with the library RNG; portable across standard libraries.
std::vector<int64_t> epoch_permutation(int64_t n, Rng rng) {
    std::vector<int64_t> perm(n);
    for (int64_t i = 0; i < n; ++i) perm[i] = i;
    for (int64_t i = n - 1; i > 0; --i) {
        int64_t j = static_cast<int64_t>(rng.next_u64() %
                                         static_cast<uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

EpdParams with_values(const EpdParams& shape, const std::vector<Tensor>& flat) {
    EpdParams out = shape;
    auto views = epd_param_tensors(out);
    for (size_t i = 0; i < views.size(); ++i) *views[i] = flat[i];
    return out;
}

std::vector<Tensor> flat_copy(const EpdParams& params) {
    std::vector<Tensor> out;
    for (const Tensor* t : epd_param_tensors(params)) out.push_back(*t);
    return out;
}

json equation_identity(const TrajectoryDataset& data) {
    return json{{"name", to_string(data.equation.name)},
                {"resolution", data.resolution},
                {"seed", data.seed},
                {"coarse_dt", data.coarse_dt}};
}

/// Everything that shapes the optimization trajectory; cadence and total
/// length are free to change across resumes.
std::string train_identity_json(const TrainConfig& cfg,
                                const TrajectoryDataset& data) {
    const CorrectionConfig& c = cfg.correction;
    json j{{"model_type", to_string(cfg.model_type)},
           {"representation", to_string(c.representation)},
           {"input_scale", c.input_scale},
           {"output_scale", c.output_scale},
           {"epd",
            {{"dims", c.epd.dims},
             {"input_channels", c.epd.input_channels},
             {"output_channels", c.epd.output_channels},
             {"width", c.epd.width},
             {"encoder_kernel", c.epd.encoder_kernel},
             {"process_kernel", c.epd.process_kernel},
             {"decoder_kernel", c.epd.decoder_kernel},
             {"blocks", c.epd.blocks}}},
           {"unroll_steps", cfg.unroll_steps},
           {"batch_size", cfg.batch_size},
           {"lr", cfg.adam.lr},
           {"beta1", cfg.adam.beta1},
           {"beta2", cfg.adam.beta2},
           {"eps", cfg.adam.eps},
           {"ema_decay", cfg.ema_decay},
           {"clamp_factor", cfg.clamp_factor},
           {"seed", cfg.seed},
           {"dataset", equation_identity(data)}};
    return j.dump();
}

}  // namespace

int64_t window_count(const TrajectoryDataset& data, int unroll_steps) {
    if (unroll_steps < 1)
        throw std::invalid_argument("unroll_steps must be >= 1");
    int64_t starts = data.time_count - unroll_steps;
    if (data.sample_count < 1 || starts < 1)
        throw std::invalid_argument("dataset shorter than the unroll");
    return data.sample_count * starts;
}

std::vector<Window> batch_windows(const TrajectoryDataset& data,
                                  int unroll_steps, int batch_size,
                                  uint64_t seed, int64_t step) {
    if (batch_size < 1)
        throw std::invalid_argument("batch_size must be >= 1");
    if (step < 0) throw std::invalid_argument("step must be >= 0");
    int64_t windows = window_count(data, unroll_steps);
    int64_t starts = data.time_count - unroll_steps;
    Rng root = Rng(seed).derive(kShuffleStream);

    std::vector<Window> out;
    out.reserve(batch_size);
    int64_t cached_epoch = -1;
    std::vector<int64_t> perm;
    for (int b = 0; b < batch_size; ++b) {
        int64_t g = step * batch_size + b;
        int64_t epoch = g / windows;
        if (epoch != cached_epoch) {
            perm = epoch_permutation(windows,
                                     root.derive(static_cast<uint64_t>(epoch)));
            cached_epoch = epoch;
        }
        int64_t w = perm[g % windows];
        out.push_back({static_cast<int>(w / starts),
                       static_cast<int>(w % starts)});
    }
    return out;
}

double beta_constant(const TrajectoryDataset& data,
                     const std::vector<Window>& batch, int unroll_steps) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    double sum = 0.0;
    int64_t n = data.frame_size();
    for (const Window& w : batch) {
        check_window(data, w, unroll_steps);
        const double* u0 = data.frame(w.sample, w.start);
        for (int t = 1; t <= unroll_steps; ++t) {
            const double* ut = data.frame(w.sample, w.start + t);
            for (int64_t i = 0; i < n; ++i) {
                double d = u0[i] - ut[i];
                sum += d * d;
            }
        }
    }
    if (sum == 0.0)
        throw std::invalid_argument("batch trajectories are static");
    return 1.0 / sum;
}

LossResult unrolled_loss(const TrainConfig& cfg, const TrajectoryDataset& data,
                         const std::vector<Window>& batch,
                         const EpdParams& params, std::vector<Tensor>* grads) {
    const int T = cfg.unroll_steps;
    double beta = beta_constant(data, batch, T);
    double cap = cfg.clamp_factor / beta;

    EquationSpec spec = data.equation.make(data.resolution);
    StepperConfig scfg = stepper_for(cfg, data);
    TapeStepper stepper(spec, scfg);

    bool trainable = cfg.model_type != ModelType::spectral_only;
    Tape tape;
    EpdVars vars;
    TapeCorrection correction;
    if (trainable) {
        vars = epd_lift(tape, params);
        correction = make_tape_correction(correction_for(cfg), spec.grid, vars);
    }

    LossResult result;
    bool any_live = false;
    std::vector<Var> terms;
    terms.reserve(batch.size() * T);
    Var cap_term = tape.leaf(Tensor::scalar(cap));

    for (const Window& w : batch) {
        Var u = tape.leaf(data.state(w.sample, w.start));
        bool window_dead = false;
        for (int t = 1; t <= T; ++t) {
            if (!window_dead) {
                switch (cfg.model_type) {
                    case ModelType::spectral_only:
                        u = stepper.physics_step(tape, u);
                        break;
                    case ModelType::split_operator:
                        u = stepper.hybrid_step(tape, u, correction);
                        break;
                    case ModelType::nonlinear_term:
                        u = stepper.nonlinear_corrected_step(tape, u,
                                                             correction);
                        break;
                    case ModelType::pure_ml:
                        u = tape.add_scaled(u, correction(tape, u), scfg.dt);
                        break;
                }
                if (!tensor_sane(tape.value(u))) {
                    window_dead = true;
                    result.diverged = true;
                }
            }
            if (window_dead) {
                terms.push_back(cap_term);
            } else {
                any_live = true;
                Var diff =
                    tape.sub(u, tape.leaf(data.state(w.sample, w.start + t)));
                terms.push_back(tape.clamp_max(tape.sum_squares(diff), cap));
            }
        }
    }

    Var loss = tape.scale(tape.total(terms), beta);
    result.loss = tape.value(loss).data[0];
    result.dead = !any_live;

    if (grads) {
        grads->clear();
        if (trainable) {
            tape.backward(loss);
            for (Var v : vars.vars) grads->push_back(tape.grad(v));
        }
    }
    return result;
}

namespace {

std::vector<Window> validation_windows(const TrajectoryDataset& data, int T) {
    std::vector<Window> out;
    for (int s = 0; s < data.sample_count; ++s)
        for (int j = 0; j + T <= data.time_count - 1; j += T)
            out.push_back({s, j});
    if (out.empty())
        throw std::invalid_argument("dataset shorter than the unroll");
    return out;
}

double window_error(const SpectralState& state, const TrajectoryDataset& data,
                    int sample, int time_index) {
    RealField f = to_real(state);
    const double* truth = data.frame(sample, time_index);
    int spatial = data.spatial_size();
    double sum = 0.0;
    for (int c = 0; c < data.channels; ++c)
        for (int i = 0; i < spatial; ++i) {
            double d = f.channels[c][i] - truth[int64_t{c} * spatial + i];
            sum += d * d;
        }
    return sum;
}

}  // namespace

double validation_loss(const TrainConfig& cfg, const TrajectoryDataset& data,
                       const EpdParams& params) {
    const int T = cfg.unroll_steps;
    std::vector<Window> windows = validation_windows(data, T);
    double beta = beta_constant(data, windows, T);
    double cap = cfg.clamp_factor / beta;

    EquationSpec spec = data.equation.make(data.resolution);
    StepperConfig scfg = stepper_for(cfg, data);
    CorrectionConfig ccfg = correction_for(cfg);
    CorrectionFn fn;  // built once; model_step would rebuild it per step
    if (cfg.model_type == ModelType::split_operator ||
        cfg.model_type == ModelType::nonlinear_term)
        fn = make_correction_fn(ccfg, params);

    auto step = [&](const SpectralState& u) {
        switch (cfg.model_type) {
            case ModelType::spectral_only:
                return physics_step(spec, u, scfg);
            case ModelType::split_operator:
                return hybrid_step(spec, u, scfg, fn);
            case ModelType::nonlinear_term:
                return nonlinear_corrected_step(spec, u, scfg, fn);
            case ModelType::pure_ml: {
                SpectralState next = pure_ml_step(ccfg, params, u, scfg.dt);
                if (!all_finite(next)) throw SolverDivergence(next.time);
                return next;
            }
        }
        throw std::logic_error("bad model type");
    };

    double sum = 0.0;
    for (const Window& w : windows) {
        SpectralState u = to_spectral(data.field(w.sample, w.start));
        bool window_dead = false;
        for (int t = 1; t <= T; ++t) {
            if (!window_dead) {
                try {
                    u = step(u);
                    if (real_space_max(u) > 1e6) window_dead = true;
                } catch (const SolverDivergence&) {
                    window_dead = true;
                }
            }
            sum += window_dead
                       ? cap
                       : std::min(window_error(u, data, w.sample, w.start + t),
                                  cap);
        }
    }
    return beta * sum;
}

namespace {

struct CurveContext {
    EquationSpec spec;
    StepperConfig scfg;
    int horizon;
};

void fill_long_unroll(const TrainConfig& cfg, const TrajectoryDataset& val,
                      const CurveContext& ctx, const EpdParams& ema,
                      CurvePoint& point) {
    Model model{cfg.model_type, correction_for(cfg), ema};
    std::vector<double> mses, corrs;
    for (int s = 0; s < val.sample_count; ++s) {
        SpectralState ic = to_spectral(val.field(s, 0));
        UnrollResult res =
            model_unroll(model, ctx.spec, ctx.scfg, ic, ctx.horizon,
                         ctx.horizon);
        if (res.diverged || res.states.empty()) {
            mses.push_back(kNever);
            corrs.push_back(0.0);
            continue;
        }
        RealField pred = metric_field(res.states.back());
        RealField truth =
            val.grid().dims == 1
                ? val.field(s, ctx.horizon)
                : metric_field(to_spectral(val.field(s, ctx.horizon)));
        double sq = 0.0;
        int64_t count = 0;
        for (int c = 0; c < pred.num_channels(); ++c)
            for (size_t i = 0; i < pred.channels[c].size(); ++i) {
                double d = pred.channels[c][i] - truth.channels[c][i];
                sq += d * d;
                ++count;
            }
        mses.push_back(sq / double(count));
        corrs.push_back(correlation(pred, truth));
    }
    point.long_unroll_mse = median(mses);
    point.corr_at_horizon = median(corrs);
}

void save_train_checkpoint(const std::string& path,
                           const std::string& config_json,
                           const TrainConfig& cfg, const EpdParams& params,
                           const std::vector<Tensor>& ema,
                           const AdamState& adam, int64_t steps_done) {
    std::vector<std::string> names = epd_param_names(cfg.correction.epd);
    auto views = epd_param_tensors(params);
    Tensor progress(1, 2, 1, 1);
    progress.data = {static_cast<double>(steps_done),
                     static_cast<double>(adam.step)};

    std::vector<std::pair<std::string, const Tensor*>> arrays;
    for (size_t i = 0; i < names.size(); ++i) {
        arrays.emplace_back("param/" + names[i], views[i]);
        arrays.emplace_back("ema/" + names[i], &ema[i]);
        arrays.emplace_back("adam_m/" + names[i], &adam.m[i]);
        arrays.emplace_back("adam_v/" + names[i], &adam.v[i]);
    }
    arrays.emplace_back("trainer/progress", &progress);

    std::string tmp = path + ".tmp";
    save_checkpoint(tmp, config_json, arrays);
    fs::rename(tmp, path);
}

const Tensor& require_array(const Checkpoint& ck, const std::string& name) {
    const Tensor* t = ck.find(name);
    if (!t) throw std::runtime_error("checkpoint missing array: " + name);
    return *t;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const TrajectoryDataset& train_data,
                  const TrajectoryDataset& val_data) {
    if (cfg.model_type == ModelType::spectral_only)
        throw std::invalid_argument(
            "spectral_only has no trainable parameters");
    if (cfg.batch_size < 1 || cfg.unroll_steps < 1)
        throw std::invalid_argument("batch and unroll sizes must be >= 1");
    if (cfg.total_steps < 0)
        throw std::invalid_argument("total_steps must be >= 0");
    if (val_data.equation.name != train_data.equation.name ||
        val_data.resolution != train_data.resolution)
        throw std::invalid_argument(
            "validation dataset does not match the training dataset");
    window_count(train_data, cfg.unroll_steps);

    Rng init_rng = Rng(cfg.seed).derive(kParamStream);
    EpdParams params = init_epd_params(cfg.correction.epd, init_rng);
    std::vector<Tensor> ema = flat_copy(params);
    AdamState adam = make_adam_state(epd_param_tensors(params));
    int64_t start_step = 0;

    std::string identity = train_identity_json(cfg, train_data);
    if (!cfg.checkpoint_path.empty() && fs::exists(cfg.checkpoint_path)) {
        Checkpoint ck = load_checkpoint(cfg.checkpoint_path);
        if (ck.config_json != identity)
            throw std::runtime_error(
                "checkpoint does not match the training configuration");
        std::vector<std::string> names = epd_param_names(cfg.correction.epd);
        auto views = epd_param_tensors(params);
        for (size_t i = 0; i < names.size(); ++i) {
            *views[i] = require_array(ck, "param/" + names[i]);
            ema[i] = require_array(ck, "ema/" + names[i]);
            adam.m[i] = require_array(ck, "adam_m/" + names[i]);
            adam.v[i] = require_array(ck, "adam_v/" + names[i]);
        }
        const Tensor& progress = require_array(ck, "trainer/progress");
        start_step = static_cast<int64_t>(progress.data.at(0));
        adam.step = static_cast<int64_t>(progress.data.at(1));
    }

    CurveContext ctx{train_data.equation.make(train_data.resolution),
                     stepper_for(cfg, train_data),
                     std::min<int>(cfg.long_unroll_steps,
                                   val_data.time_count - 1)};

    TrainResult result;
    result.steps_done = start_step;

    EpdParams live_params = params;
    std::vector<Tensor> live_ema = ema;
    AdamState live_adam = adam;
    int64_t live_step = start_step;

    int strikes = 0;
    std::vector<Tensor> grads;
    auto t0 = std::chrono::steady_clock::now();

    for (int64_t k = start_step; k < cfg.total_steps; ++k) {
        std::vector<Window> batch = batch_windows(
            train_data, cfg.unroll_steps, cfg.batch_size, cfg.seed, k);
        LossResult loss =
            unrolled_loss(cfg, train_data, batch, params, &grads);

        bool bad = !std::isfinite(loss.loss) || loss.dead;
        if (bad) {
            ++strikes;
        } else {
            strikes = 0;
            // The live snapshot is the state that scored this finite loss,
            // taken before the update in case the update itself explodes.
            live_params = params;
            live_ema = ema;
            live_adam = adam;
            live_step = k;
            auto views = epd_param_tensors(params);
            std::vector<const Tensor*> grad_views;
            for (const Tensor& g : grads) grad_views.push_back(&g);
            adam_update(cfg.adam, adam, views, grad_views);
            ema_update(ema, views, cfg.ema_decay);
        }
        result.steps_done = k + 1;
        result.aborted = strikes > cfg.patience;

        bool last = result.aborted || k + 1 == cfg.total_steps;
        if (cfg.eval_every > 0 &&
            ((k + 1) % cfg.eval_every == 0 || last)) {
            CurvePoint point;
            point.step = k + 1;
            point.train_loss = loss.loss;
            EpdParams ema_params = with_values(params, ema);
            fill_long_unroll(cfg, val_data, ctx, ema_params, point);
            point.val_loss_ema = validation_loss(cfg, val_data, ema_params);
            point.val_loss_raw = validation_loss(cfg, val_data, params);
            point.wallclock_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
            if (result.curve.empty() || result.curve.back().step != point.step)
                result.curve.push_back(point);
        }
        if (result.aborted) {
            params = live_params;
            ema = live_ema;
            adam = live_adam;
            result.steps_done = live_step;
        }
        if (!cfg.checkpoint_path.empty() &&
            ((k + 1) % cfg.checkpoint_every == 0 || last))
            save_train_checkpoint(cfg.checkpoint_path, identity, cfg, params,
                                  ema, adam, result.steps_done);
        if (result.aborted) break;
    }

    result.params = params;
    result.ema = with_values(params, ema);
    result.adam = adam;
    result.final_val_loss = validation_loss(cfg, val_data, result.ema);
    return result;
}

void write_curve_csv(const std::string& path,
                     const std::vector<CurvePoint>& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write curve CSV: " + path);
    out << "step,train_loss,long_unroll_mse,corr_at_horizon,wallclock_s\n";
    for (const CurvePoint& p : curve)
        out << p.step << ',' << fmt(p.train_loss) << ','
            << fmt(p.long_unroll_mse) << ',' << fmt(p.corr_at_horizon) << ','
            << fmt(p.wallclock_s) << '\n';
}

}  // namespace specml
