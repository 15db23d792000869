#include "specml/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "specml/parallel.hpp"
#include "specml/spectral_ops.hpp"

namespace specml {

namespace {

void check_shapes(const RealField& a, const RealField& b) {
    if (a.grid != b.grid || a.num_channels() != b.num_channels())
        throw std::invalid_argument("field shapes do not match");
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

std::string fmt_time_to_decorrelation(double v) {
    return v == kNever ? "never" : fmt(v);
}

}  // namespace

double mae(const RealField& pred, const RealField& truth, bool normalized) {
    check_shapes(pred, truth);
    double sum = 0.0;
    for (int c = 0; c < pred.num_channels(); ++c)
        for (size_t i = 0; i < pred.channels[c].size(); ++i)
            sum += std::abs(pred.channels[c][i] - truth.channels[c][i]);
    if (normalized)
        sum /= double(pred.num_channels()) * pred.grid.num_points();
    return sum;
}

double correlation(const RealField& pred, const RealField& truth) {
    check_shapes(pred, truth);
    double dot = 0.0, np = 0.0, nt = 0.0;
    for (int c = 0; c < pred.num_channels(); ++c)
        for (size_t i = 0; i < pred.channels[c].size(); ++i) {
            double a = pred.channels[c][i], b = truth.channels[c][i];
            dot += a * b;
            np += a * a;
            nt += b * b;
        }
    if (np == 0.0 || nt == 0.0)
        throw std::invalid_argument("correlation of a zero field");
    return dot / (std::sqrt(np) * std::sqrt(nt));
}

double time_to_decorrelation(const std::vector<RealField>& pred,
                             const std::vector<RealField>& truth,
                             double threshold) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("misaligned time axes");
    for (size_t i = 0; i < pred.size(); ++i) {
        double ta = pred[i].time, tb = truth[i].time;
        if (std::abs(ta - tb) > 1e-9 * std::max(1.0, std::abs(tb)))
            throw std::invalid_argument("misaligned time axes");
    }
    for (size_t i = 0; i < pred.size(); ++i)
        if (correlation(pred[i], truth[i]) < threshold) return truth[i].time;
    return kNever;
}

RealField metric_field(const SpectralState& state) {
    if (state.grid.dims == 1) return to_real(state);
    if (state.num_channels() == 1) return to_real(velocity_solve(state));
    if (state.num_channels() == 2) return to_real(state);
    throw std::invalid_argument("cannot compute metrics for this state");
}

MetricsReport compare_models(const std::vector<EvalModel>& models,
                             const TrajectoryDataset& data, int horizon_steps,
                             double threshold, int stride) {
    if (models.empty()) throw std::invalid_argument("no models to compare");
    if (data.sample_count < 1) throw std::invalid_argument("empty dataset");
    if (horizon_steps < 1)
        throw std::invalid_argument("horizon must be positive");
    if (horizon_steps > data.time_count - 1)
        throw std::invalid_argument("horizon exceeds the dataset");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");

    EquationSpec spec = data.equation.make(data.resolution);
    StepperConfig scfg;
    scfg.dt = data.coarse_dt;
    scfg.filter = data.filter;
    scfg.filter_mode = data.filter_mode;

    MetricsReport report;
    report.threshold = threshold;
    report.horizon_steps = horizon_steps;
    report.horizon_time = data.times[horizon_steps];

    const int n_samples = data.sample_count;
    report.trajectories.resize(models.size() * n_samples);

    parallel_for(static_cast<int>(models.size()) * n_samples, [&](int job) {
        const EvalModel& entry = models[job / n_samples];
        int s = job % n_samples;
        TrajectoryMetrics& tm = report.trajectories[job];
        tm.label = entry.label;
        tm.seed = entry.seed;
        tm.sample = s;

        SpectralState ic = to_spectral(data.field(s, 0));
        UnrollResult res = model_unroll(entry.model, spec, scfg, ic,
                                        horizon_steps, stride);
        tm.diverged = res.diverged;

        size_t next = 0;
        for (int k = 1; k <= res.last_finite_step; ++k) {
            if (k % stride != 0 && k != horizon_steps) continue;
            const SpectralState& state = res.states.at(next++);
            RealField pred = metric_field(state);
            RealField truth = data.grid().dims == 1
                                  ? data.field(s, k)
                                  : metric_field(to_spectral(data.field(s, k)));
            truth.time = data.times[k];
            tm.times.push_back(data.times[k]);
            tm.mae_series.push_back(mae(pred, truth));
            tm.corr_series.push_back(correlation(pred, truth));
        }
        for (size_t i = 0; i < tm.corr_series.size(); ++i)
            if (tm.corr_series[i] < threshold) {
                tm.decorrelation_time = tm.times[i];
                break;
            }
        if (tm.decorrelation_time == kNever && tm.diverged)
            tm.decorrelation_time =
                data.times[0] + (res.last_finite_step + 1) * data.coarse_dt;
    });

    for (const EvalModel& entry : models) {
        bool seen = false;
        for (const ModelSummary& s : report.summaries)
            if (s.label == entry.label) seen = true;
        if (seen) continue;

        ModelSummary summary;
        summary.label = entry.label;
        std::vector<double> maes, corrs, ttds;
        for (const TrajectoryMetrics& tm : report.trajectories) {
            if (tm.label != entry.label) continue;
            bool reached = !tm.diverged;
            maes.push_back(reached ? tm.mae_series.back() : kNever);
            corrs.push_back(reached ? tm.corr_series.back() : 0.0);
            ttds.push_back(tm.decorrelation_time);
            if (tm.diverged) ++summary.diverged_count;
        }
        summary.median_mae = median(maes);
        summary.best_mae = *std::min_element(maes.begin(), maes.end());
        summary.median_corr = median(corrs);
        summary.best_corr = *std::max_element(corrs.begin(), corrs.end());
        summary.median_decorrelation_time = median(ttds);
        summary.best_decorrelation_time =
            *std::max_element(ttds.begin(), ttds.end());
        report.summaries.push_back(summary);
    }
    return report;
}

void write_metrics_csv(const std::string& path, const MetricsReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write metrics CSV: " + path);
    out << "model,seed,sample,t,mae,corr,time_to_decorrelation,diverged\n";
    for (const TrajectoryMetrics& tm : report.trajectories) {
        for (size_t i = 0; i < tm.times.size(); ++i)
            out << tm.label << ',' << tm.seed << ',' << tm.sample << ','
                << fmt(tm.times[i]) << ',' << fmt(tm.mae_series[i]) << ','
                << fmt(tm.corr_series[i]) << ','
                << fmt_time_to_decorrelation(tm.decorrelation_time) << ','
                << (tm.diverged ? 1 : 0) << '\n';
    }
    for (const ModelSummary& s : report.summaries) {
        out << s.label << ",all,median," << fmt(report.horizon_time) << ','
            << fmt(s.median_mae) << ',' << fmt(s.median_corr) << ','
            << fmt_time_to_decorrelation(s.median_decorrelation_time) << ','
            << s.diverged_count << '\n';
        out << s.label << ",all,best," << fmt(report.horizon_time) << ','
            << fmt(s.best_mae) << ',' << fmt(s.best_corr) << ','
            << fmt_time_to_decorrelation(s.best_decorrelation_time) << ','
            << s.diverged_count << '\n';
    }
}

}  // namespace specml
