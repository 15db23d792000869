#include "specml/dataset.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "specml/parallel.hpp"
#include "specml/spectral_ops.hpp"

namespace specml {

namespace fs = std::filesystem;
using nlohmann::json;

double EquationConfig::domain_length() const {
    switch (name) {
        case EquationName::ks: return ks.domain_length;
        case EquationName::unstable_burgers: return burgers.domain_length;
        case EquationName::kolmogorov: return kolmogorov.domain_length;
    }
    throw std::logic_error("bad equation name");
}

EquationSpec EquationConfig::make(int resolution) const {
    EquationSpec spec;
    switch (name) {
        case EquationName::ks:
            spec = make_ks_equation(resolution, ks);
            break;
        case EquationName::unstable_burgers:
            spec = make_unstable_burgers_equation(resolution, burgers);
            break;
        case EquationName::kolmogorov:
            spec = make_kolmogorov_equation(resolution, kolmogorov);
            break;
    }
    spec.nonlinear_form = nonlinear_form;
    return spec;
}

int TrajectoryDataset::spatial_size() const {
    return equation.dims() == 2 ? resolution * resolution : resolution;
}

double* TrajectoryDataset::frame(int sample, int time_index) {
    return &data[(int64_t{sample} * time_count + time_index) * frame_size()];
}

const double* TrajectoryDataset::frame(int sample, int time_index) const {
    return &data[(int64_t{sample} * time_count + time_index) * frame_size()];
}

Grid TrajectoryDataset::grid() const {
    return Grid(equation.dims(), resolution, equation.domain_length());
}

Tensor TrajectoryDataset::state(int sample, int time_index) const {
    int dims = equation.dims();
    Tensor t(dims, resolution, dims == 2 ? resolution : 1, channels);
    const double* src = frame(sample, time_index);
    int spatial = spatial_size();
    for (int c = 0; c < channels; ++c)
        for (int i = 0; i < spatial; ++i)
            t.data[static_cast<size_t>(i) * channels + c] =
                src[static_cast<int64_t>(c) * spatial + i];
    return t;
}

RealField TrajectoryDataset::field(int sample, int time_index) const {
    RealField f(grid(), channels, times.empty() ? 0.0 : times[time_index]);
    const double* src = frame(sample, time_index);
    int spatial = spatial_size();
    for (int c = 0; c < channels; ++c)
        std::memcpy(f.channels[c].data(), src + int64_t{c} * spatial,
                    sizeof(double) * spatial);
    return f;
}

SpectralState random_initial_condition(const Grid& grid, Rng& rng) {
    int n = grid.resolution;
    SpectralState state(grid, 1, 0.0);
    auto& ch = state.channels[0];

    if (grid.dims == 1) {
        for (int m = 1; m < n / 2; ++m) {
            // Draws are sequenced explicitly; constructor-argument order
            // is unspecified and the stream layout must be stable.
            double stddev = 1.0 / m;
            double re = stddev * rng.normal();
            double im = stddev * rng.normal();
            Complex z(re, im);
            ch[m] = z;
            ch[n - m] = std::conj(z);
        }
    } else {
        const double kp = 4.0;
        for (int i = 0; i < n; ++i) {
            int mi = grid.mode_index(i);
            for (int j = 0; j < n; ++j) {
                int mj = grid.mode_index(j);
                bool canonical = mi > 0 || (mi == 0 && mj > 0);
                if (!canonical || mi == -n / 2 || mj == -n / 2 ||
                    mi == n / 2 || mj == n / 2)
                    continue;
                double k2 = double(mi) * mi + double(mj) * mj;
                double stddev = std::sqrt(k2) * std::exp(-k2 / (2 * kp * kp));
                double re = stddev * rng.normal();
                double im = stddev * rng.normal();
                Complex z(re, im);
                ch[static_cast<size_t>(i) * n + j] = z;
                int ci = (n - i) % n, cj = (n - j) % n;
                ch[static_cast<size_t>(ci) * n + cj] = std::conj(z);
            }
        }
    }

    double energy = 0.0;
    for (const Complex& v : ch) energy += std::norm(v);
    if (energy == 0.0)
        throw std::logic_error("degenerate initial condition spectrum");
    double scale = 1.0 / std::sqrt(energy);
    for (Complex& v : ch) v *= scale;
    return state;
}

namespace {

void record_frame(const SpectralState& state, const TrajectoryDataset& ds,
                  const Grid& target_grid, double* out) {
    SpectralState coarse = truncate_downsample(state, target_grid);
    coarse = exponential_filter(coarse, ds.filter, ds.filter_mode);
    RealField f = to_real(coarse);
    int spatial = target_grid.num_points();
    for (int c = 0; c < f.num_channels(); ++c)
        std::memcpy(out + int64_t{c} * spatial, f.channels[c].data(),
                    sizeof(double) * spatial);
}

uint32_t file_crc(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    uint32_t crc = static_cast<uint32_t>(crc32(0, nullptr, 0));
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        if (got > 0)
            crc = static_cast<uint32_t>(
                crc32(crc, reinterpret_cast<const Bytef*>(buf),
                      static_cast<uInt>(got)));
    }
    return crc;
}

std::string filter_mode_name(FilterMode m) {
    return m == FilterMode::separable ? "separable" : "radial";
}

FilterMode filter_mode_from_string(const std::string& s) {
    if (s == "separable") return FilterMode::separable;
    if (s == "radial") return FilterMode::radial;
    throw std::invalid_argument("unknown filter mode: " + s);
}

std::string nonlinear_form_name(NonlinearForm f) {
    switch (f) {
        case NonlinearForm::advective: return "advective";
        case NonlinearForm::conservative: return "conservative";
        case NonlinearForm::skew_symmetric: return "skew_symmetric";
    }
    throw std::logic_error("unreachable");
}

NonlinearForm nonlinear_form_from_string(const std::string& s) {
    if (s == "advective") return NonlinearForm::advective;
    if (s == "conservative") return NonlinearForm::conservative;
    if (s == "skew_symmetric") return NonlinearForm::skew_symmetric;
    throw std::invalid_argument("unknown nonlinear form: " + s);
}

json equation_to_json(const EquationConfig& eq) {
    json j;
    j["name"] = to_string(eq.name);
    j["nonlinear_form"] = nonlinear_form_name(eq.nonlinear_form);
    switch (eq.name) {
        case EquationName::ks:
            j["domain_length"] = eq.ks.domain_length;
            break;
        case EquationName::unstable_burgers:
            j["viscosity"] = eq.burgers.viscosity;
            j["domain_length"] = eq.burgers.domain_length;
            j["g_amp"] = eq.burgers.g_amp;
            j["g_width"] = eq.burgers.g_width;
            break;
        case EquationName::kolmogorov:
            j["viscosity"] = eq.kolmogorov.viscosity;
            j["drag"] = eq.kolmogorov.drag;
            j["forcing_wavenumber"] = eq.kolmogorov.forcing_wavenumber;
            j["domain_length"] = eq.kolmogorov.domain_length;
            j["forcing_enabled"] = eq.kolmogorov.forcing_enabled;
            break;
    }
    return j;
}

EquationConfig equation_from_json(const json& j) {
    EquationConfig eq;
    eq.name = equation_name_from_string(j.at("name").get<std::string>());
    eq.nonlinear_form =
        nonlinear_form_from_string(j.at("nonlinear_form").get<std::string>());
    switch (eq.name) {
        case EquationName::ks:
            eq.ks.domain_length = j.at("domain_length").get<double>();
            break;
        case EquationName::unstable_burgers:
            eq.burgers.viscosity = j.at("viscosity").get<double>();
            eq.burgers.domain_length = j.at("domain_length").get<double>();
            eq.burgers.g_amp = j.at("g_amp").get<double>();
            eq.burgers.g_width = j.at("g_width").get<double>();
            break;
        case EquationName::kolmogorov:
            eq.kolmogorov.viscosity = j.at("viscosity").get<double>();
            eq.kolmogorov.drag = j.at("drag").get<double>();
            eq.kolmogorov.forcing_wavenumber =
                j.at("forcing_wavenumber").get<int>();
            eq.kolmogorov.domain_length = j.at("domain_length").get<double>();
            eq.kolmogorov.forcing_enabled =
                j.at("forcing_enabled").get<bool>();
            break;
    }
    return eq;
}

}  // namespace

std::vector<TrajectoryDataset> generate(const GenerationConfig& config) {
    if (!(config.reference_dt > 0))
        throw std::invalid_argument("reference dt must be positive");
    if (!(config.simulation_time > 0))
        throw std::invalid_argument("simulation time must be positive");
    if (config.warmup_time < 0)
        throw std::invalid_argument("warmup time must be non-negative");
    if (config.sample_count < 1)
        throw std::invalid_argument("sample count must be positive");
    if (config.target_resolutions.empty())
        throw std::invalid_argument("no target resolutions");
    for (int target : config.target_resolutions)
        if (target < 4 || target > config.reference_resolution ||
            config.reference_resolution % target != 0)
            throw std::invalid_argument(
                "target resolution must divide the reference resolution");

    EquationSpec ref_spec = config.equation.make(config.reference_resolution);
    NonlinearForm ref_form =
        config.reference_nonlinear_form.value_or(config.equation.nonlinear_form);
    ref_spec.nonlinear_form = ref_form;
    StepperConfig scfg;
    scfg.dt = config.reference_dt;
    scfg.filter = config.filter;
    scfg.filter_mode = config.filter_mode;

    int warm_steps =
        static_cast<int>(std::llround(config.warmup_time / config.reference_dt));
    int sim_steps = static_cast<int>(
        std::llround(config.simulation_time / config.reference_dt));
    if (sim_steps < 1)
        throw std::invalid_argument("simulation shorter than one step");

    std::vector<TrajectoryDataset> out(config.target_resolutions.size());
    std::vector<Grid> target_grids;
    for (size_t t = 0; t < out.size(); ++t) {
        TrajectoryDataset& ds = out[t];
        ds.equation = config.equation;
        ds.resolution = config.target_resolutions[t];
        ds.reference_resolution = config.reference_resolution;
        ds.reference_dt = config.reference_dt;
        ds.temporal_stride = config.reference_resolution / ds.resolution;
        ds.coarse_dt = config.reference_dt * ds.temporal_stride;
        ds.warmup_time = config.warmup_time;
        ds.simulation_time = config.simulation_time;
        ds.filter = config.filter;
        ds.filter_mode = config.filter_mode;
        ds.reference_nonlinear_form = ref_form;
        ds.seed = config.seed;
        ds.sample_count = config.sample_count;
        ds.time_count = sim_steps / ds.temporal_stride + 1;
        ds.channels = 1;
        for (int j = 0; j < ds.time_count; ++j)
            ds.times.push_back(j * ds.coarse_dt);
        ds.data.assign(int64_t{ds.sample_count} * ds.time_count *
                           ds.frame_size(),
                       0.0);
        target_grids.push_back(ds.grid());
    }

    Rng master(config.seed);
    std::vector<char> kept(config.sample_count, 1);

    parallel_for(config.sample_count, [&](int s) {
        Rng rng = master.derive(static_cast<uint64_t>(s));
        SpectralState state =
            random_initial_condition(ref_spec.grid, rng);
        try {
            for (int w = 0; w < warm_steps; ++w)
                state = physics_step(ref_spec, state, scfg);
            for (size_t t = 0; t < out.size(); ++t)
                record_frame(state, out[t], target_grids[t],
                             out[t].frame(s, 0));
            for (int step = 1; step <= sim_steps; ++step) {
                state = physics_step(ref_spec, state, scfg);
                for (size_t t = 0; t < out.size(); ++t)
                    if (step % out[t].temporal_stride == 0)
                        record_frame(state, out[t], target_grids[t],
                                     out[t].frame(s, step /
                                                         out[t].temporal_stride));
            }
        } catch (const SolverDivergence& e) {
            std::fprintf(stderr,
                         "sample %d (seed %llu stream %d) diverged: %s; "
                         "skipped\n",
                         s, static_cast<unsigned long long>(config.seed), s,
                         e.what());
            kept[s] = 0;
        }
    });

    // Compact skipped samples, preserving order.
    for (auto& ds : out) {
        int w = 0;
        for (int s = 0; s < config.sample_count; ++s) {
            if (!kept[s]) continue;
            if (w != s)
                std::memmove(ds.frame(w, 0), ds.frame(s, 0),
                             sizeof(double) * ds.time_count * ds.frame_size());
            ++w;
        }
        ds.sample_count = w;
        ds.data.resize(int64_t{w} * ds.time_count * ds.frame_size());
    }
    return out;
}

void write_dataset(const std::string& dir, const TrajectoryDataset& ds) {
    fs::create_directories(dir);
    fs::path base(dir);

    json manifest;
    manifest["format_version"] = ds.format_version;
    manifest["equation"] = equation_to_json(ds.equation);
    manifest["resolution"] = ds.resolution;
    manifest["reference_resolution"] = ds.reference_resolution;
    manifest["reference_dt"] = ds.reference_dt;
    manifest["temporal_stride"] = ds.temporal_stride;
    manifest["coarse_dt"] = ds.coarse_dt;
    manifest["warmup_time"] = ds.warmup_time;
    manifest["simulation_time"] = ds.simulation_time;
    manifest["filter"] = {{"alpha", ds.filter.alpha}, {"p", ds.filter.p},
                          {"mode", filter_mode_name(ds.filter_mode)}};
    manifest["scheme"] = ds.scheme;
    manifest["reference_nonlinear_form"] =
        nonlinear_form_name(ds.reference_nonlinear_form);
    manifest["seed"] = ds.seed;
    manifest["sample_count"] = ds.sample_count;
    manifest["time_count"] = ds.time_count;
    manifest["channels"] = ds.channels;
    manifest["byte_order"] = "little";
    manifest["value_type"] = "f64";
    manifest["layout"] = "[sample][time][channel][space]";

    {
        std::ofstream mf(base / "manifest.json", std::ios::trunc);
        if (!mf) throw std::runtime_error("cannot write manifest");
        mf << manifest.dump(2) << "\n";
    }
    {
        std::ofstream df(base / "data.bin", std::ios::binary | std::ios::trunc);
        if (!df) throw std::runtime_error("cannot write data.bin");
        df.write(reinterpret_cast<const char*>(ds.data.data()),
                 static_cast<std::streamsize>(ds.data.size() *
                                              sizeof(double)));
    }
    {
        std::ofstream cf(base / "checksums", std::ios::trunc);
        char line[64];
        std::snprintf(line, sizeof(line), "%08x  manifest.json\n",
                      file_crc(base / "manifest.json"));
        cf << line;
        std::snprintf(line, sizeof(line), "%08x  data.bin\n",
                      file_crc(base / "data.bin"));
        cf << line;
    }
}

TrajectoryDataset read_dataset(const std::string& dir) {
    fs::path base(dir);
    std::ifstream mf(base / "manifest.json");
    if (!mf)
        throw std::runtime_error("cannot read dataset manifest in " + dir);
    json manifest = json::parse(mf);

    if (manifest.at("format_version").get<int>() != 1)
        throw std::runtime_error("unsupported dataset format version");

    // Verify checksums before trusting the payload.
    {
        std::ifstream cf(base / "checksums");
        if (!cf) throw std::runtime_error("dataset checksums file missing");
        std::string crc_hex, name;
        while (cf >> crc_hex >> name) {
            uint32_t expect =
                static_cast<uint32_t>(std::stoul(crc_hex, nullptr, 16));
            if (file_crc(base / name) != expect)
                throw std::runtime_error("dataset checksum mismatch: " + name);
        }
    }

    TrajectoryDataset ds;
    ds.format_version = 1;
    ds.equation = equation_from_json(manifest.at("equation"));
    ds.resolution = manifest.at("resolution").get<int>();
    ds.reference_resolution = manifest.at("reference_resolution").get<int>();
    ds.reference_dt = manifest.at("reference_dt").get<double>();
    ds.temporal_stride = manifest.at("temporal_stride").get<int>();
    ds.coarse_dt = manifest.at("coarse_dt").get<double>();
    ds.warmup_time = manifest.at("warmup_time").get<double>();
    ds.simulation_time = manifest.at("simulation_time").get<double>();
    ds.filter.alpha = manifest.at("filter").at("alpha").get<double>();
    ds.filter.p = manifest.at("filter").at("p").get<int>();
    ds.filter_mode = filter_mode_from_string(
        manifest.at("filter").at("mode").get<std::string>());
    ds.scheme = manifest.at("scheme").get<std::string>();
    ds.reference_nonlinear_form = nonlinear_form_from_string(
        manifest.at("reference_nonlinear_form").get<std::string>());
    ds.seed = manifest.at("seed").get<uint64_t>();
    ds.sample_count = manifest.at("sample_count").get<int>();
    ds.time_count = manifest.at("time_count").get<int>();
    ds.channels = manifest.at("channels").get<int>();
    for (int j = 0; j < ds.time_count; ++j)
        ds.times.push_back(j * ds.coarse_dt);

    int64_t expect =
        int64_t{ds.sample_count} * ds.time_count * ds.frame_size();
    std::ifstream df(base / "data.bin", std::ios::binary);
    if (!df) throw std::runtime_error("dataset data.bin missing");
    ds.data.resize(expect);
    df.read(reinterpret_cast<char*>(ds.data.data()),
            static_cast<std::streamsize>(expect * sizeof(double)));
    if (df.gcount() != static_cast<std::streamsize>(expect * sizeof(double)))
        throw std::runtime_error("dataset data.bin truncated");
    char extra;
    if (df.read(&extra, 1); df.gcount() != 0)
        throw std::runtime_error("dataset data.bin has trailing bytes");
    return ds;
}

}  // namespace specml
