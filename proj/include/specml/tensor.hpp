#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace specml {

/// Dense real-valued array on a 1D or 2D periodic grid, channels-last:
/// layout (x, c) or (x, y, c). Scalars use nx = ny = channels = 1.
struct Tensor {
    int dims = 1;
    int nx = 1, ny = 1;
    int channels = 1;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int dims_, int nx_, int ny_, int channels_)
        : dims(dims_), nx(nx_), ny(ny_), channels(channels_),
          data(static_cast<size_t>(nx_) * ny_ * channels_, 0.0) {
        if (dims_ != 1 && dims_ != 2)
            throw std::invalid_argument("tensor dims must be 1 or 2");
        if (nx_ < 1 || ny_ < 1 || channels_ < 1)
            throw std::invalid_argument("tensor shape must be positive");
        if (dims_ == 1 && ny_ != 1)
            throw std::invalid_argument("1D tensor requires ny == 1");
    }

    static Tensor scalar(double v) {
        Tensor t(1, 1, 1, 1);
        t.data[0] = v;
        return t;
    }

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    int spatial_size() const { return nx * ny; }

    double& at(int x, int c) { return data[static_cast<size_t>(x) * channels + c]; }
    double at(int x, int c) const {
        return data[static_cast<size_t>(x) * channels + c];
    }
    double& at(int x, int y, int c) {
        return data[(static_cast<size_t>(x) * ny + y) * channels + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<size_t>(x) * ny + y) * channels + c];
    }

    bool same_shape(const Tensor& o) const {
        return dims == o.dims && nx == o.nx && ny == o.ny &&
               channels == o.channels;
    }
    std::string shape_string() const {
        std::string s = "(" + std::to_string(nx);
        if (dims == 2) s += "," + std::to_string(ny);
        s += ";c=" + std::to_string(channels) + ")";
        return s;
    }
};

inline void require_same_shape(const Tensor& a, const Tensor& b,
                               const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    a.shape_string() + " vs " +
                                    b.shape_string());
}

}  // namespace specml
