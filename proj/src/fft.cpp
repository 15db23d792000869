#include "specml/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace specml {
namespace {

// Plan cache keyed by (dims, n, sign). Plans are created with FFTW_UNALIGNED
// so they can be executed on any caller buffer via fftw_execute_dft.
// fftw planning is not thread-safe; execution on distinct buffers is.
class PlanCache {
public:
    fftw_plan get(int dims, int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(dims, n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        int total = dims == 1 ? n : n * n;
        std::vector<fftw_complex> in(total), out(total);
        fftw_plan plan = nullptr;
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (dims == 1) {
            plan = fftw_plan_dft_1d(n, in.data(), out.data(), sign, flags);
        } else {
            plan = fftw_plan_dft_2d(n, n, in.data(), out.data(), sign, flags);
        }
        plans_[key] = plan;
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(const Grid& grid, int sign, const std::complex<double>* in,
             std::complex<double>* out) {
    fftw_plan plan = cache().get(grid.dims, grid.resolution, sign);
    // Plans are out-of-place; copy through a scratch buffer when aliased.
    if (in == out) {
        std::vector<std::complex<double>> tmp(in, in + grid.num_points());
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(tmp.data()),
                         reinterpret_cast<fftw_complex*>(out));
    } else {
        fftw_execute_dft(
            plan,
            reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
            reinterpret_cast<fftw_complex*>(out));
    }
}

}  // namespace

void fft_forward(const Grid& grid, const std::complex<double>* in,
                 std::complex<double>* out) {
    execute(grid, FFTW_FORWARD, in, out);
    const double scale = 1.0 / grid.num_points();
    for (int i = 0; i < grid.num_points(); ++i) out[i] *= scale;
}

void fft_inverse(const Grid& grid, const std::complex<double>* in,
                 std::complex<double>* out) {
    execute(grid, FFTW_BACKWARD, in, out);
}

}  // namespace specml
