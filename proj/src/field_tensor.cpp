#include "specml/field_tensor.hpp"

#include <stdexcept>

namespace specml {

Tensor tensor_from_field(const RealField& field) {
    const Grid& grid = field.grid;
    Tensor t(grid.dims, grid.resolution,
             grid.dims == 2 ? grid.resolution : 1, field.num_channels());
    int n = grid.num_points();
    for (int c = 0; c < field.num_channels(); ++c)
        for (int i = 0; i < n; ++i)
            t.data[static_cast<size_t>(i) * t.channels + c] =
                field.channels[c][i];
    return t;
}

RealField field_from_tensor(const Grid& grid, const Tensor& t, double time) {
    if (t.dims != grid.dims || t.nx != grid.resolution ||
        (grid.dims == 2 && t.ny != grid.resolution))
        throw std::invalid_argument("tensor shape does not match grid");
    RealField f(grid, t.channels, time);
    int n = grid.num_points();
    for (int c = 0; c < t.channels; ++c)
        for (int i = 0; i < n; ++i)
            f.channels[c][i] =
                t.data[static_cast<size_t>(i) * t.channels + c];
    return f;
}

}  // namespace specml
