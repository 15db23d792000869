#pragma once

#include "specml/state.hpp"
#include "specml/tensor.hpp"

namespace specml {

/// RealField stores channels as separate planes; Tensor interleaves them
/// channels-last. Both flatten space row-major.
Tensor tensor_from_field(const RealField& field);
RealField field_from_tensor(const Grid& grid, const Tensor& t,
                            double time = 0.0);

}  // namespace specml
