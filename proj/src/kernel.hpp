#pragma once

#include <cstddef>

#include "pilube/network.hpp"

namespace pilube::detail {

/// Evaluates rows [first, first + count) of a column-major matrix with
/// `rows` rows. `count` must not exceed kRowChunk.
void forward_chunk(const MlpModel& model, const double* columns, std::size_t rows, std::size_t first,
                   std::size_t count, Interval* out);

}  // namespace pilube::detail
