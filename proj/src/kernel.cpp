// Built with fast-math so the activation loops vectorize. Nothing in this
// file may rely on NaN or infinity semantics.
#include "kernel.hpp"

#include <algorithm>
#include <cmath>

namespace pilube::detail {

namespace {

// tanh saturates to +-1 in double well before |z| = 20; clamping keeps exp finite.
constexpr double kClamp = 20.0;

// Loop trip counts are padded to a multiple of the widest vector in use.
constexpr std::size_t kLanes = 8;

void activate_tanh(double* z, std::size_t n) {
#pragma omp simd aligned(z : 64)
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::min(std::max(z[i], -kClamp), kClamp);
        const double e = std::exp(2.0 * c);
        z[i] = 1.0 - 2.0 / (e + 1.0);
    }
}

void activate_logistic(double* z, std::size_t n) {
#pragma omp simd aligned(z : 64)
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::min(std::max(z[i], -2.0 * kClamp), 2.0 * kClamp);
        z[i] = 1.0 / (1.0 + std::exp(-c));
    }
}

}  // namespace

void forward_chunk(const MlpModel& model, const double* columns, std::size_t rows, std::size_t first,
                   std::size_t count, Interval* out) {
    const std::size_t in = model.input_dim;
    const std::size_t h = model.hidden;
    const double* w1 = model.weights.data();
    const double* b1 = w1 + in * h;
    const double* w2 = b1 + h;
    const double* b2 = w2 + 2 * h;

    // Every row runs through the full-width vector loops (no scalar tail), so
    // a row's result does not depend on its position or the batch size.
    const std::size_t padded = (count + kLanes - 1) / kLanes * kLanes;
    alignas(64) double x[kRowChunk];
    alignas(64) double z[kRowChunk];
    alignas(64) double lo[kRowChunk];
    alignas(64) double hi[kRowChunk];
    std::fill_n(lo, padded, b2[0]);
    std::fill_n(hi, padded, b2[1]);
    std::fill_n(x + count, padded - count, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
        std::fill_n(z, padded, b1[j]);
        for (std::size_t k = 0; k < in; ++k) {
            const double w = w1[j * in + k];
            std::copy_n(columns + k * rows + first, count, x);
#pragma omp simd aligned(x, z : 64)
            for (std::size_t i = 0; i < padded; ++i) z[i] += w * x[i];
        }
        if (model.activation == Activation::Tanh)
            activate_tanh(z, padded);
        else
            activate_logistic(z, padded);
        const double a = w2[j];
        const double b = w2[h + j];
#pragma omp simd aligned(z, lo, hi : 64)
        for (std::size_t i = 0; i < padded; ++i) {
            lo[i] += a * z[i];
            hi[i] += b * z[i];
        }
    }
    for (std::size_t i = 0; i < count; ++i) out[i] = {lo[i], hi[i]};
}

}  // namespace pilube::detail
