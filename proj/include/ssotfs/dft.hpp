#pragma once

#include <cstddef>

#include "ssotfs/types.hpp"

namespace ssotfs::dft {

/// Unitary DFT of a length-n row, elements data[0], data[stride], ...
/// Power-of-two sizes run a radix-2 FFT; other sizes fall back to a direct
/// O(n^2) transform with cached twiddles.
void forward(cdouble* data, std::size_t n, std::size_t stride = 1);

/// Unitary inverse DFT (adjoint of forward).
void inverse(cdouble* data, std::size_t n, std::size_t stride = 1);

} // namespace ssotfs::dft
