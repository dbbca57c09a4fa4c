#pragma once

#include "ssotfs/types.hpp"

namespace ssotfs {

/// v = (F_N^H kron I_M) x: inverse unitary N-point DFT across the Doppler
/// dimension for each fixed delay index. Column-major vec() with delay as the
/// fast axis; the Kronecker product is never materialized. Energy-preserving.
cvec dd_to_td(const cvec& x, const FrameParams& p);

/// x = (F_N kron I_M) v: exact inverse of dd_to_td.
cvec td_to_dd(const cvec& v, const FrameParams& p);

/// Pi^l v: forward cyclic shift by l positions (l reduced mod the length,
/// negative l allowed).
cvec cyclic_shift(const cvec& v, long shift);

/// Delta^kappa v: entry n scaled by exp(j*2*pi*kappa*n/len) for n = 0..len-1.
/// kappa may be fractional; |out| == |v| entrywise.
cvec doppler_ramp(const cvec& v, double kappa);

namespace serial {
// Reference implementations of the batched transforms, kept single-threaded
// for parity tests and the kernel benchmark.
cvec dd_to_td(const cvec& x, const FrameParams& p);
cvec td_to_dd(const cvec& v, const FrameParams& p);
} // namespace serial

} // namespace ssotfs
