#include "ssotfs/otfs.hpp"

#include <cmath>

#include "ssotfs/dft.hpp"

namespace ssotfs {

namespace {

// Threshold below which the row batch is not worth spreading across threads.
constexpr int kParallelGrainElems = 1 << 18;

void doppler_dft_rows(cvec& grid, int m, int n, bool inverse, bool parallel) {
    // One strided length-n transform per delay row.
    if (parallel && m * n >= kParallelGrainElems) {
#pragma omp parallel for schedule(static)
        for (int row = 0; row < m; ++row) {
            if (inverse)
                dft::inverse(grid.data() + row, n, m);
            else
                dft::forward(grid.data() + row, n, m);
        }
    } else {
        for (int row = 0; row < m; ++row) {
            if (inverse)
                dft::inverse(grid.data() + row, n, m);
            else
                dft::forward(grid.data() + row, n, m);
        }
    }
}

} // namespace

cvec dd_to_td(const cvec& x, const FrameParams& p) {
    require(static_cast<int>(x.size()) == p.mn(), "dd_to_td: input length must be M*N");
    cvec v = x;
    doppler_dft_rows(v, p.m, p.n, /*inverse=*/true, /*parallel=*/true);
    return v;
}

cvec td_to_dd(const cvec& v, const FrameParams& p) {
    require(static_cast<int>(v.size()) == p.mn(), "td_to_dd: input length must be M*N");
    cvec x = v;
    doppler_dft_rows(x, p.m, p.n, /*inverse=*/false, /*parallel=*/true);
    return x;
}

cvec cyclic_shift(const cvec& v, long shift) {
    require(!v.empty(), "cyclic_shift: empty input");
    const long len = static_cast<long>(v.size());
    long s = shift % len;
    if (s < 0) s += len;
    if (s == 0) return v;
    cvec out(v.size());
    // forward shift: out[n] = v[n - s mod len]
    for (long n = 0; n < len; ++n) out[(n + s) % len] = v[n];
    return out;
}

cvec doppler_ramp(const cvec& v, double kappa) {
    const std::size_t len = v.size();
    cvec out(len);
    const double step = 2.0 * M_PI * kappa / static_cast<double>(len);
    for (std::size_t n = 0; n < len; ++n) {
        const double ang = step * static_cast<double>(n);
        out[n] = v[n] * cdouble{std::cos(ang), std::sin(ang)};
    }
    return out;
}

namespace serial {

cvec dd_to_td(const cvec& x, const FrameParams& p) {
    require(static_cast<int>(x.size()) == p.mn(), "dd_to_td: input length must be M*N");
    cvec v = x;
    doppler_dft_rows(v, p.m, p.n, /*inverse=*/true, /*parallel=*/false);
    return v;
}

cvec td_to_dd(const cvec& v, const FrameParams& p) {
    require(static_cast<int>(v.size()) == p.mn(), "td_to_dd: input length must be M*N");
    cvec x = v;
    doppler_dft_rows(x, p.m, p.n, /*inverse=*/false, /*parallel=*/false);
    return x;
}

} // namespace serial

} // namespace ssotfs
