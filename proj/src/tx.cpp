#include "ssotfs/tx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssotfs/dft.hpp"
#include "ssotfs/otfs.hpp"

namespace ssotfs {

double PowerAllocation::total() const {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}

void PowerAllocation::validate(double alpha_total) const {
    for (double a : alpha)
        require(a >= 0.0, "PowerAllocation: negative per-antenna power");
    require(total() <= alpha_total + 1e-9, "PowerAllocation: budget exceeded");
}

cvec apply_precoder(const PrecoderSpec& w, const cvec& v) {
    // factors applied right to left: Delta^{k.}, Pi^{l.}, Pi^{-l^}, Delta^{-k^}
    cvec out = doppler_ramp(v, w.virtual_doppler);
    out = cyclic_shift(out, w.virtual_delay);
    out = cyclic_shift(out, -w.delay_est);
    out = doppler_ramp(out, -w.doppler_est);
    return out;
}

std::map<int, PrecoderSpec> build_precoder_set(const std::vector<PathEstimate>& paths,
                                               const FrameParams& p, int n_range,
                                               VirtualIndexPolicy policy, Rng* rng) {
    const int n_paths = static_cast<int>(paths.size());
    if (policy != VirtualIndexPolicy::Zero && n_paths > std::min(p.m, p.n))
        throw ConfigError("distinct virtual indices infeasible: paths > min(M, N)");
    if (n_range < 0 || n_range % 2 != 0)
        throw ConfigError("n_range must be a nonnegative even number");

    std::vector<int> vdelay(n_paths, 0), vdoppler(n_paths, 0);
    switch (policy) {
        case VirtualIndexPolicy::Zero:
            break;
        case VirtualIndexPolicy::Distinct:
            for (int i = 0; i < n_paths; ++i) {
                vdelay[i] = i % p.m;
                vdoppler[i] = i % p.n;
            }
            break;
        case VirtualIndexPolicy::Random: {
            require(rng != nullptr, "random virtual-index policy needs an rng");
            rng->sample_distinct(p.m, n_paths, vdelay.begin());
            rng->sample_distinct(p.n, n_paths, vdoppler.begin());
            break;
        }
    }

    std::map<int, PrecoderSpec> set;
    for (int i = 0; i < n_paths; ++i) {
        PrecoderSpec spec{paths[i].delay_est, paths[i].doppler_est, vdelay[i], vdoppler[i]};
        // same precoder on every antenna of the beam window
        for (int off = -n_range / 2; off <= n_range / 2; ++off) {
            long a = (paths[i].antenna - 1 + off) % p.n_bs;
            if (a < 0) a += p.n_bs;
            if (!set.emplace(static_cast<int>(a) + 1, spec).second)
                throw ConfigError("beam windows overlap: precoder already assigned");
        }
    }
    return set;
}

namespace {

constexpr int kParallelGrainElems = 1 << 18;

cvec antenna_dft_rows(const cvec& stacked, int mn, int n_bs, bool inverse, bool parallel) {
    require(static_cast<int>(stacked.size()) == mn * n_bs,
            "stacked vector length must be mn * n_bs");
    cvec out = stacked;
    // one strided length-n_bs transform per time-delay sample
    if (parallel && mn * n_bs >= kParallelGrainElems) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < mn; ++t) {
            if (inverse)
                dft::inverse(out.data() + t, n_bs, mn);
            else
                dft::forward(out.data() + t, n_bs, mn);
        }
    } else {
        for (int t = 0; t < mn; ++t) {
            if (inverse)
                dft::inverse(out.data() + t, n_bs, mn);
            else
                dft::forward(out.data() + t, n_bs, mn);
        }
    }
    return out;
}

} // namespace

cvec spatial_spread(const cvec& z_stacked, int mn, int n_bs) {
    return antenna_dft_rows(z_stacked, mn, n_bs, /*inverse=*/true, /*parallel=*/true);
}

namespace serial {
cvec spatial_spread(const cvec& z_stacked, int mn, int n_bs) {
    return antenna_dft_rows(z_stacked, mn, n_bs, /*inverse=*/true, /*parallel=*/false);
}
} // namespace serial

namespace detail {
// shared with radar despread (forward transform over the antenna partition)
cvec antenna_forward_dft(const cvec& stacked, int mn, int n_bs, bool parallel) {
    return antenna_dft_rows(stacked, mn, n_bs, /*inverse=*/false, parallel);
}
} // namespace detail

cvec full_tx_chain(const cvec& x, const std::map<int, PrecoderSpec>& precoders,
                   const PowerAllocation& alloc, const FrameParams& p) {
    const int mn = p.mn();
    require(static_cast<int>(x.size()) == mn, "full_tx_chain: x length must be M*N");
    require(static_cast<int>(alloc.alpha.size()) == p.n_bs,
            "full_tx_chain: allocation length must be n_bs");

    const cvec v = dd_to_td(x, p);
    cvec z(static_cast<std::size_t>(mn) * p.n_bs, cdouble{0.0, 0.0});
    for (int a = 1; a <= p.n_bs; ++a) {
        const double power = alloc.alpha[a - 1];
        if (power == 0.0) continue;
        const double gain = std::sqrt(power);
        auto it = precoders.find(a);
        cdouble* seg = z.data() + static_cast<std::size_t>(a - 1) * mn;
        if (it == precoders.end() || it->second.is_identity()) {
            for (int t = 0; t < mn; ++t) seg[t] = gain * v[t];
        } else {
            const cvec d = apply_precoder(it->second, v);
            for (int t = 0; t < mn; ++t) seg[t] = gain * d[t];
        }
    }
    return spatial_spread(z, mn, p.n_bs);
}

} // namespace ssotfs
