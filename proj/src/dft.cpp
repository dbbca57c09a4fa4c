#include "ssotfs/dft.hpp"

#include <cmath>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ssotfs::dft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct Plan {
    std::size_t n = 0;
    bool pow2 = false;
    // pow2: per-stage twiddles; generic: full n-th roots table e^{-j2*pi*k/n}
    std::vector<cdouble> roots;

    explicit Plan(std::size_t size) : n(size), pow2(is_pow2(size)) {
        roots.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
            roots[k] = {std::cos(ang), std::sin(ang)};
        }
    }
};

const Plan& plan_for(std::size_t n) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, Plan*> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, new Plan(n)).first;
    return *it->second;
}

// In-place radix-2 on a contiguous buffer. inverse selects conjugated twiddles.
void fft_pow2(cdouble* x, std::size_t n, const Plan& plan, bool inverse) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble w = plan.roots[k * step];
                if (inverse) w = std::conj(w);
                const cdouble u = x[i + k];
                const cdouble v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
            }
        }
    }
}

void dft_generic(cdouble* x, std::size_t n, const Plan& plan, bool inverse) {
    std::vector<cdouble> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cdouble acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cdouble w = plan.roots[(k * j) % n];
            if (inverse) w = std::conj(w);
            acc += x[j] * w;
        }
        out[k] = acc;
    }
    for (std::size_t k = 0; k < n; ++k) x[k] = out[k];
}

void transform(cdouble* data, std::size_t n, std::size_t stride, bool inverse) {
    if (n <= 1) return;
    const Plan& plan = plan_for(n);

    thread_local std::vector<cdouble> scratch;
    cdouble* buf = data;
    if (stride != 1) {
        scratch.resize(n);
        for (std::size_t i = 0; i < n; ++i) scratch[i] = data[i * stride];
        buf = scratch.data();
    }

    if (plan.pow2)
        fft_pow2(buf, n, plan, inverse);
    else
        dft_generic(buf, n, plan, inverse);

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    if (stride != 1) {
        for (std::size_t i = 0; i < n; ++i) data[i * stride] = buf[i] * scale;
    } else {
        for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
    }
}

} // namespace

void forward(cdouble* data, std::size_t n, std::size_t stride) {
    transform(data, n, stride, false);
}

void inverse(cdouble* data, std::size_t n, std::size_t stride) {
    transform(data, n, stride, true);
}

} // namespace ssotfs::dft
