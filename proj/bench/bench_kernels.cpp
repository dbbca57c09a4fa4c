#include <chrono>
#include <cstdio>
#include <functional>
#include <omp.h>

#include "ssotfs/otfs.hpp"
#include "ssotfs/radar.hpp"
#include "ssotfs/rng.hpp"
#include "ssotfs/tx.hpp"

using namespace ssotfs;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
    // warm-up
    fn();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

cvec random_vec(std::size_t n, Rng& rng) {
    cvec v(n);
    for (auto& s : v) s = rng.cgaussian(1.0);
    return v;
}

} // namespace

int main() {
    FrameParams p; // production-size frame: M=32, N=16, n_bs=128
    Rng rng(42);
    const cvec x = random_vec(p.mn(), rng);
    const cvec stacked = random_vec(static_cast<std::size_t>(p.mn()) * p.n_bs, rng);
    // a frame large enough to clear the kernels' parallel grain threshold
    const int big_mn = 1024, big_nb = 256;
    const cvec big = random_vec(static_cast<std::size_t>(big_mn) * big_nb, rng);
    const int reps = 100;

    std::printf("threads available: %d\n", omp_get_max_threads());
    std::printf("(row-parallel kernels fall back to serial below the grain threshold)\n");
    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial ms", "omp ms", "speedup");

    struct Row {
        const char* name;
        double serial;
        double parallel;
    };
    Row rows[] = {
        {"dd_to_td (32x16)",
         time_ms(reps, [&] { serial::dd_to_td(x, p); }),
         time_ms(reps, [&] { dd_to_td(x, p); })},
        {"spatial_spread (512x128)",
         time_ms(reps, [&] { serial::spatial_spread(stacked, p.mn(), p.n_bs); }),
         time_ms(reps, [&] { spatial_spread(stacked, p.mn(), p.n_bs); })},
        {"despread (512x128)",
         time_ms(reps, [&] { detail::antenna_forward_dft(stacked, p.mn(), p.n_bs, false); }),
         time_ms(reps, [&] { despread(stacked, p.mn(), p.n_bs); })},
        {"spatial_spread (1024x256)",
         time_ms(20, [&] { serial::spatial_spread(big, big_mn, big_nb); }),
         time_ms(20, [&] { spatial_spread(big, big_mn, big_nb); })},
        {"despread (1024x256)",
         time_ms(20, [&] { detail::antenna_forward_dft(big, big_mn, big_nb, false); }),
         time_ms(20, [&] { despread(big, big_mn, big_nb); })},
    };
    for (const Row& r : rows)
        std::printf("%-28s %10.4f %10.4f %8.2fx\n", r.name, r.serial, r.parallel,
                    r.serial / r.parallel);

    // trial-level parallelism: the pattern the experiments use
    const int trials = 200;
    auto run_trials = [&](bool parallel) {
        std::vector<double> sink(trials);
        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (int t = 0; t < trials; ++t) {
                Rng r = Rng::stream(7, 0, t);
                const cvec f = random_vec(p.mn(), r);
                sink[t] = std::norm(dd_to_td(f, p)[0]);
            }
        } else {
            for (int t = 0; t < trials; ++t) {
                Rng r = Rng::stream(7, 0, t);
                const cvec f = random_vec(p.mn(), r);
                sink[t] = std::norm(serial::dd_to_td(f, p)[0]);
            }
        }
        double acc = 0;
        for (double v : sink) acc += v;
        return acc;
    };
    const double ts = time_ms(20, [&] { run_trials(false); });
    const double tp = time_ms(20, [&] { run_trials(true); });
    std::printf("%-28s %10.4f %10.4f %8.2fx\n", "trial loop (200 frames)", ts, tp, ts / tp);
    return 0;
}
