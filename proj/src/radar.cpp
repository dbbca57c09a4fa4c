#include "ssotfs/radar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssotfs/tx.hpp"

namespace ssotfs {

std::vector<int> beam_tracking_set(int a_center, int n_range, int n_bs) {
    require(n_range >= 0 && n_range % 2 == 0, "n_range must be a nonnegative even number");
    require(n_range < n_bs, "n_range must be smaller than n_bs");
    require(a_center >= 1 && a_center <= n_bs, "beam center index out of range");
    std::vector<int> set;
    set.reserve(n_range + 1);
    for (int off = -n_range / 2; off <= n_range / 2; ++off) {
        long a = (a_center - 1 + off) % n_bs;
        if (a < 0) a += n_bs;
        set.push_back(static_cast<int>(a) + 1);
    }
    return set;
}

cvec despread(const cvec& r_stacked, int mn, int n_bs) {
    return detail::antenna_forward_dft(r_stacked, mn, n_bs, /*parallel=*/true);
}

std::vector<double> covariance_block_traces(const std::vector<cvec>& frames, int mn,
                                            int n_bs) {
    require(!frames.empty(), "covariance_block_traces: need at least one frame");
    std::vector<double> traces(n_bs, 0.0);
    for (const cvec& frame : frames) {
        require(static_cast<int>(frame.size()) == mn * n_bs,
                "covariance_block_traces: bad frame length");
        for (int k = 0; k < n_bs; ++k) {
            const cdouble* seg = frame.data() + static_cast<std::size_t>(k) * mn;
            double acc = 0.0;
            for (int t = 0; t < mn; ++t) acc += std::norm(seg[t]);
            traces[k] += acc / mn;
        }
    }
    for (double& t : traces) t /= static_cast<double>(frames.size());
    return traces;
}

RadarEstimate estimate_aoas(const std::vector<double>& traces, int k_users, int p_paths,
                            int n_bs, std::optional<double> noise_psd) {
    require(static_cast<int>(traces.size()) == n_bs, "traces length must be n_bs");
    const int want = k_users * p_paths;
    require(want >= 1 && want <= n_bs, "K*P must lie in 1..n_bs");

    std::vector<int> order(n_bs);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (traces[a] != traces[b]) return traces[a] > traces[b];
        return a < b;
    });

    RadarEstimate est;
    double floor = 0.0;
    if (noise_psd) {
        floor = *noise_psd;
    } else if (want < n_bs) {
        std::vector<double> rest;
        rest.reserve(n_bs - want);
        for (int i = want; i < n_bs; ++i) rest.push_back(traces[order[i]]);
        std::nth_element(rest.begin(), rest.begin() + rest.size() / 2, rest.end());
        floor = rest[rest.size() / 2];
    }
    est.noise_floor = floor;
    for (int i = 0; i < want; ++i) {
        const int idx = order[i] + 1;
        est.rx_indices.push_back(idx);
        est.aoas.push_back(aoa_from_rx_index(idx, n_bs));
        est.powers.push_back(std::max(traces[order[i]] - floor, 0.0));
    }
    return est;
}

std::vector<double> radar_power_allocation(const std::vector<double>& h_tilde_sq,
                                           double alpha_total, int n_range) {
    require(!h_tilde_sq.empty(), "radar_power_allocation: no paths");
    require(n_range >= 0 && n_range % 2 == 0, "n_range must be a nonnegative even number");
    require(alpha_total > 0.0, "alpha_total must be positive");
    double inv_sum = 0.0;
    for (double h : h_tilde_sq) {
        require(h > 0.0, "radar_power_allocation: |h~|^2 must be positive");
        inv_sum += 1.0 / h;
    }
    std::vector<double> alpha(h_tilde_sq.size());
    const double budget = alpha_total / (n_range + 1);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        alpha[i] = budget / h_tilde_sq[i] / inv_sum;
    return alpha;
}

namespace {

// Per-path powers replicated over each path's beam window.
PowerAllocation allocation_for(const Scenario& sc, AllocationPolicy policy, int n_range) {
    const int total = sc.total_paths();
    std::vector<double> per_path(total);
    if (policy == AllocationPolicy::Equal) {
        const double a = sc.frame.alpha_total / (static_cast<double>(total) * (n_range + 1));
        std::fill(per_path.begin(), per_path.end(), a);
    } else {
        std::vector<double> h_sq(total);
        for (int i = 0; i < total; ++i) h_sq[i] = std::norm(sc.paths[i].radar.reflect);
        per_path = radar_power_allocation(h_sq, sc.frame.alpha_total, n_range);
    }
    PowerAllocation alloc = PowerAllocation::zeros(sc.frame.n_bs);
    for (int i = 0; i < total; ++i) {
        for (int a : beam_tracking_set(sc.paths[i].ang.a_tx, n_range, sc.frame.n_bs))
            alloc.alpha[a - 1] += per_path[i];
    }
    return alloc;
}

cvec random_bpsk_frame(int mn, Rng& rng) {
    cvec x(mn);
    for (auto& s : x) s = rng.uniform() < 0.5 ? cdouble{1.0, 0.0} : cdouble{-1.0, 0.0};
    return x;
}

std::vector<int> sorted_true_rx(const Scenario& sc) {
    std::vector<int> idx;
    idx.reserve(sc.paths.size());
    for (const auto& p : sc.paths) idx.push_back(p.ang.a_rx);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

ResultTable miss_detection_experiment(const MissDetectionConfig& cfg) {
    cfg.frame.validate();
    if (cfg.trials_per_point <= 0) throw ConfigError("trials_per_point must be positive");
    if (cfg.radar_snr_db.empty()) throw ConfigError("radar SNR grid is empty");

    ScenarioConfig scfg;
    scfg.l_max = cfg.l_max;
    scfg.k_max = cfg.k_max;
    scfg.fractional_doppler = cfg.fractional_doppler;
    scfg.angles = AnglePolicy::OnGrid;
    scfg.min_index_separation = cfg.n_range + 1;

    ResultTable table;
    table.metadata.emplace_back("experiment", "miss-detection");
    for (std::size_t point = 0; point < cfg.radar_snr_db.size(); ++point) {
        const double snr = cfg.radar_snr_db[point];
        const double noise_psd = cfg.frame.alpha_total / std::pow(10.0, snr / 10.0);
        std::vector<std::uint8_t> miss(cfg.trials_per_point, 0);

#pragma omp parallel for schedule(dynamic, 8)
        for (int trial = 0; trial < cfg.trials_per_point; ++trial) {
            Rng rng = Rng::stream(cfg.seed, point, trial);
            const Scenario sc = sample_scenario(cfg.frame, cfg.k_users,
                                                cfg.paths_per_user, scfg, rng);
            const PowerAllocation alloc = allocation_for(sc, cfg.allocation, cfg.n_range);
            const cvec x = random_bpsk_frame(cfg.frame.mn(), rng);
            const cvec s = full_tx_chain(x, {}, alloc, cfg.frame);
            const cvec z = apply_radar_channel(sc, s, noise_psd, rng);
            const auto traces = covariance_block_traces({z}, cfg.frame.mn(), cfg.frame.n_bs);
            auto est = estimate_aoas(traces, cfg.k_users, cfg.paths_per_user,
                                     cfg.frame.n_bs, noise_psd);
            std::sort(est.rx_indices.begin(), est.rx_indices.end());
            miss[trial] = est.rx_indices != sorted_true_rx(sc) ? 1 : 0;
        }

        long misses = 0;
        for (std::uint8_t m : miss) misses += m;
        ResultRow row;
        row.series = "miss_detection";
        row.x = snr;
        row.metric = static_cast<double>(misses) / cfg.trials_per_point;
        row.n_trials = cfg.trials_per_point;
        row.ci_half_width = wilson_half_width(misses, cfg.trials_per_point);
        table.rows.push_back(row);
    }
    return table;
}

ResultTable aoa_demo(const AoaDemoConfig& cfg) {
    cfg.frame.validate();
    if (cfg.frames_observed <= 0) throw ConfigError("frames_observed must be positive");

    ScenarioConfig scfg;
    scfg.l_max = cfg.l_max;
    scfg.k_max = cfg.k_max;
    scfg.angles = AnglePolicy::OnGrid;
    scfg.min_index_separation = cfg.n_range + 1;

    Rng scen_rng = Rng::stream(cfg.seed, 0);
    const Scenario sc = sample_scenario(cfg.frame, cfg.k_users, cfg.paths_per_user, scfg,
                                        scen_rng);
    const PowerAllocation alloc = allocation_for(sc, cfg.allocation, cfg.n_range);
    const double noise_psd = cfg.frame.alpha_total / std::pow(10.0, cfg.radar_snr_db / 10.0);

    const int n_bs = cfg.frame.n_bs;
    std::vector<std::vector<double>> per_frame(cfg.frames_observed);
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < cfg.frames_observed; ++f) {
        Rng rng = Rng::stream(cfg.seed, 1, f);
        const cvec x = random_bpsk_frame(cfg.frame.mn(), rng);
        const cvec s = full_tx_chain(x, {}, alloc, cfg.frame);
        const cvec z = apply_radar_channel(sc, s, noise_psd, rng);
        per_frame[f] = covariance_block_traces({z}, cfg.frame.mn(), n_bs);
    }

    ResultTable table;
    table.metadata.emplace_back("experiment", "aoa-demo");
    {
        std::string truth;
        auto idx = sorted_true_rx(sc);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i) truth += " ";
            truth += std::to_string(idx[i]);
        }
        table.metadata.emplace_back("true_rx_indices", truth);
    }
    for (int a = 0; a < n_bs; ++a) {
        double mean = 0.0, sq = 0.0;
        for (int f = 0; f < cfg.frames_observed; ++f) mean += per_frame[f][a];
        mean /= cfg.frames_observed;
        for (int f = 0; f < cfg.frames_observed; ++f)
            sq += (per_frame[f][a] - mean) * (per_frame[f][a] - mean);
        const double sd = cfg.frames_observed > 1
                              ? std::sqrt(sq / (cfg.frames_observed - 1))
                              : 0.0;
        ResultRow row;
        row.series = "trace";
        row.x = a + 1;
        row.metric = mean;
        row.n_trials = cfg.frames_observed;
        row.ci_half_width = 1.959963984540054 * sd / std::sqrt(cfg.frames_observed);
        table.rows.push_back(row);
    }
    return table;
}

} // namespace ssotfs
