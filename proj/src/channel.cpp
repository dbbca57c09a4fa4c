#include "ssotfs/channel.hpp"

#include <algorithm>
#include <cmath>

#include "ssotfs/otfs.hpp"
#include "ssotfs/tx.hpp"

namespace ssotfs {

namespace {

// Distinct transmit angular indices with a minimum modular spacing; rejection
// sampled, which is cheap while K*P*sep stays well below n_bs.
std::vector<int> draw_tx_indices(int count, int sep, int n_bs, Rng& rng) {
    if (count * std::max(sep, 1) > n_bs)
        throw ConfigError("cannot place distinct angular indices: K*P*separation > n_bs");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<int> idx(count);
        rng.sample_distinct(n_bs, count, idx.begin());
        for (int& v : idx) v += 1;
        bool ok = true;
        for (int i = 0; i < count && ok; ++i) {
            for (int j = i + 1; j < count && ok; ++j) {
                int d = std::abs(idx[i] - idx[j]);
                d = std::min(d, n_bs - d);
                if (d < sep) ok = false;
            }
        }
        if (ok) return idx;
    }
    throw ConfigError("angular-index separation constraint too tight");
}

void add_noise(cvec& v, double noise_psd, Rng& rng) {
    if (noise_psd <= 0.0) return;
    for (auto& s : v) s += rng.cgaussian(noise_psd);
}

} // namespace

Scenario sample_scenario(const FrameParams& frame, int k_users, int paths_per_user,
                         const ScenarioConfig& cfg, Rng& rng) {
    frame.validate();
    if (k_users < 1 || paths_per_user < 1)
        throw ConfigError("sample_scenario: need K >= 1 and P >= 1");
    if (k_users * paths_per_user > frame.n_bs)
        throw ConfigError("sample_scenario: K*P exceeds n_bs, paths not separable");
    if (cfg.l_max < 0 || cfg.l_max > frame.m - 1)
        throw ConfigError("sample_scenario: l_max outside 0..M-1");
    if (cfg.k_max < 0 || cfg.k_max > frame.n - 1)
        throw ConfigError("sample_scenario: k_max outside 0..N-1");

    const int total = k_users * paths_per_user;
    Scenario sc;
    sc.frame = frame;
    sc.n_users = k_users;
    sc.paths_per_user = paths_per_user;
    sc.on_grid = cfg.angles == AnglePolicy::OnGrid;
    sc.paths.resize(total);

    std::vector<double> phis(total);
    if (sc.on_grid) {
        const auto idx = draw_tx_indices(total, std::max(cfg.min_index_separation, 1),
                                         frame.n_bs, rng);
        for (int i = 0; i < total; ++i) phis[i] = aod_from_tx_index(idx[i], frame.n_bs);
    } else {
        for (int i = 0; i < total; ++i)
            phis[i] = std::asin(rng.uniform(-1.0, 1.0));
    }

    const double gain_var = 1.0 / paths_per_user;
    for (int i = 0; i < total; ++i) {
        ScenarioPath& sp = sc.paths[i];
        sp.comm.phi = phis[i];
        sp.ang = angular_indices(phis[i], frame.n_bs);
        sp.comm.delay = rng.uniform_int(0, cfg.l_max);
        sp.comm.doppler = rng.uniform_int(0, cfg.k_max);
        sp.comm.frac_doppler = cfg.fractional_doppler ? rng.uniform(-0.5, 0.5) : 0.0;
        sp.comm.gain = rng.cgaussian(gain_var);
        sp.radar.reflect = rng.cgaussian(1.0);
        sp.radar.delay2 = 2L * sp.comm.delay;
        sp.radar.doppler2 = 2.0 * sp.comm.doppler_total();
    }
    return sc;
}

cvec apply_td_path(const cvec& v, cdouble gain, long delay, double doppler) {
    cvec out = doppler_ramp(v, doppler);
    out = cyclic_shift(out, delay);
    for (auto& s : out) s *= gain;
    return out;
}

namespace {

cvec column(const cvec& stacked, int mn, int a /*1-based*/) {
    const cdouble* seg = stacked.data() + static_cast<std::size_t>(a - 1) * mn;
    return cvec(seg, seg + mn);
}

// Beamformed per-path input: z columns combined with the unit-power angular
// weights a^T(phi) F^H (z already carries sqrt(alpha)).
cvec combine_free_angle(const cvec& z, int mn, int n_bs, double phi) {
    const cvec g = angular_comm_vector(phi, n_bs, std::vector<double>(n_bs, 1.0));
    cvec b(mn, cdouble{0.0, 0.0});
    for (int a = 1; a <= n_bs; ++a) {
        const cdouble w = g[a - 1];
        if (w == cdouble{0.0, 0.0}) continue;
        const cdouble* seg = z.data() + static_cast<std::size_t>(a - 1) * mn;
        for (int t = 0; t < mn; ++t) b[t] += w * seg[t];
    }
    return b;
}

} // namespace

cvec apply_comm_channel(const Scenario& sc, int user, const cvec& s, double noise_psd,
                        Rng& rng) {
    const int mn = sc.frame.mn();
    require(user >= 0 && user < sc.n_users, "apply_comm_channel: unknown user index");
    require(static_cast<int>(s.size()) == mn * sc.frame.n_bs,
            "apply_comm_channel: bad transmit vector length");

    const cvec z = detail::antenna_forward_dft(s, mn, sc.frame.n_bs, /*parallel=*/true);
    cvec r(mn, cdouble{0.0, 0.0});
    for (int p = 0; p < sc.paths_per_user; ++p) {
        const ScenarioPath& sp = sc.path(user, p);
        const cvec b = (sc.on_grid && sp.ang.on_grid)
                           ? column(z, mn, sp.ang.a_tx)
                           : combine_free_angle(z, mn, sc.frame.n_bs, sp.comm.phi);
        const cvec y = apply_comm_path(b, sp.comm);
        for (int t = 0; t < mn; ++t) r[t] += y[t];
    }
    add_noise(r, noise_psd, rng);
    return r;
}

cvec apply_radar_channel(const Scenario& sc, const cvec& s, double noise_psd, Rng& rng) {
    const int mn = sc.frame.mn();
    const int n_bs = sc.frame.n_bs;
    require(static_cast<int>(s.size()) == mn * n_bs,
            "apply_radar_channel: bad transmit vector length");

    const cvec z = detail::antenna_forward_dft(s, mn, n_bs, /*parallel=*/true);
    cvec out(static_cast<std::size_t>(mn) * n_bs, cdouble{0.0, 0.0});
    for (const ScenarioPath& sp : sc.paths) {
        if (sc.on_grid && sp.ang.on_grid) {
            const cvec echo = apply_radar_path(column(z, mn, sp.ang.a_tx), sp.radar);
            cdouble* seg = out.data() + static_cast<std::size_t>(sp.ang.a_rx - 1) * mn;
            for (int t = 0; t < mn; ++t) seg[t] += echo[t];
        } else {
            // full angular coupling F a a^T F^H applied to the TDA columns
            const Eigen::MatrixXcd g = angular_radar_matrix(
                sp.comm.phi, n_bs, std::vector<double>(n_bs, 1.0));
            for (int a = 1; a <= n_bs; ++a) {
                const cvec echo = apply_radar_path(column(z, mn, a), sp.radar);
                for (int k = 1; k <= n_bs; ++k) {
                    const cdouble w = g(k - 1, a - 1);
                    cdouble* seg = out.data() + static_cast<std::size_t>(k - 1) * mn;
                    for (int t = 0; t < mn; ++t) seg[t] += w * echo[t];
                }
            }
        }
    }
    add_noise(out, noise_psd, rng);
    return out;
}

} // namespace ssotfs
