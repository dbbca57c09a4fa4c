#pragma once

#include <vector>

#include "ssotfs/angular.hpp"
#include "ssotfs/rng.hpp"
#include "ssotfs/types.hpp"

namespace ssotfs {

/// One resolvable communication path: complex gain, AoD, integer delay index,
/// integer Doppler index plus fractional offset in [-1/2, 1/2].
struct Path {
    cdouble gain{0.0, 0.0};
    double phi = 0.0;
    int delay = 0;
    int doppler = 0;
    double frac_doppler = 0.0;

    double doppler_total() const { return doppler + frac_doppler; }
};

/// Radar view of the same path: reflection coefficient and round-trip
/// delay/Doppler (both exactly doubled).
struct RadarPath {
    cdouble reflect{0.0, 0.0};
    long delay2 = 0;        ///< 2 * delay, reduced mod MN when applied
    double doppler2 = 0.0;  ///< 2 * (doppler + frac_doppler), single real exponent
};

struct ScenarioPath {
    Path comm;
    RadarPath radar;
    AngularIndices ang;
};

/// K users times P paths, user-major. When on_grid is set every path sits
/// exactly on the angular grid and the channel applications
/// use the sparse single-antenna couplings.
struct Scenario {
    FrameParams frame;
    int n_users = 0;
    int paths_per_user = 0;
    bool on_grid = true;
    std::vector<ScenarioPath> paths;

    const ScenarioPath& path(int user, int p) const {
        return paths[static_cast<std::size_t>(user) * paths_per_user + p];
    }
    int total_paths() const { return n_users * paths_per_user; }
};

enum class AnglePolicy { OnGrid, Free };

struct ScenarioConfig {
    int l_max = 10;
    int k_max = 6;
    bool fractional_doppler = true;
    AnglePolicy angles = AnglePolicy::OnGrid;
    /// Minimum modular spacing between transmit angular indices; use
    /// n_range + 1 when beam windows must stay disjoint.
    int min_index_separation = 1;
};

/// Draws a scenario: gains CN(0, 1/P), reflections CN(0, 1), delays uniform on
/// 0..l_max, Doppler indices uniform on 0..k_max with uniform fractional part
/// (or zero), and distinct transmit angular indices across all K*P paths.
Scenario sample_scenario(const FrameParams& frame, int k_users, int paths_per_user,
                         const ScenarioConfig& cfg, Rng& rng);

/// gain * Pi^delay Delta^doppler v, applied ramp first as in the TD path model.
cvec apply_td_path(const cvec& v, cdouble gain, long delay, double doppler);

inline cvec apply_comm_path(const cvec& v, const Path& path) {
    return apply_td_path(v, path.gain, path.delay, path.doppler_total());
}

inline cvec apply_radar_path(const cvec& v, const RadarPath& path) {
    return apply_td_path(v, path.reflect, path.delay2, path.doppler2);
}

/// TD received vector for one user from the stacked TDS transmit vector s,
/// plus complex AWGN with per-sample variance noise_psd. On-grid scenarios use
/// the single-antenna coupling per path; free-angle scenarios evaluate the
/// full angular-domain sum.
cvec apply_comm_channel(const Scenario& sc, int user, const cvec& s, double noise_psd,
                        Rng& rng);

/// De-spread TDA radar return for the whole scenario (all users' echoes), with
/// noise of per-sample variance noise_psd on every antenna partition.
cvec apply_radar_channel(const Scenario& sc, const cvec& s, double noise_psd, Rng& rng);

} // namespace ssotfs
