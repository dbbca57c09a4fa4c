#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssotfs/channel.hpp"
#include "ssotfs/result.hpp"
#include "ssotfs/tx.hpp"
#include "ssotfs/types.hpp"

namespace ssotfs {

/// The n_range+1 modular-consecutive antenna indices centered at a_center
/// (1-based). n_range must be even and smaller than n_bs.
std::vector<int> beam_tracking_set(int a_center, int n_range, int n_bs);

/// Spatial de-spreading (F kron I_MN): inverse of spatial_spread.
cvec despread(const cvec& r_stacked, int mn, int n_bs);

/// Per-antenna-partition trace estimates averaged over observed frames:
/// mean of |z_k|^2 / MN. For unit-energy symbols the expectation is
/// alpha_a |h~|^2 + N0 on echo partitions and N0 elsewhere.
std::vector<double> covariance_block_traces(const std::vector<cvec>& frames, int mn,
                                            int n_bs);

struct RadarEstimate {
    std::vector<int> rx_indices;  ///< K*P selected partitions, trace-descending
    std::vector<double> aoas;     ///< principal-value AoA per detection
    std::vector<double> powers;   ///< trace minus noise-floor estimate, floored at 0
    double noise_floor = 0.0;
};

/// Picks the K*P largest-trace partitions and inverts the receive angular
/// index map. When noise_psd is not supplied the floor is estimated as the
/// median trace over the non-selected partitions.
RadarEstimate estimate_aoas(const std::vector<double>& traces, int k_users, int p_paths,
                            int n_bs, std::optional<double> noise_psd = {});

/// Max-min echo-power allocation: per-path powers inversely proportional to
/// |h~|^2 so all received echo powers are equal, with the beam-width budget
/// (sum over paths) * (n_range + 1) = alpha_total.
std::vector<double> radar_power_allocation(const std::vector<double>& h_tilde_sq,
                                           double alpha_total, int n_range);

struct MissDetectionConfig {
    FrameParams frame;
    int k_users = 4;
    int paths_per_user = 2;
    int l_max = 10;
    int k_max = 6;
    bool fractional_doppler = true;
    int n_range = 0;
    AllocationPolicy allocation = AllocationPolicy::MaxminRadar;
    std::vector<double> radar_snr_db;
    int trials_per_point = 10000;
    std::uint64_t seed = 1;
};

/// Miss-detection probability vs radar SNR. A trial is a miss when the set of
/// detected receive indices differs from the true set. Trials carry their own
/// RNG streams keyed by (seed, point, trial) so results do not depend on the
/// worker count.
ResultTable miss_detection_experiment(const MissDetectionConfig& cfg);

struct AoaDemoConfig {
    FrameParams frame;
    int k_users = 4;
    int paths_per_user = 2;
    int l_max = 10;
    int k_max = 6;
    int n_range = 0;
    AllocationPolicy allocation = AllocationPolicy::MaxminRadar;
    double radar_snr_db = 5.0;
    int frames_observed = 50;
    std::uint64_t seed = 1;
};

/// Trace spectrum over antenna partitions for one sampled scenario; the
/// beam-tracking demo. Emits one row per antenna index.
ResultTable aoa_demo(const AoaDemoConfig& cfg);

} // namespace ssotfs
