#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssotfs/analysis.hpp"
#include "ssotfs/comm.hpp"
#include "ssotfs/radar.hpp"
#include "ssotfs/result.hpp"

namespace ssotfs {

enum class ExperimentKind { AoaDemo, MissDetection, Fer, DetEval };

/// Validated experiment description. Fields not used by a kind keep their
/// defaults; parse_config rejects unknown keys and missing seeds.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Fer;
    FrameParams frame;
    int k_users = 4;
    int paths_per_user = 2;
    int l_max = 10;
    int k_max = 6;
    bool fractional_doppler = false;
    Constellation constellation = Constellation::Bpsk;
    bool coded = true;
    bool precoded = true;
    VirtualIndexPolicy virtual_policy = VirtualIndexPolicy::Random;
    AllocationPolicy allocation = AllocationPolicy::Equal;
    int n_range = 0;
    std::vector<double> snr_db;
    int trials = 0; ///< 0 = kind default
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::optional<int> threads;
    int mp_iterations = 30;
    double mp_damping = 0.6;
    // det-eval specifics
    std::vector<int> det_p_values = {3, 4, 5};
    std::vector<int> det_pattern_repeats = {1, 2};
    double det_min_doppler_separation = 0.2;
    // aoa-demo specifics
    int frames_observed = 50;

    std::string kind_name() const;
};

/// Parses and validates a JSON config document. Unknown keys are rejected;
/// validation errors name the offending field.
ExperimentConfig parse_config(const std::string& text);

/// Stable 64-bit hash of the config document used in result metadata.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Dispatches to the experiment implementations and stamps the table with
/// config hash, seed and build id. Honors cfg.threads.
ResultTable run_experiment(const ExperimentConfig& cfg);

/// JSON metadata sidecar mirroring the CSV '#' header.
std::string metadata_json(const ResultTable& table);

inline constexpr const char* kBuildId = "ssotfs 1.0.0";

} // namespace ssotfs
