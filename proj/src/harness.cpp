#include "ssotfs/harness.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <stdexcept>

namespace ssotfs {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& scope) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown config key '" + scope + it.key() + "'");
    }
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "aoa-demo") return ExperimentKind::AoaDemo;
    if (s == "miss-detection") return ExperimentKind::MissDetection;
    if (s == "fer") return ExperimentKind::Fer;
    if (s == "det-eval") return ExperimentKind::DetEval;
    fail("kind", "expected aoa-demo | miss-detection | fer | det-eval, got '" + s + "'");
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(key, "wrong type");
    }
}

} // namespace

std::string ExperimentConfig::kind_name() const {
    switch (kind) {
        case ExperimentKind::AoaDemo: return "aoa-demo";
        case ExperimentKind::MissDetection: return "miss-detection";
        case ExperimentKind::Fer: return "fer";
        case ExperimentKind::DetEval: return "det-eval";
    }
    return "?";
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    reject_unknown(doc,
                   {"kind", "seed", "frame", "k_users", "paths_per_user", "l_max", "k_max",
                    "fractional_doppler", "constellation", "coded", "precoded",
                    "virtual_policy", "power_allocation", "n_range", "snr_db", "trials",
                    "threads", "mp_iterations", "mp_damping", "det_eval", "frames_observed"},
                   "");

    ExperimentConfig cfg;
    if (!doc.contains("kind")) fail("kind", "missing");
    cfg.kind = parse_kind(doc.at("kind").get<std::string>());

    if (!doc.contains("seed")) fail("seed", "missing (reproducibility is mandatory)");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.has_seed = true;

    if (doc.contains("frame")) {
        const json& f = doc.at("frame");
        reject_unknown(f, {"m", "n", "n_bs", "delta_f", "slot_t", "alpha_total"}, "frame.");
        cfg.frame.m = get_or(f, "m", cfg.frame.m);
        cfg.frame.n = get_or(f, "n", cfg.frame.n);
        cfg.frame.n_bs = get_or(f, "n_bs", cfg.frame.n_bs);
        cfg.frame.delta_f = get_or(f, "delta_f", cfg.frame.delta_f);
        cfg.frame.slot_t = get_or(f, "slot_t", cfg.frame.slot_t);
        cfg.frame.alpha_total = get_or(f, "alpha_total", cfg.frame.alpha_total);
    }
    try {
        cfg.frame.validate();
    } catch (const std::invalid_argument& e) {
        fail("frame", e.what());
    }

    cfg.k_users = get_or(doc, "k_users", cfg.k_users);
    cfg.paths_per_user = get_or(doc, "paths_per_user", cfg.paths_per_user);
    if (cfg.k_users < 1) fail("k_users", "must be positive");
    if (cfg.paths_per_user < 1) fail("paths_per_user", "must be positive");

    cfg.l_max = get_or(doc, "l_max", std::min(cfg.l_max, cfg.frame.m - 1));
    cfg.k_max = get_or(doc, "k_max", std::min(cfg.k_max, cfg.frame.n - 1));
    if (cfg.l_max < 0 || cfg.l_max > cfg.frame.m - 1) fail("l_max", "outside 0..M-1");
    if (cfg.k_max < 0 || cfg.k_max > cfg.frame.n - 1) fail("k_max", "outside 0..N-1");

    cfg.fractional_doppler = get_or(doc, "fractional_doppler", cfg.fractional_doppler);

    if (doc.contains("constellation")) {
        const std::string c = doc.at("constellation").get<std::string>();
        if (c == "bpsk")
            cfg.constellation = Constellation::Bpsk;
        else if (c == "qpsk")
            cfg.constellation = Constellation::Qpsk;
        else
            fail("constellation", "expected bpsk | qpsk");
    }

    cfg.coded = get_or(doc, "coded", cfg.coded);
    cfg.precoded = get_or(doc, "precoded", cfg.precoded);

    if (doc.contains("virtual_policy")) {
        const std::string v = doc.at("virtual_policy").get<std::string>();
        if (v == "distinct")
            cfg.virtual_policy = VirtualIndexPolicy::Distinct;
        else if (v == "zero")
            cfg.virtual_policy = VirtualIndexPolicy::Zero;
        else if (v == "random")
            cfg.virtual_policy = VirtualIndexPolicy::Random;
        else
            fail("virtual_policy", "expected distinct | zero | random");
    }

    if (doc.contains("power_allocation")) {
        const std::string v = doc.at("power_allocation").get<std::string>();
        if (v == "equal")
            cfg.allocation = AllocationPolicy::Equal;
        else if (v == "maxmin-radar")
            cfg.allocation = AllocationPolicy::MaxminRadar;
        else
            fail("power_allocation", "expected equal | maxmin-radar");
    }

    cfg.n_range = get_or(doc, "n_range", cfg.n_range);
    if (cfg.n_range < 0 || cfg.n_range % 2 != 0) fail("n_range", "must be even and >= 0");

    if (doc.contains("snr_db")) {
        cfg.snr_db = doc.at("snr_db").get<std::vector<double>>();
        for (std::size_t i = 1; i < cfg.snr_db.size(); ++i)
            if (cfg.snr_db[i] <= cfg.snr_db[i - 1])
                fail("snr_db", "grid must be strictly increasing");
    }

    cfg.trials = get_or(doc, "trials", cfg.trials);
    if (cfg.trials < 0) fail("trials", "must be nonnegative");
    if (doc.contains("threads")) {
        cfg.threads = doc.at("threads").get<int>();
        if (*cfg.threads < 1) fail("threads", "must be positive");
    }
    cfg.mp_iterations = get_or(doc, "mp_iterations", cfg.mp_iterations);
    if (cfg.mp_iterations < 1) fail("mp_iterations", "must be positive");
    cfg.mp_damping = get_or(doc, "mp_damping", cfg.mp_damping);
    if (cfg.mp_damping <= 0.0 || cfg.mp_damping > 1.0) fail("mp_damping", "must be in (0, 1]");

    if (doc.contains("det_eval")) {
        const json& d = doc.at("det_eval");
        reject_unknown(d, {"p_values", "pattern_repeats", "min_doppler_separation"},
                       "det_eval.");
        cfg.det_p_values = get_or(d, "p_values", cfg.det_p_values);
        cfg.det_pattern_repeats = get_or(d, "pattern_repeats", cfg.det_pattern_repeats);
        cfg.det_min_doppler_separation =
            get_or(d, "min_doppler_separation", cfg.det_min_doppler_separation);
        if (cfg.det_p_values.empty()) fail("det_eval.p_values", "must be nonempty");
        if (cfg.det_pattern_repeats.empty()) fail("det_eval.pattern_repeats", "must be nonempty");
    }

    cfg.frames_observed = get_or(doc, "frames_observed", cfg.frames_observed);
    if (cfg.frames_observed < 1) fail("frames_observed", "must be positive");

    // kind-specific requirements
    switch (cfg.kind) {
        case ExperimentKind::Fer:
        case ExperimentKind::MissDetection:
            if (cfg.snr_db.empty()) fail("snr_db", "required for this experiment");
            break;
        case ExperimentKind::AoaDemo:
            if (cfg.snr_db.size() != 1)
                fail("snr_db", "aoa-demo takes exactly one radar SNR point");
            break;
        case ExperimentKind::DetEval:
            if (cfg.virtual_policy == VirtualIndexPolicy::Zero)
                fail("virtual_policy", "det-eval needs distinct virtual indices");
            break;
    }
    return cfg;
}

namespace {

ordered_json canonical_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["kind"] = cfg.kind_name();
    j["seed"] = cfg.seed;
    j["frame"] = {{"m", cfg.frame.m},
                  {"n", cfg.frame.n},
                  {"n_bs", cfg.frame.n_bs},
                  {"delta_f", cfg.frame.delta_f},
                  {"slot_t", cfg.frame.slot_t},
                  {"alpha_total", cfg.frame.alpha_total}};
    j["k_users"] = cfg.k_users;
    j["paths_per_user"] = cfg.paths_per_user;
    j["l_max"] = cfg.l_max;
    j["k_max"] = cfg.k_max;
    j["fractional_doppler"] = cfg.fractional_doppler;
    j["constellation"] = cfg.constellation == Constellation::Bpsk ? "bpsk" : "qpsk";
    j["coded"] = cfg.coded;
    j["precoded"] = cfg.precoded;
    j["virtual_policy"] = cfg.virtual_policy == VirtualIndexPolicy::Distinct ? "distinct"
                          : cfg.virtual_policy == VirtualIndexPolicy::Zero   ? "zero"
                                                                             : "random";
    j["power_allocation"] =
        cfg.allocation == AllocationPolicy::Equal ? "equal" : "maxmin-radar";
    j["n_range"] = cfg.n_range;
    j["snr_db"] = cfg.snr_db;
    j["trials"] = cfg.trials;
    j["mp_iterations"] = cfg.mp_iterations;
    j["mp_damping"] = cfg.mp_damping;
    j["det_eval"] = {{"p_values", cfg.det_p_values},
                     {"pattern_repeats", cfg.det_pattern_repeats},
                     {"min_doppler_separation", cfg.det_min_doppler_separation}};
    j["frames_observed"] = cfg.frames_observed;
    // threads deliberately excluded: worker count must not change results
    return j;
}

} // namespace

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string dump = canonical_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
    if (!cfg.has_seed) throw ConfigError("seed is required");
    if (cfg.threads) omp_set_num_threads(*cfg.threads);

    ResultTable table;
    switch (cfg.kind) {
        case ExperimentKind::MissDetection: {
            MissDetectionConfig mc;
            mc.frame = cfg.frame;
            mc.k_users = cfg.k_users;
            mc.paths_per_user = cfg.paths_per_user;
            mc.l_max = cfg.l_max;
            mc.k_max = cfg.k_max;
            mc.fractional_doppler = cfg.fractional_doppler;
            mc.n_range = cfg.n_range;
            mc.allocation = cfg.allocation;
            mc.radar_snr_db = cfg.snr_db;
            mc.trials_per_point = cfg.trials > 0 ? cfg.trials : 10000;
            mc.seed = cfg.seed;
            table = miss_detection_experiment(mc);
            break;
        }
        case ExperimentKind::Fer: {
            FerConfig fc;
            fc.frame = cfg.frame;
            fc.paths = cfg.paths_per_user;
            fc.l_max = cfg.l_max;
            fc.k_max = cfg.k_max;
            fc.fractional_doppler = cfg.fractional_doppler;
            fc.constellation = cfg.constellation;
            fc.coded = cfg.coded;
            fc.precoded = cfg.precoded;
            fc.virtual_policy = cfg.virtual_policy;
            fc.allocation = cfg.allocation;
            fc.snr_db = cfg.snr_db;
            fc.frames_per_point = cfg.trials > 0 ? cfg.trials : 1000;
            fc.mp_iterations = cfg.mp_iterations;
            fc.mp_damping = cfg.mp_damping;
            fc.seed = cfg.seed;
            table = fer_experiment(fc);
            break;
        }
        case ExperimentKind::DetEval: {
            DetEvalConfig dc;
            dc.frame = cfg.frame;
            dc.p_values = cfg.det_p_values;
            dc.l_max = cfg.l_max;
            dc.k_max = cfg.k_max;
            dc.draws = cfg.trials > 0 ? cfg.trials : 1000;
            dc.pattern_repeats = cfg.det_pattern_repeats;
            dc.min_doppler_separation = cfg.det_min_doppler_separation;
            dc.virtual_policy = cfg.virtual_policy;
            dc.seed = cfg.seed;
            table = avg_determinant_experiment(dc);
            break;
        }
        case ExperimentKind::AoaDemo: {
            AoaDemoConfig ac;
            ac.frame = cfg.frame;
            ac.k_users = cfg.k_users;
            ac.paths_per_user = cfg.paths_per_user;
            ac.l_max = cfg.l_max;
            ac.k_max = cfg.k_max;
            ac.n_range = cfg.n_range;
            ac.allocation = cfg.allocation;
            ac.radar_snr_db = cfg.snr_db.at(0);
            ac.frames_observed = cfg.frames_observed;
            ac.seed = cfg.seed;
            table = aoa_demo(ac);
            break;
        }
    }

    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    std::vector<std::pair<std::string, std::string>> meta = {
        {"kind", cfg.kind_name()},
        {"config_hash", hash},
        {"seed", std::to_string(cfg.seed)},
        {"build", kBuildId},
    };
    table.metadata.insert(table.metadata.begin(), meta.begin(), meta.end());
    return table;
}

std::string metadata_json(const ResultTable& table) {
    ordered_json j;
    for (const auto& [k, v] : table.metadata) j[k] = v;
    return j.dump(2) + "\n";
}

} // namespace ssotfs
