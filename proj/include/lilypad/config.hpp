#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lilypad {

struct RunConfig {
    // model
    int d = 1;
    double alpha = 2.0;
    double T = 100.0;
    double R = 2.0;
    std::uint64_t seed = 1;
    std::string env_file;  // load a saved environment instead of sampling

    // run
    std::string mode = "lilypad";  // gen-env lilypad pam-lilypad simulate pam
                                   // compare scenario frames
    std::string out_dir = "out";
    int threads = 1;
    std::vector<double> T_ladder;  // nonempty: repeat the run for each T

    // simulate
    double t_end = 1.0;
    std::vector<double> snapshot_times;  // empty: {t_end}
    int replicates = 1;
    std::uint64_t max_population = 10'000'000;
    std::uint64_t max_events = 500'000'000;

    // pam
    int pam_grid = 32;
    double pam_tol = 1e-10;

    // compare
    double hit_radius = 0.0;  // 0: use R
    bool compare_self = false;

    // scenario
    std::string variant = "S1";
    double scen_t = 1.0;
    double scen_kappa = 0.5;
    double scen_r = 0.1;
    double scen_eta = 2.0;
    double scen_R = 4.5;
    double scen_window = 0.0;  // 0: variant default

    // frames
    double frame_stride = 0.0;  // 0: t_end / 8

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);
void serialize_config(std::ostream& os, const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

// Stable hash of the canonical serialization, for manifests. out_dir and
// threads are masked out first: where artifacts land and how many workers
// produced them never changes what they contain.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace lilypad
