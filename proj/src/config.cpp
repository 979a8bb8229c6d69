#include "lilypad/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lilypad/io.hpp"
#include "lilypad/rng.hpp"

namespace lilypad {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += g17(v[i]);
    }
    return out;
}

}  // namespace

RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "d") cfg.d = std::stoi(val);
        else if (key == "alpha") cfg.alpha = std::stod(val);
        else if (key == "T") cfg.T = std::stod(val);
        else if (key == "R") cfg.R = std::stod(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "env_file") cfg.env_file = val;
        else if (key == "mode") cfg.mode = val;
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "threads") cfg.threads = std::stoi(val);
        else if (key == "T_ladder") cfg.T_ladder = parse_list(val);
        else if (key == "t_end") cfg.t_end = std::stod(val);
        else if (key == "snapshot_times") cfg.snapshot_times = parse_list(val);
        else if (key == "replicates") cfg.replicates = std::stoi(val);
        else if (key == "max_population") cfg.max_population = std::stoull(val);
        else if (key == "max_events") cfg.max_events = std::stoull(val);
        else if (key == "pam_grid") cfg.pam_grid = std::stoi(val);
        else if (key == "pam_tol") cfg.pam_tol = std::stod(val);
        else if (key == "hit_radius") cfg.hit_radius = std::stod(val);
        else if (key == "compare_self") cfg.compare_self = val == "1" || val == "true";
        else if (key == "variant") cfg.variant = val;
        else if (key == "scen_t") cfg.scen_t = std::stod(val);
        else if (key == "scen_kappa") cfg.scen_kappa = std::stod(val);
        else if (key == "scen_r") cfg.scen_r = std::stod(val);
        else if (key == "scen_eta") cfg.scen_eta = std::stod(val);
        else if (key == "scen_R") cfg.scen_R = std::stod(val);
        else if (key == "scen_window") cfg.scen_window = std::stod(val);
        else if (key == "frame_stride") cfg.frame_stride = std::stod(val);
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    return parse_config(f);
}

void serialize_config(std::ostream& os, const RunConfig& cfg) {
    os << "[model]\n";
    os << "d = " << cfg.d << '\n';
    os << "alpha = " << g17(cfg.alpha) << '\n';
    os << "T = " << g17(cfg.T) << '\n';
    os << "R = " << g17(cfg.R) << '\n';
    os << "seed = " << cfg.seed << '\n';
    if (!cfg.env_file.empty()) os << "env_file = " << cfg.env_file << '\n';
    os << "[run]\n";
    os << "mode = " << cfg.mode << '\n';
    os << "out_dir = " << cfg.out_dir << '\n';
    os << "threads = " << cfg.threads << '\n';
    if (!cfg.T_ladder.empty()) os << "T_ladder = " << join_list(cfg.T_ladder) << '\n';
    os << "[simulate]\n";
    os << "t_end = " << g17(cfg.t_end) << '\n';
    if (!cfg.snapshot_times.empty())
        os << "snapshot_times = " << join_list(cfg.snapshot_times) << '\n';
    os << "replicates = " << cfg.replicates << '\n';
    os << "max_population = " << cfg.max_population << '\n';
    os << "max_events = " << cfg.max_events << '\n';
    os << "[pam]\n";
    os << "pam_grid = " << cfg.pam_grid << '\n';
    os << "pam_tol = " << g17(cfg.pam_tol) << '\n';
    os << "[compare]\n";
    os << "hit_radius = " << g17(cfg.hit_radius) << '\n';
    os << "compare_self = " << (cfg.compare_self ? 1 : 0) << '\n';
    os << "[scenario]\n";
    os << "variant = " << cfg.variant << '\n';
    os << "scen_t = " << g17(cfg.scen_t) << '\n';
    os << "scen_kappa = " << g17(cfg.scen_kappa) << '\n';
    os << "scen_r = " << g17(cfg.scen_r) << '\n';
    os << "scen_eta = " << g17(cfg.scen_eta) << '\n';
    os << "scen_R = " << g17(cfg.scen_R) << '\n';
    os << "scen_window = " << g17(cfg.scen_window) << '\n';
    os << "[frames]\n";
    os << "frame_stride = " << g17(cfg.frame_stride) << '\n';
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream ss;
    serialize_config(ss, cfg);
    return ss.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    RunConfig masked = cfg;
    masked.out_dir = "";
    masked.threads = 1;
    const std::string s = serialize_config(masked);
    return fnv1a64(s.data(), s.size());
}

}  // namespace lilypad
