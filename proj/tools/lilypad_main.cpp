#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lilypad/cli_run.hpp"
#include "lilypad/io.hpp"

namespace {

std::vector<double> parse_ladder(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string item = csv.substr(pos, comma == std::string::npos ? csv.npos
                                                                            : comma - pos);
        if (!item.empty()) out.push_back(std::stod(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lilypad: branching random walk in heavy-tailed potential"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, ladder_csv, variant;
    std::uint64_t seed = 0;
    int threads = 0;
    double T = 0.0, alpha = 0.0, R = 0.0, t_end = 0.0;
    int d = 0;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads for replicate fan-out");
    app.add_option("--T-ladder", ladder_csv, "comma-separated T values to batch over");
    app.add_option("--T", T, "time horizon parameter T");
    app.add_option("--alpha", alpha, "Pareto tail exponent");
    app.add_option("--d", d, "lattice dimension");
    app.add_option("--R", R, "macro window radius");
    app.add_option("--t-end", t_end, "macro end time");

    const std::vector<std::string> modes = {"gen-env", "lilypad", "pam-lilypad", "simulate",
                                            "pam",     "compare", "scenario",    "frames"};
    for (const auto& mode : modes) {
        CLI::App* sub = app.add_subcommand(mode);
        sub->fallthrough();
        if (mode == "scenario")
            sub->add_option("--variant", variant, "scenario variant: S1, S2 or S3");
        if (mode == "compare") sub->add_flag("--self", "self-consistency harness");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        lilypad::RunConfig cfg;
        if (!config_path.empty()) cfg = lilypad::parse_config_file(config_path);

        for (CLI::App* sub : app.get_subcommands()) {
            cfg.mode = sub->get_name();
            if (cfg.mode == "scenario" && !variant.empty()) cfg.variant = variant;
            if (cfg.mode == "compare" && sub->count("--self") > 0) cfg.compare_self = true;
        }
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--out")) cfg.out_dir = out_dir;
        if (app.count("--T-ladder")) cfg.T_ladder = parse_ladder(ladder_csv);
        if (app.count("--T")) cfg.T = T;
        if (app.count("--alpha")) cfg.alpha = alpha;
        if (app.count("--d")) cfg.d = d;
        if (app.count("--R")) cfg.R = R;
        if (app.count("--t-end")) cfg.t_end = t_end;

        if (app.count("--threads")) {
            cfg.threads = threads;
        } else if (const char* env_threads = std::getenv("LILYPAD_THREADS")) {
            cfg.threads = std::max(1, std::atoi(env_threads));
        }

        return lilypad::run_cli(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error invalid-argument: " << e.what() << '\n';
        return 2;
    }
}
