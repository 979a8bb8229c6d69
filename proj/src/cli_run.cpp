#include "lilypad/cli_run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lilypad/analysis.hpp"
#include "lilypad/io.hpp"

namespace lilypad {

namespace {

namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::ofstream open_artifact(const fs::path& dir, const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write artifact: " + (dir / name).string());
    return f;
}

std::string coords_string(const Window& w, std::int32_t site) {
    std::string s;
    const std::int64_t* c = w.coords(site);
    for (int k = 0; k < w.dim(); ++k) {
        if (k) s += ',';
        s += std::to_string(c[k]);
    }
    return s;
}

Manifest base_manifest(const RunConfig& cfg, const ScalingConstants& sc) {
    Manifest m;
    m.add("version", "0.1.0");
    m.add("config_hash", hex64(config_hash(cfg)));
    m.add("mode", cfg.mode);
    m.add("d", sc.d);
    m.add("alpha", sc.alpha);
    m.add("T", sc.T);
    m.add("seed", cfg.seed);
    m.add("q", sc.q);
    m.add("aT", sc.aT);
    m.add("rT", sc.rT);
    m.add("muT", sc.muT);
    m.add("epsT", sc.epsT);
    return m;
}

std::shared_ptr<const Environment> make_env(const RunConfig& cfg, const ScalingConstants& sc) {
    if (!cfg.env_file.empty()) {
        std::ifstream f(cfg.env_file, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open env_file: " + cfg.env_file);
        return std::make_shared<const Environment>(Environment::load(f));
    }
    return std::make_shared<const Environment>(Environment::sample(sc, cfg.R, cfg.seed));
}

void save_env(const fs::path& dir, const Environment& env, Manifest& m) {
    auto f = open_artifact(dir, "env.txt");
    env.save(f);
    m.add("artifact", "env.txt");
    m.add("sites", static_cast<std::int64_t>(env.window().size()));
}

std::vector<double> snapshot_times_of(const RunConfig& cfg) {
    std::vector<double> times = cfg.snapshot_times;
    if (times.empty()) times.push_back(cfg.t_end);
    for (double t : times)
        if (!(t >= 0.0) || t > cfg.t_end)
            throw std::invalid_argument("snapshot times must lie in [0, t_end]");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("snapshot times must be ascending");
    return times;
}

SimulationCaps caps_of(const RunConfig& cfg) {
    SimulationCaps caps;
    caps.max_population = cfg.max_population;
    caps.max_events = cfg.max_events;
    return caps;
}

std::vector<BRWRecord> run_replicates(const std::shared_ptr<const Environment>& env,
                                      const RunConfig& cfg,
                                      const std::vector<double>& times) {
    const int n = cfg.replicates;
    if (n < 1) throw std::invalid_argument("replicates must be >= 1");
    std::vector<BRWRecord> records(n);
    const int workers = std::max(1, std::min(cfg.threads, n));
    std::mutex err_mutex;
    std::string first_error;

    const auto work = [&](int w) {
        for (int rep = w; rep < n; rep += workers) {
            try {
                records[rep] = simulate(env, cfg.t_end, times, cfg.seed,
                                        static_cast<std::uint64_t>(rep), caps_of(cfg));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);
    return records;
}

BRWRecord synthetic_from_field(const std::shared_ptr<const Environment>& env,
                               const LilypadField& field, const std::vector<double>& times,
                               double t_end) {
    const auto& sc = env->scaling();
    const Window& w = env->window();
    std::vector<Snapshot> snaps;
    snaps.reserve(times.size());
    for (double t : times) {
        Snapshot s;
        s.time_macro = t;
        s.time_micro = t * sc.T;
        const MassField m = mass_field(field, t, EnvelopeMode::sweep);
        s.counts.resize(w.size());
        for (std::int32_t z = 0; z < w.size(); ++z)
            s.counts[z] = std::exp(sc.aT * sc.T * m.value(z));
        s.origin_residents = s.counts[w.origin()];
        snaps.push_back(std::move(s));
    }
    std::vector<double> first_hit(w.size(), kInf);
    const double horizon = t_end * sc.T;
    for (std::int32_t z = 0; z < w.size(); ++z) {
        const double hit = field.h(z) * sc.T;
        if (hit <= horizon) first_hit[z] = hit;
    }
    return synthetic_record(env, std::move(snaps), std::move(first_hit));
}

void write_report(std::ostream& os, const ComparisonReport& rep, const Window& w) {
    os << "lilypad-compare 1\n";
    os << "sup_mass_dev = " << g17(rep.sup_mass_dev) << '\n';
    os << "sup_hit_dev = " << g17(rep.sup_hit_dev) << '\n';
    os << "hit_status_mismatch = " << rep.hit_status_mismatch << '\n';
    os << "hit_radius = " << g17(rep.hit_radius) << '\n';
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        os << "hausdorff_t" << i << " = " << g17(rep.times[i]) << ' '
           << g17(rep.hausdorff[i]) << '\n';
    os << "brw_argmax = " << coords_string(w, rep.brw_argmax) << '\n';
    os << "lily_argmax = " << coords_string(w, rep.lily_argmax) << '\n';
    os << "argmax_separation = " << g17(rep.argmax_separation) << '\n';
    os << "intermittency = " << g17(rep.intermittency) << '\n';
    os << "certificate = " << g17(rep.certificate) << '\n';
    os << "truncated = " << (rep.truncated ? 1 : 0) << '\n';
    os << "leaked = " << g17(rep.leaked) << '\n';
}

int run_gen_env(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    const auto env = make_env(cfg, sc);
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);
    m.add("max_potential", env->max_potential(env->window_radius()));
    auto f = open_artifact(dir, "manifest.txt");
    m.write(f);
    return 0;
}

int run_lilypad(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    const auto env = make_env(cfg, sc);
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);

    const LilypadField field = solve_hitting_times(env);
    const MassField mass = mass_field(field, cfg.t_end, EnvelopeMode::sweep);
    {
        auto f = open_artifact(dir, "hitting.csv");
        write_field_table(f, *env, {"xi_T", "h", "m"},
                          {&env->xiT_all(), &field.h_all(), &mass.values()});
    }
    m.add("artifact", "hitting.csv");
    m.add("t_end", cfg.t_end);
    m.add("certificate", exactness_certificate(field, env->window_radius()));
    m.add("mass_argmax", coords_string(env->window(), maximizer(mass)));
    auto f = open_artifact(dir, "manifest.txt");
    m.write(f);
    return 0;
}

int run_pam_lilypad(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    const auto env = make_env(cfg, sc);
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);

    const LilypadField field = pam_tau(env);
    const MassField lambda = pam_lambda(env, cfg.t_end, EnvelopeMode::sweep);
    {
        auto f = open_artifact(dir, "pam_hitting.csv");
        write_field_table(f, *env, {"xi_T", "tau", "lambda"},
                          {&env->xiT_all(), &field.h_all(), &lambda.values()});
    }
    m.add("artifact", "pam_hitting.csv");
    m.add("t_end", cfg.t_end);
    m.add("lambda_argmax", coords_string(env->window(), maximizer(lambda)));
    auto f = open_artifact(dir, "manifest.txt");
    m.write(f);
    return 0;
}

int run_simulate(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    const auto env = make_env(cfg, sc);
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);
    const std::vector<double> times = snapshot_times_of(cfg);
    const std::vector<BRWRecord> records = run_replicates(env, cfg, times);

    {
        auto f = open_artifact(dir, "replicates.csv");
        f << "# rep events final_total origin_residents leaked truncated\n";
        for (std::size_t rep = 0; rep < records.size(); ++rep) {
            const Snapshot& last = records[rep].snapshots().back();
            double total = 0.0;
            for (double c : last.counts) total += c;
            f << rep << ' ' << records[rep].events() << ' ' << g17(total) << ' '
              << g17(last.origin_residents) << ' ' << g17(records[rep].leaked()) << ' '
              << (records[rep].truncated() ? 1 : 0) << '\n';
        }
    }
    m.add("artifact", "replicates.csv");

    // ensemble mean counts per snapshot, accumulated in replicate order
    const Window& w = env->window();
    std::vector<std::vector<double>> mean(times.size(),
                                          std::vector<double>(w.size(), 0.0));
    for (const auto& rec : records)
        for (std::size_t i = 0; i < times.size(); ++i) {
            const Snapshot& s = rec.snapshot_at(times[i]);
            for (std::int32_t z = 0; z < w.size(); ++z) mean[i][z] += s.counts[z];
        }
    for (auto& row : mean)
        for (double& v : row) v /= static_cast<double>(records.size());
    {
        std::vector<std::string> names;
        std::vector<const std::vector<double>*> cols;
        for (std::size_t i = 0; i < times.size(); ++i) {
            names.push_back("mean_n_t" + std::to_string(i));
            cols.push_back(&mean[i]);
        }
        auto f = open_artifact(dir, "counts.csv");
        write_field_table(f, *env, names, cols);
    }
    m.add("artifact", "counts.csv");

    std::vector<std::vector<double>> resc;
    resc.reserve(times.size());
    for (double t : times) resc.push_back(rescaled_counts(records[0], t));
    {
        std::vector<std::string> names;
        std::vector<const std::vector<double>*> cols;
        for (std::size_t i = 0; i < times.size(); ++i) {
            names.push_back("M_t" + std::to_string(i));
            cols.push_back(&resc[i]);
        }
        auto f = open_artifact(dir, "rescaled.csv");
        write_field_table(f, *env, names, cols);
    }
    m.add("artifact", "rescaled.csv");

    bool any_trunc = false;
    std::uint64_t total_events = 0;
    for (const auto& rec : records) {
        any_trunc = any_trunc || rec.truncated();
        total_events += rec.events();
    }
    m.add("replicates", cfg.replicates);
    m.add("events", total_events);
    m.add("truncated", any_trunc);
    auto f = open_artifact(dir, "manifest.txt");
    m.write(f);
    return 0;
}

int run_pam(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    const auto env = make_env(cfg, sc);
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);

    PamOptions opts;
    opts.tol = cfg.pam_tol;
    const PamField field = solve_pam(env, cfg.t_end, cfg.pam_grid, opts);
    const std::vector<double>& logu = field.logu(field.grid_micro().size() - 1);
    const std::vector<double> growth = field.growth(cfg.t_end);
    const std::vector<double> hitting = field.hitting();
    {
        auto f = open_artifact(dir, "pam.csv");
        write_field_table(f, *env, {"xi_T", "logu", "Lambda", "scriptT"},
                          {&env->xiT_all(), &logu, &growth, &hitting});
    }
    m.add("artifact", "pam.csv");
    m.add("t_end", cfg.t_end);
    m.add("pam_grid", cfg.pam_grid);
    m.add("pam_tol", cfg.pam_tol);
    m.add("steps_accepted", field.stats().accepted);
    m.add("steps_rejected", field.stats().rejected);
    m.add("min_step", field.stats().min_step);
    m.add("log_leak_final", field.log_leak(field.grid_micro().size() - 1));
    auto f = open_artifact(dir, "manifest.txt");
    m.write(f);
    return 0;
}

int run_compare(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    const auto env = make_env(cfg, sc);
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);
    const std::vector<double> times = snapshot_times_of(cfg);
    const double hit_radius = cfg.hit_radius > 0.0 ? cfg.hit_radius : cfg.R;

    const LilypadField field = solve_hitting_times(env);
    const BRWRecord record =
        cfg.compare_self
            ? synthetic_from_field(env, field, times, cfg.t_end)
            : simulate(env, cfg.t_end, times, cfg.seed, 0, caps_of(cfg));
    const ComparisonReport rep = compare(record, field, times, hit_radius);

    {
        auto f = open_artifact(dir, "report.txt");
        write_report(f, rep, env->window());
    }
    m.add("artifact", "report.txt");
    {
        auto f = open_artifact(dir, "report_times.csv");
        f << "# t hausdorff\n";
        for (std::size_t i = 0; i < rep.times.size(); ++i)
            f << g17(rep.times[i]) << ' ' << g17(rep.hausdorff[i]) << '\n';
    }
    m.add("artifact", "report_times.csv");
    m.add("self_consistency", cfg.compare_self);
    m.add("sup_mass_dev", rep.sup_mass_dev);
    m.add("sup_hit_dev", rep.sup_hit_dev);
    m.add("certificate", rep.certificate);
    m.add("truncated", rep.truncated);
    auto f = open_artifact(dir, "manifest.txt");
    m.write(f);
    return 0;
}

ScenarioVariant variant_of(const std::string& name) {
    if (name == "S1") return ScenarioVariant::S1;
    if (name == "S2") return ScenarioVariant::S2;
    if (name == "S3") return ScenarioVariant::S3;
    throw std::invalid_argument("unknown scenario variant: " + name);
}

int run_scenario(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    ScenarioSpec spec;
    spec.variant = variant_of(cfg.variant);
    spec.t = cfg.scen_t;
    spec.kappa = cfg.scen_kappa;
    spec.r = cfg.scen_r;
    spec.eta = cfg.scen_eta;
    spec.R = cfg.scen_R;
    spec.window_radius = cfg.scen_window;

    const auto env = std::make_shared<const Environment>(build_scenario(spec, sc));
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);
    const ScenarioCheck check = check_scenario(*env, spec);

    const LilypadField hfield = solve_hitting_times(env);
    const LilypadField tfield = pam_tau(env);
    const SupportSet brw_sup = support_from_field(hfield, spec.t);
    const SupportSet pam_sup = support_from_field(tfield, spec.t);
    const int brw_comps = brw_sup.sites.empty() ? 0 : connected_components(brw_sup);
    const int pam_comps = pam_sup.sites.empty() ? 0 : connected_components(pam_sup);
    const MassField mass = mass_field(hfield, spec.t, EnvelopeMode::sweep);
    const MassField lambda = pam_lambda(env, spec.t, EnvelopeMode::sweep);
    const std::int32_t m_arg = maximizer(mass);
    const std::int32_t l_arg = maximizer(lambda);
    const auto [e1, e2] = error_terms(spec.t, spec.R, sc);

    {
        auto f = open_artifact(dir, "scenario.txt");
        f << "lilypad-scenario 1\n";
        f << "variant = " << cfg.variant << '\n';
        f << "setup = " << check.setup << '\n';
        f << "A = " << check.A << '\n';
        f << "B = " << check.B << '\n';
        f << "C = " << check.C << '\n';
        f << "S = " << check.S << '\n';
        f << "ok = " << check.ok << '\n';
        if (!check.detail.empty()) f << "detail = " << check.detail << '\n';
        f << "x = ";
        const auto xc = scenario_x(spec, sc);
        for (std::size_t k = 0; k < xc.size(); ++k) f << (k ? "," : "") << xc[k];
        f << '\n';
        if (spec.variant != ScenarioVariant::S1) {
            f << "xprime = ";
            const auto xpc = scenario_xprime(spec, sc);
            for (std::size_t k = 0; k < xpc.size(); ++k) f << (k ? "," : "") << xpc[k];
            f << '\n';
        }
        f << "m_argmax = " << coords_string(env->window(), m_arg) << '\n';
        f << "lambda_argmax = " << coords_string(env->window(), l_arg) << '\n';
        f << "argmax_separation = "
          << g17(static_cast<double>(env->window().l1_micro(m_arg, l_arg)) / sc.rT) << '\n';
        f << "brw_components = " << brw_comps << '\n';
        f << "pam_components = " << pam_comps << '\n';
        f << "log_jump_tail = " << g17(log_jump_tail(spec.t, spec.R, sc)) << '\n';
        f << "E1 = " << g17(e1) << '\n';
        f << "E2 = " << g17(e2) << '\n';
    }
    m.add("artifact", "scenario.txt");
    m.add("variant", cfg.variant);
    m.add("scenario_ok", check.ok);
    m.add("brw_components", brw_comps);
    m.add("pam_components", pam_comps);
    {
        auto f = open_artifact(dir, "manifest.txt");
        m.write(f);
    }
    if (!check.ok) {
        std::cerr << "error scenario-check: " << check.detail << '\n';
        return 4;
    }
    return 0;
}

int run_frames(const RunConfig& cfg, const fs::path& dir) {
    const ScalingConstants sc = derive_scaling(cfg.d, cfg.alpha, cfg.T);
    if (sc.d > 2) throw std::invalid_argument("frames mode requires d <= 2");
    const auto env = make_env(cfg, sc);
    Manifest m = base_manifest(cfg, sc);
    save_env(dir, *env, m);

    const LilypadField field = solve_hitting_times(env);
    const double stride = cfg.frame_stride > 0.0 ? cfg.frame_stride : cfg.t_end / 8.0;
    if (!(stride > 0.0)) throw std::invalid_argument("frame stride must be positive");

    {
        const double top = env->max_potential(env->window_radius());
        const PgmImage img = render_frame(*env, env->xiT_all(), 0.0, std::max(top, 1e-300));
        auto f = open_artifact(dir, "potential.pgm");
        write_pgm(f, img, {"potential xi_T", "lo=0 hi=" + g17(std::max(top, 1e-300))});
    }
    m.add("artifact", "potential.pgm");

    int idx = 0;
    const Window& w = env->window();
    for (double t = 0.0; t <= cfg.t_end * (1.0 + 1e-12); t += stride, ++idx) {
        std::vector<double> age(w.size(), 0.0);
        for (std::int32_t z = 0; z < w.size(); ++z)
            age[z] = std::max(0.0, t - field.h(z));
        const PgmImage img = render_frame(*env, age, 0.0, cfg.t_end);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.pgm", idx);
        auto f = open_artifact(dir, name);
        write_pgm(f, img,
                  {"settled age (t - h)_+ at t=" + g17(t), "lo=0 hi=" + g17(cfg.t_end)});
        m.add("artifact", name);
    }
    m.add("frames", idx);
    m.add("frame_stride", stride);
    auto f = open_artifact(dir, "manifest.txt");
    m.write(f);
    return 0;
}

int run_single(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    if (cfg.mode == "gen-env") return run_gen_env(cfg, dir);
    if (cfg.mode == "lilypad") return run_lilypad(cfg, dir);
    if (cfg.mode == "pam-lilypad") return run_pam_lilypad(cfg, dir);
    if (cfg.mode == "simulate") return run_simulate(cfg, dir);
    if (cfg.mode == "pam") return run_pam(cfg, dir);
    if (cfg.mode == "compare") return run_compare(cfg, dir);
    if (cfg.mode == "scenario") return run_scenario(cfg, dir);
    if (cfg.mode == "frames") return run_frames(cfg, dir);
    throw std::invalid_argument("unknown mode: " + cfg.mode);
}

}  // namespace

int run_cli(const RunConfig& cfg) {
    try {
        if (cfg.T_ladder.empty()) return run_single(cfg);

        const fs::path dir(cfg.out_dir);
        fs::create_directories(dir);
        int status = 0;
        Manifest m;
        m.add("version", "0.1.0");
        m.add("config_hash", hex64(config_hash(cfg)));
        m.add("mode", cfg.mode);
        for (double T : cfg.T_ladder) {
            RunConfig sub = cfg;
            sub.T = T;
            sub.T_ladder.clear();
            sub.out_dir = (dir / ("T_" + g17(T))).string();
            status = std::max(status, run_single(sub));
            m.add("run", "T_" + g17(T));
        }
        auto f = open_artifact(dir, "manifest.txt");
        m.write(f);
        return status;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error invalid-argument: " << e.what() << '\n';
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "error internal: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error runtime: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace lilypad
