#include "lilypad/environment.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lilypad/rng.hpp"

namespace lilypad {

namespace {

void write_double(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

std::string expect_key(std::istream& in, const std::string& key) {
    std::string k, v;
    if (!(in >> k >> v) || k != key)
        throw std::runtime_error("environment load: expected header line '" + key + "'");
    return v;
}

}  // namespace

Environment::Environment(const ScalingConstants& s, double R, std::uint64_t seed)
    : scaling_(s), R_(R), seed_(seed), window_(s.d, R * s.rT) {
    if (!(R * s.rT >= 1.0))
        throw std::invalid_argument("Environment: window radius R*r(T) must be >= 1");
    xi_.assign(window_.size(), 1.0);
}

Environment Environment::sample(const ScalingConstants& scaling, double R, std::uint64_t seed) {
    Environment env(scaling, R, seed);
    Rng rng(derive_stream(seed, 0));
    for (std::int32_t z = 0; z < env.window_.size(); ++z)
        env.xi_[z] = pareto_from_uniform(rng.uniform01(), scaling.alpha);
    env.xiT_.resize(env.xi_.size());
    for (std::size_t i = 0; i < env.xi_.size(); ++i) env.xiT_[i] = env.xi_[i] / scaling.aT;
    return env;
}

Environment Environment::with_potential(
    const ScalingConstants& scaling, double R,
    const std::vector<std::pair<std::vector<std::int64_t>, double>>& rescaled) {
    Environment env(scaling, R, 0);
    const double floor_T = 1.0 / scaling.aT;
    for (const auto& [coords, value] : rescaled) {
        if (static_cast<int>(coords.size()) != scaling.d)
            throw std::invalid_argument("with_potential: coordinate arity mismatch");
        const std::int32_t site = env.window_.site_at(coords.data());
        if (site < 0)
            throw std::invalid_argument("with_potential: assigned site outside window");
        if (value < floor_T)
            throw std::invalid_argument("with_potential: rescaled value below floor 1/a(T)");
        env.xi_[site] = std::max(1.0, value * scaling.aT);
    }
    env.xiT_.resize(env.xi_.size());
    for (std::size_t i = 0; i < env.xi_.size(); ++i) env.xiT_[i] = env.xi_[i] / scaling.aT;
    return env;
}

double Environment::max_potential(double R_sub) const {
    if (R_sub > R_)
        throw std::invalid_argument("max_potential: sub-window exceeds sampled window");
    const double rad = R_sub * scaling_.rT;
    double best = 0.0;
    for (std::int32_t z = 0; z < window_.size(); ++z)
        if (static_cast<double>(window_.l1_micro(z)) < rad && xiT_[z] > best) best = xiT_[z];
    return best;
}

std::int64_t Environment::tail_count(double R_sub, double nu) const {
    if (R_sub > R_)
        throw std::invalid_argument("tail_count: sub-window exceeds sampled window");
    const double rad = R_sub * scaling_.rT;
    std::int64_t n = 0;
    for (std::int32_t z = 0; z < window_.size(); ++z)
        if (static_cast<double>(window_.l1_micro(z)) < rad && xiT_[z] >= nu) ++n;
    return n;
}

void Environment::save(std::ostream& out) const {
    out << "lilypad-environment 1\n";
    out << "d " << scaling_.d << "\n";
    out << "alpha ";
    write_double(out, scaling_.alpha);
    out << "\nT ";
    write_double(out, scaling_.T);
    out << "\nR ";
    write_double(out, R_);
    out << "\nseed " << seed_ << "\n";
    out << "sites " << window_.size() << "\n";
    for (std::int32_t z = 0; z < window_.size(); ++z) {
        const std::int64_t* c = window_.coords(z);
        for (int k = 0; k < scaling_.d; ++k) out << c[k] << ' ';
        write_double(out, xi_[z]);
        out << '\n';
    }
}

Environment Environment::load(std::istream& in) {
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "lilypad-environment" || version != "1")
        throw std::runtime_error("environment load: bad magic line");
    const int d = std::stoi(expect_key(in, "d"));
    const double alpha = std::strtod(expect_key(in, "alpha").c_str(), nullptr);
    const double T = std::strtod(expect_key(in, "T").c_str(), nullptr);
    const double R = std::strtod(expect_key(in, "R").c_str(), nullptr);
    const std::uint64_t seed = std::stoull(expect_key(in, "seed"));
    const std::int64_t sites = std::stoll(expect_key(in, "sites"));

    Environment env(derive_scaling(d, alpha, T), R, seed);
    if (sites != env.window_.size())
        throw std::runtime_error("environment load: site count " + std::to_string(sites) +
                                 " does not match window size " +
                                 std::to_string(env.window_.size()));
    std::vector<std::int64_t> c(d);
    for (std::int32_t z = 0; z < env.window_.size(); ++z) {
        for (int k = 0; k < d; ++k)
            if (!(in >> c[k])) throw std::runtime_error("environment load: truncated row");
        std::string xi_str;
        if (!(in >> xi_str)) throw std::runtime_error("environment load: truncated row");
        const std::int64_t* expect = env.window_.coords(z);
        for (int k = 0; k < d; ++k)
            if (c[k] != expect[k])
                throw std::runtime_error("environment load: row order mismatch at site " +
                                         std::to_string(z));
        env.xi_[z] = std::strtod(xi_str.c_str(), nullptr);
        if (!(env.xi_[z] >= 1.0))
            throw std::runtime_error("environment load: raw potential below 1");
    }
    env.xiT_.resize(env.xi_.size());
    for (std::size_t i = 0; i < env.xi_.size(); ++i)
        env.xiT_[i] = env.xi_[i] / env.scaling_.aT;
    return env;
}

}  // namespace lilypad
