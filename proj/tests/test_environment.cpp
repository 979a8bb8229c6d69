#include "lilypad/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lilypad/rng.hpp"
#include "support/test_harness.hpp"

using harness::expect;
using harness::expect_eq_bits;
using harness::expect_near;
using lilypad::Environment;
using lilypad::derive_scaling;

namespace {

void test_rng_basics() {
    lilypad::Rng rng(lilypad::derive_stream(42, 0));
    lilypad::Rng rng_same(lilypad::derive_stream(42, 0));
    lilypad::Rng rng_other(lilypad::derive_stream(42, 1));
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t a = rng.next_u64();
        all_equal = all_equal && a == rng_same.next_u64();
        any_diff = any_diff || a != rng_other.next_u64();
    }
    expect(all_equal, "same stream reproduces");
    expect(any_diff, "different stream index diverges");

    lilypad::Rng u(7);
    for (int i = 0; i < 10000; ++i) {
        const double x = u.uniform01();
        if (!(x > 0.0 && x <= 1.0)) {
            expect(false, "uniform01 outside (0,1]");
            break;
        }
    }

    for (int n : {1, 2, 6}) {
        lilypad::Rng b(11);
        for (int i = 0; i < 1000; ++i) {
            const std::uint64_t v = b.below(n);
            if (v >= static_cast<std::uint64_t>(n)) {
                expect(false, "below(n) out of range");
                break;
            }
        }
    }

    lilypad::KahanSum ks;
    for (int i = 0; i < 1000000; ++i) ks.add(0.1);
    expect_near(ks.value(), 100000.0, 1e-9, "Kahan sum of 10^6 tenths");

    expect(lilypad::fnv1a64("", 0) == 0xcbf29ce484222325ULL, "fnv1a64 empty string");
    expect(lilypad::fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL, "fnv1a64 'a'");
}

void test_pareto_inverse_cdf() {
    expect_eq_bits(lilypad::pareto_from_uniform(0.25, 2.0), 2.0, "alpha=2, U=1/4 -> xi=2");
    expect_eq_bits(lilypad::pareto_from_uniform(1.0, 4.0), 1.0, "alpha=4, U=1 -> xi=1");
    expect_near(lilypad::pareto_from_uniform(1.0 / 16.0, 4.0), 2.0, 1e-15,
                "alpha=4, U=1/16 -> xi=2");
}

void test_sampling_and_determinism() {
    const auto sc = derive_scaling(1, 2.0, 50.0);
    const Environment env = Environment::sample(sc, 0.8, 123);
    const Environment env_same = Environment::sample(sc, 0.8, 123);
    const Environment env_other = Environment::sample(sc, 0.8, 124);

    expect(env.window().size() == env_same.window().size(), "same window size");
    bool all_equal = true, any_diff = false, floor_ok = true, ratio_ok = true;
    for (std::int32_t z = 0; z < env.window().size(); ++z) {
        all_equal = all_equal && env.xi(z) == env_same.xi(z);
        any_diff = any_diff || env.xi(z) != env_other.xi(z);
        floor_ok = floor_ok && env.xi(z) >= 1.0;
        ratio_ok = ratio_ok && env.xiT(z) == env.xi(z) / sc.aT;
    }
    expect(all_equal, "same seed reproduces potentials");
    expect(any_diff, "different seed changes potentials");
    expect(floor_ok, "raw potentials at or above the Pareto floor");
    expect(ratio_ok, "xi_T derived from raw xi by one division");
}

void test_empirical_tail() {
    // fraction of xi > 10 should be 10^-2 for alpha = 2
    lilypad::Rng rng(lilypad::derive_stream(2024, 0));
    const int n = 1000000;
    int over = 0;
    for (int i = 0; i < n; ++i)
        if (lilypad::pareto_from_uniform(rng.uniform01(), 2.0) > 10.0) ++over;
    const double p = 0.01;
    const double se = std::sqrt(p * (1 - p) / n);
    expect_near(static_cast<double>(over) / n, p, 3.0 * se,
                "Pareto(2) tail beyond 10 over 10^6 draws");
}

void test_ks_statistic() {
    // one-sided KS distance against F(x) = 1 - x^-alpha on 10^5 draws;
    // 1.63/sqrt(n) is the 1% critical value
    const double alpha = 2.5;
    const int n = 100000;
    std::vector<double> xs(n);
    lilypad::Rng rng(lilypad::derive_stream(777, 0));
    for (int i = 0; i < n; ++i) xs[i] = lilypad::pareto_from_uniform(rng.uniform01(), alpha);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double F = 1.0 - std::pow(xs[i], -alpha);
        ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(F - static_cast<double>(i + 1) / n));
    }
    expect(ks < 1.63 / std::sqrt(static_cast<double>(n)),
           "KS distance below the 1% critical value (got " + std::to_string(ks) + ")");
}

void test_with_potential() {
    const auto sc = derive_scaling(1, 2.0, 50.0);
    const Environment empty = Environment::with_potential(sc, 0.5, {});
    bool at_floor = true;
    for (std::int32_t z = 0; z < empty.window().size(); ++z)
        at_floor = at_floor && empty.xi(z) == 1.0 && empty.xiT(z) == 1.0 / sc.aT;
    expect(at_floor, "empty assignment leaves the floor everywhere");

    const Environment env =
        Environment::with_potential(sc, 0.5, {{{0}, 5.0}, {{3}, 2.0 / sc.aT}});
    expect_eq_bits(env.xi(env.window().origin()), 5.0 * sc.aT,
                   "assigned xi_T(0)=5 stores raw 5*aT exactly");
    expect_eq_bits(env.xiT(env.window().origin()), 5.0 * sc.aT / sc.aT,
                   "xi_T at origin recomputed from raw");

    bool threw = false;
    try {
        Environment::with_potential(sc, 0.5, {{{0}, 0.5 / sc.aT}});
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    expect(threw, "value below floor 1/aT rejected");

    threw = false;
    try {
        Environment::with_potential(sc, 0.5, {{{100000}, 5.0}});
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    expect(threw, "assignment outside window rejected");
}

void test_scan_reductions() {
    const auto sc = derive_scaling(2, 4.0, 20.0);
    const Environment env = Environment::sample(sc, 0.3, 9);
    const double R_half = 0.15;

    double brute_max = 0.0;
    std::int64_t brute_tail = 0;
    const double nu = 2.0 / sc.aT;
    for (std::int32_t z = 0; z < env.window().size(); ++z) {
        if (static_cast<double>(env.window().l1_micro(z)) >= R_half * sc.rT) continue;
        brute_max = std::max(brute_max, env.xiT(z));
        if (env.xiT(z) >= nu) ++brute_tail;
    }
    expect_eq_bits(env.max_potential(R_half), brute_max, "max_potential equals linear scan");
    expect(env.tail_count(R_half, nu) == brute_tail, "tail_count equals linear scan");

    expect(env.tail_count(R_half, 0.5 / sc.aT) ==
               env.tail_count(R_half, 1.0 / sc.aT),
           "nu below the floor counts every site");
    expect(env.tail_count(0.3, env.max_potential(0.3) * 1.0000001) == 0,
           "nu above the max counts nothing");

    bool threw = false;
    try {
        env.max_potential(0.31);
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    expect(threw, "sub-window beyond sampled window rejected");

    const Environment uniform = Environment::with_potential(sc, 0.1, {});
    expect_eq_bits(uniform.max_potential(0.1), 1.0 / sc.aT, "uniform floor max");
}

void test_serialization_roundtrip() {
    const auto sc = derive_scaling(2, 3.0, 40.0);
    const Environment env = Environment::sample(sc, 0.02, 31);
    std::stringstream buffer;
    env.save(buffer);
    const Environment back = Environment::load(buffer);

    expect(back.window().size() == env.window().size(), "round-trip window size");
    expect(back.seed() == env.seed(), "round-trip seed");
    expect(back.scaling().alpha == env.scaling().alpha, "round-trip alpha");
    bool exact = true;
    for (std::int32_t z = 0; z < env.window().size(); ++z)
        exact = exact && back.xi(z) == env.xi(z) && back.xiT(z) == env.xiT(z);
    expect(exact, "round-trip potentials bit-exact");

    std::stringstream corrupt;
    corrupt << "lilypad-environment 2\n";
    bool threw = false;
    try {
        Environment::load(corrupt);
    } catch (const std::runtime_error&) {
        threw = true;
    }
    expect(threw, "unknown format version rejected");
}

}  // namespace

int main() {
    test_rng_basics();
    test_pareto_inverse_cdf();
    test_sampling_and_determinism();
    test_empirical_tail();
    test_ks_statistic();
    test_with_potential();
    test_scan_reductions();
    test_serialization_roundtrip();
    return harness::finish("environment");
}
