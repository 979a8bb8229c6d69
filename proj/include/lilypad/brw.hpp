#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lilypad/environment.hpp"

// Exact event-driven simulation of the branching random walk in the raw
// (micro) coordinates of an environment window. Each particle at micro site z
// independently jumps to one of its 2d neighbors at rate 1 per direction and
// splits in two at rate xi(z); there are no deaths. Site counts are
// aggregated (particles at a site are exchangeable), the total event rate is
// maintained incrementally with compensated summation and re-checked against
// a full recomputation every 10^4 events, and particles stepping outside the
// window are absorbed into a leak tally. Exhausting a population or event cap
// sets a truncation flag rather than raising.

namespace lilypad {

struct SimulationCaps {
    std::uint64_t max_population = 10'000'000;
    std::uint64_t max_events = 500'000'000;
};

struct Snapshot {
    double time_macro = 0.0;
    double time_micro = 0.0;
    // per-site particle counts; integer-valued, double so ensemble merging
    // and synthetic records share one representation
    std::vector<double> counts;
    // particles that have never left the origin (the N(s) class)
    double origin_residents = 0.0;
};

class BRWRecord {
  public:
    const Environment& env() const { return *env_; }
    const std::shared_ptr<const Environment>& env_ptr() const { return env_; }
    const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    const Snapshot& snapshot_at(double t_macro) const;

    // Micro times; +inf where never reached. First hit at the origin is 0.
    const std::vector<double>& first_hit_micro() const { return first_hit_; }
    // First micro time the site count reached exp(mu_T).
    const std::vector<double>& thresh_hit_micro() const { return thresh_hit_; }

    double leaked() const { return leaked_; }
    bool truncated() const { return truncated_; }
    const std::string& truncation_reason() const { return truncation_reason_; }
    std::uint64_t events() const { return events_; }
    double horizon_micro() const { return horizon_micro_; }

    friend BRWRecord simulate(std::shared_ptr<const Environment>, double,
                              const std::vector<double>&, std::uint64_t, std::uint64_t,
                              SimulationCaps);
    friend BRWRecord synthetic_record(std::shared_ptr<const Environment>,
                                      std::vector<Snapshot>, std::vector<double>);

  private:
    std::shared_ptr<const Environment> env_;
    std::vector<Snapshot> snapshots_;
    std::vector<double> first_hit_;
    std::vector<double> thresh_hit_;
    double leaked_ = 0.0;
    bool truncated_ = false;
    std::string truncation_reason_;
    std::uint64_t events_ = 0;
    double horizon_micro_ = 0.0;
};

// One replicate. The RNG stream is derive_stream(seed, replicate + 1)
// (stream 0 is reserved for environment sampling under the same seed), so
// replicates are independent and any fan-out order reproduces.
BRWRecord simulate(std::shared_ptr<const Environment> env, double t_end_macro,
                   const std::vector<double>& snapshot_macro_times, std::uint64_t seed,
                   std::uint64_t replicate = 0, SimulationCaps caps = {});

// Record assembled from precomputed snapshots/hits (comparison harnesses).
BRWRecord synthetic_record(std::shared_ptr<const Environment> env,
                           std::vector<Snapshot> snapshots,
                           std::vector<double> first_hit_micro);

// Rescaled occupation profile M_T(z, t) = log_+ N / (a(T) T); zero where the
// count is <= 1. t must match a recorded snapshot.
std::vector<double> rescaled_counts(const BRWRecord& record, double t_macro);

// Rescaled hitting times, macro units: H from first arrival, Hprime from the
// count first reaching exp(mu_T).
struct HittingFields {
    std::vector<double> H;
    std::vector<double> Hprime;
};
HittingFields hitting_fields(const BRWRecord& record);

}  // namespace lilypad
