#include "lilypad/brw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lilypad/rng.hpp"

namespace lilypad {

namespace {

constexpr double kInfty = std::numeric_limits<double>::infinity();

double site_rate(double count, double xi, int d) {
    return count * (2.0 * d + xi);
}

}  // namespace

const Snapshot& BRWRecord::snapshot_at(double t_macro) const {
    for (const auto& s : snapshots_)
        if (s.time_macro == t_macro) return s;
    throw std::invalid_argument("BRWRecord: no snapshot at t=" + std::to_string(t_macro));
}

BRWRecord simulate(std::shared_ptr<const Environment> env, double t_end_macro,
                   const std::vector<double>& snapshot_macro_times, std::uint64_t seed,
                   std::uint64_t replicate, SimulationCaps caps) {
    const Window& w = env->window();
    const auto& sc = env->scaling();
    const int d = sc.d;
    const std::int32_t n = w.size();
    if (!(t_end_macro > 0.0)) throw std::invalid_argument("simulate: horizon must be > 0");

    BRWRecord rec;
    rec.env_ = env;
    rec.horizon_micro_ = t_end_macro * sc.T;
    rec.first_hit_.assign(n, kInfty);
    rec.thresh_hit_.assign(n, kInfty);

    std::vector<double> snap_macro = snapshot_macro_times;
    std::sort(snap_macro.begin(), snap_macro.end());
    for (double t : snap_macro)
        if (!(t >= 0.0) || t * sc.T > rec.horizon_micro_ * (1.0 + 1e-12))
            throw std::invalid_argument("simulate: snapshot time outside horizon");

    Rng rng(derive_stream(seed, replicate + 1));
    const double thresh = std::exp(sc.muT);

    std::vector<std::uint64_t> count(n, 0);
    std::vector<std::int32_t> occupied;  // sites that may hold particles; compacted lazily
    std::vector<char> listed(n, 0);      // membership in occupied, so re-entered sites
                                         // are not pushed twice (a duplicate would get
                                         // double weight in the selection scan)
    const std::int32_t origin = w.origin();
    count[origin] = 1;
    occupied.push_back(origin);
    listed[origin] = 1;
    rec.first_hit_[origin] = 0.0;
    std::uint64_t population = 1;
    std::uint64_t residents = 1;  // never left the origin
    if (1.0 >= thresh) rec.thresh_hit_[origin] = 0.0;

    KahanSum total_rate;
    total_rate.add(site_rate(1.0, env->xi(origin), d));

    double clock = 0.0;
    std::size_t next_snap = 0;
    // record every pending snapshot with micro time <= limit, at current state
    const auto record_snaps = [&](double limit) {
        while (next_snap < snap_macro.size() && snap_macro[next_snap] * sc.T <= limit) {
            Snapshot s;
            s.time_macro = snap_macro[next_snap];
            s.time_micro = snap_macro[next_snap] * sc.T;
            s.counts.assign(count.begin(), count.end());
            s.origin_residents = static_cast<double>(residents);
            rec.snapshots_.push_back(std::move(s));
            ++next_snap;
        }
    };

    const auto refresh_rate = [&]() {
        KahanSum fresh;
        for (std::int32_t z : occupied)
            if (count[z] > 0) fresh.add(site_rate(static_cast<double>(count[z]), env->xi(z), d));
        const double drift = std::abs(fresh.value() - total_rate.value());
        if (drift > 1e-9 * std::max(1.0, fresh.value()))
            throw std::logic_error("simulate: incremental total rate drifted by " +
                                   std::to_string(drift));
        total_rate = fresh;
    };

    while (true) {
        if (population == 0) break;  // everything absorbed at the ring
        if (rec.events_ >= caps.max_events) {
            rec.truncated_ = true;
            rec.truncation_reason_ = "event cap " + std::to_string(caps.max_events);
            break;
        }
        const double t_next = clock + rng.exponential(total_rate.value());
        // a snapshot exactly at an event time reflects the state after it
        record_snaps(std::nextafter(t_next, 0.0));
        if (t_next > rec.horizon_micro_) break;
        clock = t_next;

        if (occupied.size() > 64 &&
            occupied.size() > 2 * static_cast<std::size_t>(std::count_if(
                                      occupied.begin(), occupied.end(),
                                      [&](std::int32_t s) { return count[s] > 0; }))) {
            std::erase_if(occupied, [&](std::int32_t s) {
                if (count[s] > 0) return false;
                listed[s] = 0;
                return true;
            });
        }

        // pick the event site proportionally to its rate
        double r = rng.uniform01() * total_rate.value();
        std::int32_t z = -1;
        for (std::int32_t cand : occupied) {
            if (count[cand] == 0) continue;
            z = cand;
            r -= site_rate(static_cast<double>(count[cand]), env->xi(cand), d);
            if (r <= 0.0) break;
        }
        if (z < 0) {
            refresh_rate();
            continue;
        }
        ++rec.events_;

        const double xi_z = env->xi(z);
        const double u = rng.uniform01();
        const bool owner_resident =
            z == origin && residents > 0 &&
            rng.uniform01() * static_cast<double>(count[z]) < static_cast<double>(residents);
        if (u * (2.0 * d + xi_z) < xi_z) {
            // branch
            ++count[z];
            ++population;
            if (owner_resident) ++residents;
            total_rate.add(site_rate(1.0, xi_z, d));
            if (static_cast<double>(count[z]) >= thresh && rec.thresh_hit_[z] == kInfty)
                rec.thresh_hit_[z] = clock;
            if (population > caps.max_population) {
                rec.truncated_ = true;
                rec.truncation_reason_ =
                    "population cap " + std::to_string(caps.max_population);
                break;
            }
        } else {
            // jump
            const std::uint64_t dir_idx = rng.below(2 * static_cast<std::uint64_t>(d));
            const int axis = static_cast<int>(dir_idx / 2);
            const int dir = dir_idx % 2 == 0 ? +1 : -1;
            const std::int32_t target = w.neighbor(z, axis, dir);
            --count[z];
            total_rate.add(-site_rate(1.0, xi_z, d));
            if (owner_resident) --residents;
            if (target < 0) {
                rec.leaked_ += 1.0;
                --population;
            } else {
                if (!listed[target]) {
                    occupied.push_back(target);
                    listed[target] = 1;
                }
                ++count[target];
                total_rate.add(site_rate(1.0, env->xi(target), d));
                if (rec.first_hit_[target] == kInfty) rec.first_hit_[target] = clock;
                if (static_cast<double>(count[target]) >= thresh &&
                    rec.thresh_hit_[target] == kInfty)
                    rec.thresh_hit_[target] = clock;
            }
        }

        if (rec.events_ % 10000 == 0) refresh_rate();
    }

    record_snaps(rec.horizon_micro_);
    return rec;
}

BRWRecord synthetic_record(std::shared_ptr<const Environment> env,
                           std::vector<Snapshot> snapshots,
                           std::vector<double> first_hit_micro) {
    BRWRecord rec;
    rec.horizon_micro_ = snapshots.empty() ? 0.0 : snapshots.back().time_micro;
    rec.env_ = std::move(env);
    rec.snapshots_ = std::move(snapshots);
    rec.first_hit_ = std::move(first_hit_micro);
    rec.thresh_hit_.assign(rec.first_hit_.size(), kInfty);
    return rec;
}

std::vector<double> rescaled_counts(const BRWRecord& record, double t_macro) {
    const Snapshot& s = record.snapshot_at(t_macro);
    const auto& sc = record.env().scaling();
    const double denom = sc.aT * sc.T;
    std::vector<double> out(s.counts.size(), 0.0);
    for (std::size_t z = 0; z < s.counts.size(); ++z)
        if (s.counts[z] > 1.0) out[z] = std::log(s.counts[z]) / denom;
    return out;
}

HittingFields hitting_fields(const BRWRecord& record) {
    const double T = record.env().scaling().T;
    HittingFields hf;
    hf.H.resize(record.first_hit_micro().size());
    hf.Hprime.resize(record.thresh_hit_micro().size());
    for (std::size_t z = 0; z < hf.H.size(); ++z) {
        hf.H[z] = record.first_hit_micro()[z] / T;
        hf.Hprime[z] = record.thresh_hit_micro()[z] / T;
    }
    return hf;
}

}  // namespace lilypad
