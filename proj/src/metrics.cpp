#include "mobsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "mobsim/errors.hpp"
#include "mobsim/location_vector.hpp"
#include "mobsim/time_util.hpp"

namespace mobsim::metrics {

namespace {

using CoordKey = std::pair<double, double>;

// Visit counts per distinct coordinate for one user.
std::map<CoordKey, std::int64_t> coordinate_counts(
    std::span<const TrajectoryRecord> user) {
    std::map<CoordKey, std::int64_t> counts;
    for (const auto& r : user) counts[{r.point.lat, r.point.lng}]++;
    return counts;
}

}  // namespace

const char* to_string(Measure m) {
    switch (m) {
        case Measure::JumpLength: return "jump_length";
        case Measure::RadiusOfGyration: return "radius_of_gyration";
        case Measure::VisitsPerLocation: return "visits_per_location";
        case Measure::LocationFrequencyRank: return "location_frequency_rank";
        case Measure::WaitingTime: return "waiting_time";
        case Measure::UncorrelatedEntropy: return "uncorrelated_entropy";
        case Measure::ActivityPerHour: return "activity_per_hour";
        case Measure::MobilitySimilarity: return "mobility_similarity";
    }
    return "?";
}

std::vector<double> jump_lengths(std::span<const TrajectoryRecord> sorted) {
    std::vector<double> out;
    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> user) {
        for (std::size_t i = 1; i < user.size(); ++i) {
            out.push_back(haversine_km(user[i - 1].point, user[i].point));
        }
    });
    return out;
}

std::vector<double> radius_of_gyration(std::span<const TrajectoryRecord> sorted) {
    std::vector<double> out;
    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> user) {
        GeoPoint cm{0.0, 0.0};
        for (const auto& r : user) {
            cm.lat += r.point.lat;
            cm.lng += r.point.lng;
        }
        cm.lat /= static_cast<double>(user.size());
        cm.lng /= static_cast<double>(user.size());
        double sq = 0.0;
        for (const auto& r : user) {
            const double d = haversine_km(r.point, cm);
            sq += d * d;
        }
        out.push_back(std::sqrt(sq / static_cast<double>(user.size())));
    });
    return out;
}

VisitCounts visits_per_location(std::span<const TrajectoryRecord> sorted,
                                const WeightedTessellation& tess) {
    VisitCounts vc;
    vc.per_location.assign(tess.size(), 0);
    for (const auto& r : sorted) {
        if (auto id = tess.locate(r.point)) {
            vc.per_location[static_cast<std::size_t>(*id)]++;
        } else {
            vc.out_of_tessellation++;
        }
    }
    return vc;
}

std::vector<std::int64_t> visits_per_coordinate(
    std::span<const TrajectoryRecord> sorted) {
    std::map<CoordKey, std::int64_t> counts;
    for (const auto& r : sorted) counts[{r.point.lat, r.point.lng}]++;
    std::vector<std::int64_t> out;
    out.reserve(counts.size());
    for (const auto& [key, c] : counts) out.push_back(c);
    return out;
}

std::vector<double> location_frequency_rank(
    std::span<const TrajectoryRecord> sorted, int k) {
    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    int users = 0;
    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> user) {
        ++users;
        const auto counts = coordinate_counts(user);
        std::vector<double> freqs;
        freqs.reserve(counts.size());
        const double total = static_cast<double>(user.size());
        for (const auto& [key, c] : counts) {
            freqs.push_back(static_cast<double>(c) / total);
        }
        std::sort(freqs.begin(), freqs.end(), std::greater<>());
        for (std::size_t r = 0; r < static_cast<std::size_t>(k) && r < freqs.size();
             ++r) {
            sums[r] += freqs[r];
        }
    });
    if (users > 0) {
        for (auto& s : sums) s /= static_cast<double>(users);
    }
    return sums;
}

std::vector<double> waiting_times(std::span<const TrajectoryRecord> sorted,
                                  WaitingTimeMode mode) {
    std::vector<double> out;
    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> user) {
        for (std::size_t i = 1; i < user.size(); ++i) {
            double dt = static_cast<double>(user[i].timestamp -
                                            user[i - 1].timestamp) /
                        3600.0;
            if (mode == WaitingTimeMode::CutBelowOneHour && dt < 1.0) continue;
            if (mode == WaitingTimeMode::RemapBelowOneHour && dt < 1.0) dt = 1.0;
            out.push_back(dt);
        }
    });
    return out;
}

std::vector<double> uncorrelated_entropy(std::span<const TrajectoryRecord> sorted) {
    std::vector<double> out;
    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> user) {
        const auto counts = coordinate_counts(user);
        const double total = static_cast<double>(user.size());
        double entropy = 0.0;
        for (const auto& [key, c] : counts) {
            const double p = static_cast<double>(c) / total;
            entropy -= p * std::log2(p);
        }
        out.push_back(entropy);
    });
    return out;
}

ActivityProfile activity_per_hour(std::span<const TrajectoryRecord> sorted) {
    ActivityProfile prof;
    std::array<std::int64_t, 24> counts{};
    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> user) {
        for (std::size_t i = 1; i < user.size(); ++i) {
            counts[static_cast<std::size_t>(hour_of_day(user[i].timestamp))]++;
            ++prof.events;
        }
    });
    if (prof.events > 0) {
        for (int h = 0; h < 24; ++h) {
            prof.density[static_cast<std::size_t>(h)] =
                static_cast<double>(counts[static_cast<std::size_t>(h)]) /
                static_cast<double>(prof.events);
        }
    }
    return prof;
}

std::vector<double> movement_hours(std::span<const TrajectoryRecord> sorted) {
    std::vector<double> out;
    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> user) {
        for (std::size_t i = 1; i < user.size(); ++i) {
            out.push_back(static_cast<double>(hour_of_day(user[i].timestamp)));
        }
    });
    return out;
}

SimilaritySamples mobility_similarity_distribution(
    std::span<const TrajectoryRecord> sorted, const SocialGraph& graph,
    Rng& rng) {
    // Coordinate-keyed location vectors per user; ids are interned so the
    // cosine machinery from the core module applies.
    std::map<CoordKey, int> intern;
    std::vector<LocationVector> lvs(graph.node_count());
    for_each_user(sorted, [&](int uid, std::span<const TrajectoryRecord> user) {
        if (uid < 0 || static_cast<std::size_t>(uid) >= lvs.size()) return;
        for (const auto& r : user) {
            const CoordKey key{r.point.lat, r.point.lng};
            auto [it, inserted] =
                intern.emplace(key, static_cast<int>(intern.size()));
            lvs[static_cast<std::size_t>(uid)].add(it->second);
        }
    });

    SimilaritySamples samples;
    for (std::size_t u = 0; u < graph.node_count(); ++u) {
        for (int v : graph.neighbors(static_cast<int>(u))) {
            if (static_cast<int>(u) < v) {
                samples.edge.push_back(
                    mobility_similarity(lvs[u], lvs[static_cast<std::size_t>(v)]));
            }
        }
    }
    const std::size_t n = graph.node_count();
    if (n >= 2) {
        std::size_t guard = 0;
        while (samples.random_pair.size() < samples.edge.size() &&
               guard < samples.edge.size() * 1000 + 1000) {
            ++guard;
            const int u = static_cast<int>(rng.uniform_index(n));
            const int v = static_cast<int>(rng.uniform_index(n));
            if (u == v || graph.has_edge(u, v)) continue;
            samples.random_pair.push_back(
                mobility_similarity(lvs[static_cast<std::size_t>(u)],
                                    lvs[static_cast<std::size_t>(v)]));
        }
    }
    return samples;
}

void write_measure_samples(const std::string& path, Measure measure,
                           std::span<const double> values) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot open for writing: " + path);
    out << "measure,value\n";
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        out << to_string(measure) << ',' << buf << '\n';
    }
    if (!out) throw FileError("write failed: " + path);
}

}  // namespace mobsim::metrics
