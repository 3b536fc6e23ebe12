#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mobsim/random.hpp"
#include "mobsim/social_graph.hpp"
#include "mobsim/tessellation.hpp"
#include "mobsim/trajectory.hpp"

namespace mobsim::metrics {

enum class Measure {
    JumpLength,
    RadiusOfGyration,
    VisitsPerLocation,
    LocationFrequencyRank,
    WaitingTime,
    UncorrelatedEntropy,
    ActivityPerHour,
    MobilitySimilarity,
};

const char* to_string(Measure m);

// All operations take records sorted by (uid, timestamp).

// One km sample per consecutive record pair per user.
std::vector<double> jump_lengths(std::span<const TrajectoryRecord> sorted);

// One km sample per user: RMS distance from the lat/lng center of mass.
std::vector<double> radius_of_gyration(std::span<const TrajectoryRecord> sorted);

struct VisitCounts {
    std::vector<std::int64_t> per_location;
    std::int64_t out_of_tessellation = 0;
};
VisitCounts visits_per_location(std::span<const TrajectoryRecord> sorted,
                                const WeightedTessellation& tess);

// Tessellation-free variant: each distinct coordinate pair is a location.
std::vector<std::int64_t> visits_per_coordinate(
    std::span<const TrajectoryRecord> sorted);

// Mean visitation frequency by rank 1..k across users; ranks beyond a
// user's support contribute zero.
std::vector<double> location_frequency_rank(
    std::span<const TrajectoryRecord> sorted, int k = 20);

enum class WaitingTimeMode { All, CutBelowOneHour, RemapBelowOneHour };
std::vector<double> waiting_times(std::span<const TrajectoryRecord> sorted,
                                  WaitingTimeMode mode = WaitingTimeMode::All);

// One bits sample per user: Shannon entropy of the visitation frequencies.
std::vector<double> uncorrelated_entropy(std::span<const TrajectoryRecord> sorted);

struct ActivityProfile {
    std::array<double, 24> density{};  // sums to 1 when events > 0
    std::int64_t events = 0;
};
// Movements (every record after a user's first) bucketed by hour of day.
ActivityProfile activity_per_hour(std::span<const TrajectoryRecord> sorted);

// Raw hour-of-day per movement, for histogram pipelines.
std::vector<double> movement_hours(std::span<const TrajectoryRecord> sorted);

struct SimilaritySamples {
    std::vector<double> edge;         // one cosine per graph edge
    std::vector<double> random_pair;  // equally many non-adjacent pairs
};
SimilaritySamples mobility_similarity_distribution(
    std::span<const TrajectoryRecord> sorted, const SocialGraph& graph,
    Rng& rng);

// Delimited dump: "measure,value" rows.
void write_measure_samples(const std::string& path, Measure measure,
                           std::span<const double> values);

}  // namespace mobsim::metrics
