#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobsim/random.hpp"
#include "mobsim/tessellation.hpp"
#include "mobsim/trajectory.hpp"

namespace mobsim {

struct DiaryEntry {
    int abstract_id = 0;  // 0 = home
    std::int64_t time = 0;
};

// Timed sequence of abstract locations.  Entry 0 is always home; abstract
// ids within a run (a maximal segment between home entries) are distinct.
struct MobilityDiary {
    std::vector<DiaryEntry> entries;
};

// Hourly Markov model over 48 states: hour-of-day crossed with whether the
// slot is spent at the typical location for that hour.  "Other" slots are
// the ones that break the routine and therefore produce movement.
class DiaryGenerator {
  public:
    static constexpr int kHours = 24;
    static constexpr int kStates = 48;
    using Matrix = std::array<std::array<double, kStates>, kStates>;
    using CountMatrix = std::array<std::array<std::int64_t, kStates>, kStates>;

    DiaryGenerator(double slot_hours, Matrix probs,
                   std::optional<CountMatrix> counts = std::nullopt);

    static int state_index(int hour, bool other) { return hour * 2 + (other ? 1 : 0); }
    static int state_hour(int state) { return state / 2; }
    static bool state_other(int state) { return (state % 2) != 0; }

    double slot_hours() const { return slot_hours_; }
    const Matrix& transition_probs() const { return probs_; }
    const std::optional<CountMatrix>& transition_counts() const { return counts_; }

    // Simulates the chain from (hour(start), typical) and emits one entry
    // per block boundary; covers [start, end).
    MobilityDiary generate(std::int64_t start, std::int64_t end, Rng& rng) const;

  private:
    double slot_hours_ = 1.0;
    Matrix probs_{};
    std::optional<CountMatrix> counts_;
};

// Trains the generator on real trajectories mapped onto the tessellation.
// Each user's hourly series carries the tile with the largest dwell time per
// slot (positions persist until the next record); the typical location at
// hour h is the user's modal tile for that hour.  Transition probabilities
// use add-one smoothing: (count + 1) / (row total + 48).
// Throws InsufficientDataError when no user yields two consecutive slots.
DiaryGenerator train_diary_generator(std::span<const TrajectoryRecord> sorted,
                                     const WeightedTessellation& tess,
                                     double slot_hours = 1.0);

// Plain-text format: "slot_hours <h>" header, 48 rows of 48 probabilities,
// then optionally "counts" and 48 rows of 48 integers.
void write_diary_generator(const std::string& path, const DiaryGenerator& gen);
DiaryGenerator read_diary_generator(const std::string& path);

}  // namespace mobsim
