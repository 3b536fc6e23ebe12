#include "mobsim/diary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mobsim/errors.hpp"
#include "mobsim/time_util.hpp"

namespace mobsim {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

DiaryGenerator::DiaryGenerator(double slot_hours, Matrix probs,
                               std::optional<CountMatrix> counts)
    : slot_hours_(slot_hours), probs_(probs), counts_(std::move(counts)) {}

MobilityDiary DiaryGenerator::generate(std::int64_t start, std::int64_t end,
                                       Rng& rng) const {
    MobilityDiary diary;
    diary.entries.push_back({0, start});
    if (end <= start) return diary;

    const auto slot_seconds =
        static_cast<std::int64_t>(std::llround(slot_hours_ * 3600.0));
    int state = state_index(hour_of_day(start), false);
    bool in_other = false;
    int next_abstract = 1;
    for (std::int64_t t = start;;) {
        const bool other = state_other(state);
        if (other && !in_other) {
            diary.entries.push_back({next_abstract++, t});
        } else if (!other && in_other) {
            diary.entries.push_back({0, t});
        }
        in_other = other;

        t += slot_seconds;
        if (t >= end) break;
        const auto& row = probs_[static_cast<std::size_t>(state)];
        state = static_cast<int>(pick_weighted(rng, row));
    }
    return diary;
}

DiaryGenerator train_diary_generator(std::span<const TrajectoryRecord> sorted,
                                     const WeightedTessellation& tess,
                                     double slot_hours) {
    const auto slot_seconds =
        static_cast<std::int64_t>(std::llround(slot_hours * 3600.0));
    DiaryGenerator::CountMatrix counts{};
    std::int64_t total_pairs = 0;

    for_each_user(sorted, [&](int, std::span<const TrajectoryRecord> recs) {
        // Tile per record; unmapped records are dropped.
        std::vector<std::pair<int, std::int64_t>> visits;  // (tile, time)
        for (const auto& r : recs) {
            if (auto tile = tess.locate(r.point)) {
                visits.emplace_back(*tile, r.timestamp);
            }
        }
        if (visits.size() < 2) return;

        const std::int64_t first_slot = floor_div(visits.front().second, slot_seconds);
        const std::int64_t last_slot = floor_div(visits.back().second, slot_seconds);
        const auto n_slots = static_cast<std::size_t>(last_slot - first_slot + 1);
        if (n_slots < 2) return;

        // Slot winner by dwell time, streaming over record intervals: the
        // position persists until the next record, and the final record
        // holds until the end of its slot.  Ties resolve to the smaller id.
        std::vector<int> slot_tile(n_slots, -1);
        std::size_t ri = 0;
        std::map<int, std::int64_t> dwell;
        for (std::size_t s = 0; s < n_slots; ++s) {
            const std::int64_t slot_lo =
                (first_slot + static_cast<std::int64_t>(s)) * slot_seconds;
            const std::int64_t slot_hi = slot_lo + slot_seconds;
            while (ri + 1 < visits.size() && visits[ri + 1].second <= slot_lo) {
                ++ri;
            }
            dwell.clear();
            for (std::size_t k = ri; k < visits.size() && visits[k].second < slot_hi;
                 ++k) {
                const std::int64_t t0 = std::max(visits[k].second, slot_lo);
                const std::int64_t t1 = std::min(
                    k + 1 < visits.size() ? visits[k + 1].second : slot_hi, slot_hi);
                if (t1 > t0) dwell[visits[k].first] += t1 - t0;
            }
            std::int64_t best = -1;
            for (const auto& [tile, secs] : dwell) {
                if (secs > best) {
                    best = secs;
                    slot_tile[s] = tile;
                }
            }
        }

        // Modal tile per hour of day.
        std::array<std::map<int, int>, DiaryGenerator::kHours> hour_counts;
        std::vector<int> slot_hour(n_slots);
        for (std::size_t s = 0; s < n_slots; ++s) {
            slot_hour[s] = hour_of_day((first_slot + static_cast<std::int64_t>(s)) *
                                       slot_seconds);
            hour_counts[static_cast<std::size_t>(slot_hour[s])][slot_tile[s]]++;
        }
        std::array<int, DiaryGenerator::kHours> typical{};
        typical.fill(-1);
        for (int h = 0; h < DiaryGenerator::kHours; ++h) {
            int best_count = 0;
            for (const auto& [tile, c] : hour_counts[static_cast<std::size_t>(h)]) {
                if (c > best_count) {
                    best_count = c;
                    typical[static_cast<std::size_t>(h)] = tile;
                }
            }
        }

        for (std::size_t s = 0; s + 1 < n_slots; ++s) {
            const int a = DiaryGenerator::state_index(
                slot_hour[s],
                slot_tile[s] != typical[static_cast<std::size_t>(slot_hour[s])]);
            const int b = DiaryGenerator::state_index(
                slot_hour[s + 1],
                slot_tile[s + 1] !=
                    typical[static_cast<std::size_t>(slot_hour[s + 1])]);
            counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]++;
            ++total_pairs;
        }
    });

    if (total_pairs == 0) {
        throw InsufficientDataError(
            "diary training needs at least one user with two consecutive slots");
    }

    DiaryGenerator::Matrix probs{};
    for (int i = 0; i < DiaryGenerator::kStates; ++i) {
        std::int64_t row_total = 0;
        for (int j = 0; j < DiaryGenerator::kStates; ++j) {
            row_total += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < DiaryGenerator::kStates; ++j) {
            probs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                static_cast<double>(
                    counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] + 1) /
                static_cast<double>(row_total + DiaryGenerator::kStates);
        }
    }
    return DiaryGenerator(slot_hours, probs, counts);
}

void write_diary_generator(const std::string& path, const DiaryGenerator& gen) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw FileError("cannot open for writing: " + tmp);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", gen.slot_hours());
        out << "slot_hours " << buf << '\n';
        for (const auto& row : gen.transition_probs()) {
            for (int j = 0; j < DiaryGenerator::kStates; ++j) {
                char cell[40];
                std::snprintf(cell, sizeof(cell), "%.17g", row[static_cast<std::size_t>(j)]);
                out << cell << (j + 1 < DiaryGenerator::kStates ? " " : "\n");
            }
        }
        if (gen.transition_counts()) {
            out << "counts\n";
            for (const auto& row : *gen.transition_counts()) {
                for (int j = 0; j < DiaryGenerator::kStates; ++j) {
                    out << row[static_cast<std::size_t>(j)]
                        << (j + 1 < DiaryGenerator::kStates ? " " : "\n");
                }
            }
        }
        if (!out) throw FileError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw FileError("rename failed: " + path);
    }
}

DiaryGenerator read_diary_generator(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open diary generator file: " + path);
    std::string key;
    double slot_hours = 0.0;
    if (!(in >> key >> slot_hours) || key != "slot_hours" || slot_hours <= 0.0) {
        throw FileError("diary generator file missing slot_hours header: " + path);
    }
    DiaryGenerator::Matrix probs{};
    for (int i = 0; i < DiaryGenerator::kStates; ++i) {
        for (int j = 0; j < DiaryGenerator::kStates; ++j) {
            if (!(in >> probs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])) {
                throw FileError("truncated diary generator matrix: " + path);
            }
        }
    }
    std::optional<DiaryGenerator::CountMatrix> counts;
    if (in >> key && key == "counts") {
        DiaryGenerator::CountMatrix c{};
        for (int i = 0; i < DiaryGenerator::kStates; ++i) {
            for (int j = 0; j < DiaryGenerator::kStates; ++j) {
                if (!(in >> c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])) {
                    throw FileError("truncated diary generator counts: " + path);
                }
            }
        }
        counts = c;
    }
    return DiaryGenerator(slot_hours, probs, counts);
}

}  // namespace mobsim
