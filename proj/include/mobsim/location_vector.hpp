#pragma once

#include <cstdint>
#include <map>

#include "mobsim/errors.hpp"

namespace mobsim {

// Sparse per-agent visit counts keyed by location id.  Absent means zero;
// stored counts are always positive.
class LocationVector {
  public:
    using Counts = std::map<int, std::int64_t>;

    void add(int location_id, std::int64_t n = 1) {
        if (n <= 0) return;
        counts_[location_id] += n;
        total_ += n;
    }

    std::int64_t count(int location_id) const {
        auto it = counts_.find(location_id);
        return it == counts_.end() ? 0 : it->second;
    }

    bool contains(int location_id) const { return counts_.count(location_id) > 0; }

    std::int64_t total() const { return total_; }
    int support_size() const { return static_cast<int>(counts_.size()); }
    const Counts& counts() const { return counts_; }
    bool empty() const { return counts_.empty(); }

  private:
    Counts counts_;
    std::int64_t total_ = 0;
};

// Fraction of the agent's visits spent at the given location.
double location_frequency(const LocationVector& lv, int location_id);

// Cosine similarity of two visit-count vectors; 0 when either is empty.
double mobility_similarity(const LocationVector& a, const LocationVector& b);

}  // namespace mobsim
