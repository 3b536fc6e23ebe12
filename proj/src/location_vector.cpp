#include "mobsim/location_vector.hpp"

#include <cmath>

namespace mobsim {

double location_frequency(const LocationVector& lv, int location_id) {
    if (lv.total() <= 0) {
        throw EmptyVectorError("location_frequency on an empty location vector");
    }
    return static_cast<double>(lv.count(location_id)) /
           static_cast<double>(lv.total());
}

double mobility_similarity(const LocationVector& a, const LocationVector& b) {
    if (a.total() == 0 || b.total() == 0) return 0.0;
    double dot = 0.0;
    auto ia = a.counts().begin();
    auto ib = b.counts().begin();
    while (ia != a.counts().end() && ib != b.counts().end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += static_cast<double>(ia->second) * static_cast<double>(ib->second);
            ++ia;
            ++ib;
        }
    }
    if (dot == 0.0) return 0.0;
    double na = 0.0, nb = 0.0;
    for (const auto& [id, c] : a.counts()) na += static_cast<double>(c) * c;
    for (const auto& [id, c] : b.counts()) nb += static_cast<double>(c) * c;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace mobsim
