#include "mobsim/scores.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "mobsim/errors.hpp"

namespace mobsim::scores {

namespace {

constexpr double kKlFloor = 1e-12;

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::optional<BinScheme> BinScheme::parse(const std::string& text) {
    BinScheme s;
    if (text == "hour24") {
        s.kind = Kind::Hour24;
        s.n_bins = 24;
        return s;
    }
    const auto colon = text.find(':');
    const std::string head = colon == std::string::npos ? text : text.substr(0, colon);
    int n = 0;
    if (colon != std::string::npos) {
        try {
            n = std::stoi(text.substr(colon + 1));
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (n <= 0) return std::nullopt;
    }
    if (head == "log") {
        s.kind = Kind::Log;
        s.n_bins = n > 0 ? n : 50;
        return s;
    }
    if (head == "linear") {
        s.kind = Kind::Linear;
        s.n_bins = n > 0 ? n : 40;
        return s;
    }
    if (head == "rank") {
        s.kind = Kind::Rank;
        s.n_bins = n > 0 ? n : 20;
        return s;
    }
    return std::nullopt;
}

std::string BinScheme::to_string() const {
    switch (kind) {
        case Kind::Log: return "log:" + std::to_string(n_bins);
        case Kind::Linear: return "linear:" + std::to_string(n_bins);
        case Kind::Hour24: return "hour24";
        case Kind::Rank: return "rank:" + std::to_string(n_bins);
    }
    return "?";
}

std::vector<double> make_edges(std::span<const double> samples_union,
                               const BinScheme& scheme) {
    std::vector<double> edges;
    switch (scheme.kind) {
        case BinScheme::Kind::Hour24: {
            edges.resize(25);
            for (int i = 0; i <= 24; ++i) edges[static_cast<std::size_t>(i)] = i;
            return edges;
        }
        case BinScheme::Kind::Rank: {
            edges.resize(static_cast<std::size_t>(scheme.n_bins) + 1);
            for (int i = 0; i <= scheme.n_bins; ++i) {
                edges[static_cast<std::size_t>(i)] = 0.5 + i;
            }
            return edges;
        }
        case BinScheme::Kind::Linear: {
            double lo, hi;
            if (scheme.range) {
                lo = scheme.range->first;
                hi = scheme.range->second;
            } else {
                if (samples_union.empty()) {
                    throw EmptySamplesError("no samples to derive linear edges");
                }
                lo = *std::min_element(samples_union.begin(), samples_union.end());
                hi = *std::max_element(samples_union.begin(), samples_union.end());
            }
            if (hi <= lo) hi = lo + 1.0;
            edges.resize(static_cast<std::size_t>(scheme.n_bins) + 1);
            for (int i = 0; i <= scheme.n_bins; ++i) {
                edges[static_cast<std::size_t>(i)] =
                    lo + (hi - lo) * static_cast<double>(i) / scheme.n_bins;
            }
            return edges;
        }
        case BinScheme::Kind::Log: {
            double lo = std::numeric_limits<double>::max();
            double hi = 0.0;
            for (double v : samples_union) {
                if (v > 0.0) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            if (hi <= 0.0) {
                throw EmptySamplesError("no positive samples for log edges");
            }
            if (hi <= lo) hi = lo * 1.0001;
            const double llo = std::log(lo);
            const double lhi = std::log(hi);
            edges.resize(static_cast<std::size_t>(scheme.n_bins) + 1);
            for (int i = 0; i <= scheme.n_bins; ++i) {
                edges[static_cast<std::size_t>(i)] = std::exp(
                    llo + (lhi - llo) * static_cast<double>(i) / scheme.n_bins);
            }
            edges.front() = lo;
            edges.back() = hi;
            return edges;
        }
    }
    throw EmptySamplesError("unknown binning scheme");
}

BinnedDistribution bin_samples(std::span<const double> samples,
                               std::span<const double> edges) {
    if (samples.empty()) throw EmptySamplesError("no samples to bin");
    BinnedDistribution dist;
    dist.edges.assign(edges.begin(), edges.end());
    dist.density.assign(edges.size() - 1, 0.0);
    std::int64_t inside = 0;
    for (double v : samples) {
        if (v < edges.front() || v > edges.back()) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        std::size_t idx = static_cast<std::size_t>(it - edges.begin());
        idx = idx == 0 ? 0 : idx - 1;
        if (idx >= dist.density.size()) idx = dist.density.size() - 1;  // top edge
        dist.density[idx] += 1.0;
        ++inside;
    }
    if (inside == 0) throw EmptySamplesError("no samples fall inside the edges");
    for (auto& d : dist.density) d /= static_cast<double>(inside);
    return dist;
}

BinnedDistribution distribution_from_curve(std::span<const double> curve) {
    if (curve.empty()) throw EmptySamplesError("empty curve");
    double total = 0.0;
    for (double v : curve) total += v;
    if (total <= 0.0) throw EmptySamplesError("curve has no mass");
    BinnedDistribution dist;
    dist.edges.resize(curve.size() + 1);
    for (std::size_t i = 0; i <= curve.size(); ++i) {
        dist.edges[i] = static_cast<double>(i);
    }
    dist.density.resize(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        dist.density[i] = curve[i] / total;
    }
    return dist;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        // Degenerate constant vector(s): correlated only if identical.
        return std::equal(x.begin(), x.end(), y.begin()) ? 1.0 : 0.0;
    }
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson_correlation(rx, ry);
}

ScoreSet compute_scores(const BinnedDistribution& p, const BinnedDistribution& q) {
    if (p.edges.size() != q.edges.size() ||
        !std::equal(p.edges.begin(), p.edges.end(), q.edges.begin())) {
        throw EdgeMismatchError("distributions binned on different edges");
    }
    const std::size_t n = p.density.size();
    ScoreSet s;

    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = p.density[i] - q.density[i];
        sq += d * d;
    }
    s.rmse = std::sqrt(sq / static_cast<double>(n));

    // Floor q's zero bins and renormalize so the divergence stays finite.
    std::vector<double> qf(q.density.begin(), q.density.end());
    double qtotal = 0.0;
    for (auto& v : qf) {
        if (v < kKlFloor) v = kKlFloor;
        qtotal += v;
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p.density[i] > 0.0) {
            kl += p.density[i] * std::log(p.density[i] / (qf[i] / qtotal));
        }
    }
    s.kl = kl;

    double hsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::sqrt(p.density[i]) - std::sqrt(q.density[i]);
        hsum += d * d;
    }
    s.hellinger = std::sqrt(hsum) / std::sqrt(2.0);

    s.pearson = pearson_correlation(p.density, q.density);
    s.spearman = spearman_correlation(p.density, q.density);
    return s;
}

AggregatedScores aggregate_runs(std::span<const ScoreSet> runs) {
    if (runs.empty()) throw EmptySamplesError("no runs to aggregate");
    const auto stat = [&](double ScoreSet::* field) {
        ScoreStats st;
        for (const auto& r : runs) st.mean += r.*field;
        st.mean /= static_cast<double>(runs.size());
        double var = 0.0;
        for (const auto& r : runs) {
            const double d = r.*field - st.mean;
            var += d * d;
        }
        st.stddev = std::sqrt(var / static_cast<double>(runs.size()));
        return st;
    };
    AggregatedScores agg;
    agg.rmse = stat(&ScoreSet::rmse);
    agg.kl = stat(&ScoreSet::kl);
    agg.hellinger = stat(&ScoreSet::hellinger);
    agg.pearson = stat(&ScoreSet::pearson);
    agg.spearman = stat(&ScoreSet::spearman);
    return agg;
}

void write_score_report(const std::string& path, const ScoreReport& report) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot open for writing: " + path);
    for (const auto& line : report.header_lines) out << "# " << line << '\n';
    out << "measure,model,score,mean,std\n";
    char buf[64];
    const auto row = [&](const ReportRow& r, const char* name,
                         const ScoreStats& st) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g", st.mean, st.stddev);
        out << r.measure << ',' << r.model << ',' << name << ',' << buf << '\n';
    };
    for (const auto& r : report.rows) {
        row(r, "rmse", r.scores.rmse);
        row(r, "kl", r.scores.kl);
        row(r, "hellinger", r.scores.hellinger);
        row(r, "pearson", r.scores.pearson);
        row(r, "spearman", r.scores.spearman);
    }
    if (!out) throw FileError("write failed: " + path);
}

}  // namespace mobsim::scores
