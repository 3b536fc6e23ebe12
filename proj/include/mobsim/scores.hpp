#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mobsim::scores {

struct BinScheme {
    enum class Kind { Log, Linear, Hour24, Rank };
    Kind kind = Kind::Log;
    int n_bins = 50;
    // Fixed range for linear binning; otherwise the sample range is used.
    std::optional<std::pair<double, double>> range;

    static std::optional<BinScheme> parse(const std::string& text);
    std::string to_string() const;
};

struct BinnedDistribution {
    std::vector<double> edges;    // ascending, |edges| = |density| + 1
    std::vector<double> density;  // probability mass per bin, sums to 1
};

// Shared edges for sample sets meant to be compared; build them from the
// union of the supports.  Log binning uses positive samples only.
// Throws EmptySamplesError when no usable sample exists.
std::vector<double> make_edges(std::span<const double> samples_union,
                               const BinScheme& scheme);

// Bins one sample set on the given edges; mass normalized over the samples
// that fall inside them (the top edge is inclusive).
BinnedDistribution bin_samples(std::span<const double> samples,
                               std::span<const double> edges);

// Normalizes an already-aggregated curve (a rank curve or an hourly profile)
// into a distribution over unit bins.
BinnedDistribution distribution_from_curve(std::span<const double> curve);

struct ScoreSet {
    double rmse = 0.0;
    double kl = 0.0;
    double hellinger = 0.0;
    double pearson = 0.0;
    double spearman = 0.0;
};

// The five similarity scores between a ground-truth p and a synthetic q on
// identical edges.  KL uses the natural log with q floored at 1e-12 and
// renormalized, so it stays finite.  Throws EdgeMismatchError.
ScoreSet compute_scores(const BinnedDistribution& p, const BinnedDistribution& q);

double pearson_correlation(std::span<const double> x, std::span<const double> y);
double spearman_correlation(std::span<const double> x, std::span<const double> y);

struct ScoreStats {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
};

struct AggregatedScores {
    ScoreStats rmse, kl, hellinger, pearson, spearman;
};

AggregatedScores aggregate_runs(std::span<const ScoreSet> runs);

struct ReportRow {
    std::string measure;
    std::string model;
    AggregatedScores scores;
};

struct ScoreReport {
    std::vector<std::string> header_lines;  // binning scheme, inputs, digest
    std::vector<ReportRow> rows;
};

// CSV: "measure,model,score,mean,std" preceded by '#' header lines.
void write_score_report(const std::string& path, const ScoreReport& report);

}  // namespace mobsim::scores
