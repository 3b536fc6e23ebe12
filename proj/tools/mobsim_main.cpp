#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mobsim/diary.hpp"
#include "mobsim/engine.hpp"
#include "mobsim/errors.hpp"
#include "mobsim/ingest.hpp"
#include "mobsim/metrics.hpp"
#include "mobsim/scores.hpp"
#include "mobsim/social_graph.hpp"
#include "mobsim/tessellation.hpp"
#include "mobsim/time_util.hpp"
#include "mobsim/trajectory.hpp"

namespace {

using namespace mobsim;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::int64_t parse_time_or_throw(const std::string& s, const char* what) {
    std::int64_t t = 0;
    if (!parse_iso8601(s, &t)) {
        throw UsageError(std::string("bad ") + what + " timestamp: " + s);
    }
    return t;
}

BoundingBox parse_bbox(const std::string& s) {
    BoundingBox b;
    char c1, c2, c3;
    std::istringstream ss(s);
    if (!(ss >> b.min_lat >> c1 >> b.min_lng >> c2 >> b.max_lat >> c3 >>
          b.max_lng) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
        throw UsageError("bbox must be minlat,minlng,maxlat,maxlng: " + s);
    }
    return b;
}

bool parse_on_off(const std::string& s) {
    if (s == "on" || s == "true" || s == "1") return true;
    if (s == "off" || s == "false" || s == "0") return false;
    throw UsageError("expected on|off, got: " + s);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string key, eq, value;
        std::istringstream ss(line);
        if (!(ss >> key)) continue;
        if (!(ss >> eq)) continue;
        if (eq == "=") {
            if (!(ss >> value)) continue;
        } else {
            value = eq;
        }
        kv[key] = value;
    }
    return kv;
}

void apply_config(const std::map<std::string, std::string>& kv, ModelConfig* cfg) {
    const auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("variant")) {
        auto parsed = parse_variant(*v);
        if (!parsed) throw UsageError("unknown variant in config: " + *v);
        cfg->variant = *parsed;
    }
    if (auto v = get("rho")) cfg->rho = std::stod(*v);
    if (auto v = get("gamma")) cfg->gamma = std::stod(*v);
    if (auto v = get("alpha")) cfg->alpha = std::stod(*v);
    if (auto v = get("wt_beta")) cfg->wt_beta = std::stod(*v);
    if (auto v = get("wt_tau_hours")) cfg->wt_tau_hours = std::stod(*v);
    if (auto v = get("min_wt_hours")) cfg->min_wt_hours = std::stod(*v);
    if (auto v = get("rsl")) cfg->rsl = parse_on_off(*v);
    if (auto v = get("reachable_speed_kmh")) cfg->reachable_speed_kmh = std::stod(*v);
    if (auto v = get("degree_social_exploration")) {
        cfg->degree_social_exploration = parse_on_off(*v);
    }
    if (auto v = get("n_max")) cfg->n_max = std::stoi(*v);
    if (auto v = get("seed")) cfg->seed = std::stoull(*v);
    if (auto v = get("n_agents")) cfg->n_agents = std::stoi(*v);
    if (auto v = get("start")) cfg->start_time = parse_time_or_throw(*v, "start");
    if (auto v = get("end")) cfg->end_time = parse_time_or_throw(*v, "end");
}

std::string run_output_path(const std::string& out, int run, int total_runs) {
    if (total_runs <= 1) return out;
    const auto dot = out.rfind('.');
    const std::string suffix = ".run" + std::to_string(run);
    if (dot == std::string::npos || dot == 0) return out + suffix;
    return out.substr(0, dot) + suffix + out.substr(dot);
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

// ---------------------------------------------------------------- ingest --

struct IngestArgs {
    std::string checkins, venues, graph, bbox, start, end, out;
};

int run_ingest(const IngestArgs& a) {
    const BoundingBox bbox = parse_bbox(a.bbox);
    const std::int64_t start = parse_time_or_throw(a.start, "start");
    const std::int64_t end = parse_time_or_throw(a.end, "end");

    const auto checkins = ingest::parse_checkins(a.checkins);
    const auto venues = ingest::parse_venues(a.venues);
    const auto edges = ingest::parse_raw_edges(a.graph);
    std::cerr << "parsed " << checkins.checkins.size() << " check-ins ("
              << checkins.skipped << " skipped), " << venues.venues.size()
              << " venues (" << venues.skipped << " skipped), "
              << edges.edges.size() << " raw edges\n";

    const auto res = ingest::filter_pipeline(checkins.checkins, venues.venues,
                                             edges, start, end, bbox);
    write_trajectories(a.out + "_traj.csv", res.trajectories);
    SocialGraph g(res.uid_map.size());
    for (const auto& [u, v] : res.edges) g.add_edge(u, v);
    write_social_graph(a.out + "_graph.txt", g);
    ingest::write_pipeline_report(a.out + "_report.txt", res);
    std::cerr << "pipeline kept " << res.uid_map.size() << " users, "
              << res.trajectories.size() << " check-ins, " << res.edges.size()
              << " edges\n";
    return 0;
}

// ------------------------------------------------------------ tessellate --

struct TessellateArgs {
    std::string bbox, points, exclude, out;
    double side_m = 1000.0;
    bool synthetic = false;
    double rel_beta = 1.25;
    double rel_lambda = 104.0;
    bool filter_rel = false;
    std::uint64_t seed = 0;
};

int run_tessellate(const TessellateArgs& a) {
    auto tess = build_squared_tessellation(parse_bbox(a.bbox), a.side_m);

    if (!a.exclude.empty()) {
        const auto excluded = read_exclusion_list(a.exclude);
        tess = apply_exclusions(tess, excluded).tessellation;
    }

    if (a.synthetic) {
        Rng rng(a.seed);
        const auto weights =
            sample_synthetic_relevance(tess.size(), a.rel_beta, a.rel_lambda, rng);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            tess.set_relevance(static_cast<int>(i), weights[i]);
        }
    } else if (!a.points.empty()) {
        std::vector<GeoPoint> points;
        std::ifstream probe(a.points);
        if (!probe) throw FileError("cannot open points file: " + a.points);
        std::string header;
        std::getline(probe, header);
        probe.close();
        if (header.rfind("uid,", 0) == 0) {
            for (const auto& r : read_trajectories(a.points)) {
                points.push_back(r.point);
            }
        } else {
            std::ifstream in(a.points);
            std::string line;
            std::getline(in, line);  // header
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                GeoPoint p;
                char comma;
                std::istringstream ss(line);
                if (ss >> p.lat >> comma >> p.lng && comma == ',') {
                    points.push_back(p);
                }
            }
        }
        const auto assigned = assign_relevance(tess, points);
        tess = assigned.tessellation;
        std::cerr << "assigned relevance from " << points.size() << " points ("
                  << assigned.dropped << " outside)\n";
    }

    if (a.filter_rel) {
        tess = filter_relevant(tess).tessellation;
    }

    write_tessellation(a.out, tess);
    std::cerr << "wrote " << tess.size() << " tiles to " << a.out << "\n";
    return 0;
}

// ----------------------------------------------------------- train-diary --

struct TrainDiaryArgs {
    std::string traj, tess, out;
    double slot_hours = 1.0;
};

int run_train_diary(const TrainDiaryArgs& a) {
    auto records = read_trajectories(a.traj);
    sort_trajectories(records);
    const auto tess = read_tessellation(a.tess);
    const auto gen = train_diary_generator(records, tess, a.slot_hours);
    write_diary_generator(a.out, gen);
    std::cerr << "trained diary generator written to " << a.out << "\n";
    return 0;
}

// -------------------------------------------------------------- simulate --

struct SimulateArgs {
    std::string model, tess, graph, diary, start, end, out, config;
    std::string rsl, degree_social;
    double speed_kmh = 0.0;
    bool speed_set = false;
    int n_max = 0;
    bool n_max_set = false;
    int runs = 1;
    std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& a) {
    ModelConfig cfg;
    if (!a.config.empty()) apply_config(read_config_file(a.config), &cfg);

    if (!a.model.empty()) {
        const auto v = parse_variant(a.model);
        if (!v) throw UsageError("unknown model: " + a.model);
        cfg.variant = *v;
    }
    if (!a.start.empty()) cfg.start_time = parse_time_or_throw(a.start, "start");
    if (!a.end.empty()) cfg.end_time = parse_time_or_throw(a.end, "end");
    if (!a.rsl.empty()) cfg.rsl = parse_on_off(a.rsl);
    if (!a.degree_social.empty()) {
        cfg.degree_social_exploration = parse_on_off(a.degree_social);
    }
    if (a.speed_set) cfg.reachable_speed_kmh = a.speed_kmh;
    if (a.n_max_set) cfg.n_max = a.n_max;
    cfg.seed = a.seed;

    if (cfg.variant == Variant::StsEpr && a.diary.empty()) {
        throw UsageError("sts-epr requires --diary");
    }
    if (cfg.start_time == 0 && cfg.end_time == 0) {
        throw UsageError("--start and --end are required");
    }

    const auto tess = read_tessellation(a.tess);
    const auto graph = read_social_graph(a.graph);
    if (cfg.n_agents == 0) cfg.n_agents = static_cast<int>(graph.node_count());

    std::optional<DiaryGenerator> gen;
    if (!a.diary.empty()) gen = read_diary_generator(a.diary);

    const auto run_one = [&](int run) {
        ModelConfig rc = cfg;
        rc.seed = cfg.seed + static_cast<std::uint64_t>(run);
        Simulation sim(rc, tess, graph, gen ? &*gen : nullptr);
        const auto records = sim.run();
        write_trajectories(run_output_path(a.out, run, a.runs), records);
        return records.size();
    };

    if (a.runs <= 1) {
        const auto n = run_one(0);
        std::cerr << "wrote " << n << " records to " << a.out << "\n";
    } else {
        std::vector<std::future<std::size_t>> futures;
        futures.reserve(static_cast<std::size_t>(a.runs));
        for (int r = 0; r < a.runs; ++r) {
            futures.push_back(std::async(std::launch::async, run_one, r));
        }
        for (int r = 0; r < a.runs; ++r) {
            std::cerr << "run " << r << ": " << futures[static_cast<std::size_t>(r)].get()
                      << " records -> " << run_output_path(a.out, r, a.runs) << "\n";
        }
    }
    return 0;
}

// -------------------------------------------------------------- evaluate --

struct EvaluateArgs {
    std::string real, graph, out, bins, measures, label = "synthetic";
    std::vector<std::string> synthetic;
    std::string wt_mode = "all";
    std::uint64_t seed = 0;
    bool dump_samples = false;
};

struct MeasureSpec {
    metrics::Measure measure;
    scores::BinScheme scheme;
    bool needs_graph = false;
};

std::vector<MeasureSpec> default_measures() {
    using metrics::Measure;
    using scores::BinScheme;
    const BinScheme log50{BinScheme::Kind::Log, 50, std::nullopt};
    return {
        {Measure::JumpLength, log50, false},
        {Measure::RadiusOfGyration, log50, false},
        {Measure::VisitsPerLocation, log50, false},
        {Measure::LocationFrequencyRank, {BinScheme::Kind::Rank, 20, std::nullopt}, false},
        {Measure::WaitingTime, log50, false},
        {Measure::UncorrelatedEntropy, {BinScheme::Kind::Linear, 40, std::nullopt}, false},
        {Measure::ActivityPerHour, {BinScheme::Kind::Hour24, 24, std::nullopt}, false},
        {Measure::MobilitySimilarity,
         {BinScheme::Kind::Linear, 40, std::pair<double, double>{0.0, 1.0}},
         true},
    };
}

std::vector<double> measure_samples(metrics::Measure m,
                                    std::span<const TrajectoryRecord> records,
                                    const SocialGraph* graph,
                                    metrics::WaitingTimeMode wt_mode,
                                    std::uint64_t seed) {
    using metrics::Measure;
    switch (m) {
        case Measure::JumpLength: return metrics::jump_lengths(records);
        case Measure::RadiusOfGyration: return metrics::radius_of_gyration(records);
        case Measure::VisitsPerLocation: {
            std::vector<double> out;
            for (auto c : metrics::visits_per_coordinate(records)) {
                out.push_back(static_cast<double>(c));
            }
            return out;
        }
        case Measure::LocationFrequencyRank:
            return metrics::location_frequency_rank(records);
        case Measure::WaitingTime: return metrics::waiting_times(records, wt_mode);
        case Measure::UncorrelatedEntropy:
            return metrics::uncorrelated_entropy(records);
        case Measure::ActivityPerHour: return metrics::movement_hours(records);
        case Measure::MobilitySimilarity: {
            Rng rng(seed);
            return metrics::mobility_similarity_distribution(records, *graph, rng)
                .edge;
        }
    }
    return {};
}

int run_evaluate(const EvaluateArgs& a) {
    using metrics::Measure;

    auto real = read_trajectories(a.real);
    sort_trajectories(real);
    std::vector<std::vector<TrajectoryRecord>> synths;
    for (const auto& path : a.synthetic) {
        synths.push_back(read_trajectories(path));
        sort_trajectories(synths.back());
    }

    metrics::WaitingTimeMode wt_mode = metrics::WaitingTimeMode::All;
    if (a.wt_mode == "cut") {
        wt_mode = metrics::WaitingTimeMode::CutBelowOneHour;
    } else if (a.wt_mode == "remap") {
        wt_mode = metrics::WaitingTimeMode::RemapBelowOneHour;
    } else if (a.wt_mode != "all") {
        throw UsageError("--wt-mode must be all|cut|remap");
    }

    std::optional<scores::BinScheme> override_scheme;
    if (!a.bins.empty() && a.bins != "default") {
        override_scheme = scores::BinScheme::parse(a.bins);
        if (!override_scheme) throw UsageError("bad --bins scheme: " + a.bins);
    }

    auto specs = default_measures();
    if (!a.measures.empty()) {
        std::vector<MeasureSpec> chosen;
        std::istringstream ss(a.measures);
        std::string name;
        while (std::getline(ss, name, ',')) {
            bool found = false;
            for (const auto& spec : specs) {
                if (name == metrics::to_string(spec.measure)) {
                    chosen.push_back(spec);
                    found = true;
                    break;
                }
            }
            if (!found) throw UsageError("unknown measure: " + name);
        }
        specs = chosen;
    }
    const bool explicit_measures = !a.measures.empty();

    std::optional<SocialGraph> graph;
    if (!a.graph.empty()) graph = read_social_graph(a.graph);

    scores::ScoreReport report;
    report.header_lines.push_back("real " + a.real);
    for (std::size_t i = 0; i < a.synthetic.size(); ++i) {
        report.header_lines.push_back("synthetic " + a.synthetic[i]);
    }
    {
        char digest[32];
        std::uint64_t h = fnv1a_file(a.real);
        for (const auto& p : a.synthetic) h ^= fnv1a_file(p);
        std::snprintf(digest, sizeof(digest), "%016llx",
                      static_cast<unsigned long long>(h));
        report.header_lines.push_back(std::string("input_digest ") + digest);
    }

    for (const auto& spec : specs) {
        const scores::BinScheme scheme =
            (override_scheme && (spec.scheme.kind == scores::BinScheme::Kind::Log ||
                                 spec.scheme.kind == scores::BinScheme::Kind::Linear))
                ? *override_scheme
                : spec.scheme;
        if (spec.needs_graph && !graph) {
            if (explicit_measures) {
                throw UsageError("measure " +
                                 std::string(metrics::to_string(spec.measure)) +
                                 " requires --graph");
            }
            std::cerr << "skipping " << metrics::to_string(spec.measure)
                      << " (no --graph)\n";
            continue;
        }
        try {
            const auto real_s =
                measure_samples(spec.measure, real, graph ? &*graph : nullptr,
                                wt_mode, a.seed);
            std::vector<std::vector<double>> synth_s;
            for (const auto& records : synths) {
                synth_s.push_back(measure_samples(spec.measure, records,
                                                  graph ? &*graph : nullptr,
                                                  wt_mode, a.seed));
            }

            scores::BinnedDistribution p;
            std::vector<scores::BinnedDistribution> qs;
            if (spec.measure == Measure::LocationFrequencyRank) {
                p = scores::distribution_from_curve(real_s);
                for (const auto& s : synth_s) {
                    qs.push_back(scores::distribution_from_curve(s));
                }
            } else {
                std::vector<double> pooled = real_s;
                for (const auto& s : synth_s) {
                    pooled.insert(pooled.end(), s.begin(), s.end());
                }
                const auto edges = scores::make_edges(pooled, scheme);
                p = scores::bin_samples(real_s, edges);
                for (const auto& s : synth_s) {
                    qs.push_back(scores::bin_samples(s, edges));
                }
            }

            std::vector<scores::ScoreSet> run_scores;
            for (const auto& q : qs) {
                run_scores.push_back(scores::compute_scores(p, q));
            }
            scores::ReportRow row;
            row.measure = metrics::to_string(spec.measure);
            row.model = a.label;
            row.scores = scores::aggregate_runs(run_scores);
            report.rows.push_back(row);
            report.header_lines.push_back(
                std::string("binning ") + metrics::to_string(spec.measure) + " " +
                scheme.to_string());

            if (!a.out.empty()) {
                const std::string hist_path =
                    a.out + "." + metrics::to_string(spec.measure) + ".hist.csv";
                std::ofstream hist(hist_path);
                if (!hist) throw FileError("cannot open for writing: " + hist_path);
                hist << "bin_lo,bin_hi,real";
                for (std::size_t r = 0; r < qs.size(); ++r) hist << ",run" << r;
                hist << "\n";
                for (std::size_t b = 0; b < p.density.size(); ++b) {
                    hist << p.edges[b] << ',' << p.edges[b + 1] << ','
                         << p.density[b];
                    for (const auto& q : qs) hist << ',' << q.density[b];
                    hist << "\n";
                }
                if (a.dump_samples) {
                    metrics::write_measure_samples(
                        a.out + "." + metrics::to_string(spec.measure) +
                            ".samples.csv",
                        spec.measure, real_s);
                }
            }
        } catch (const EmptySamplesError& e) {
            if (explicit_measures) throw;
            std::cerr << "skipping " << metrics::to_string(spec.measure) << " ("
                      << e.what() << ")\n";
        }
    }

    if (!a.out.empty()) {
        scores::write_score_report(a.out + ".scores.csv", report);
        std::cerr << "wrote " << report.rows.size() << " measure rows to "
                  << a.out << ".scores.csv\n";
    } else {
        for (const auto& r : report.rows) {
            std::printf("%s %s kl=%.6g hellinger=%.6g rmse=%.6g pearson=%.6g "
                        "spearman=%.6g\n",
                        r.measure.c_str(), r.model.c_str(), r.scores.kl.mean,
                        r.scores.hellinger.mean, r.scores.rmse.mean,
                        r.scores.pearson.mean, r.scores.spearman.mean);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobility trajectory simulator and evaluation pipeline"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ing = app.add_subcommand("ingest", "preprocess check-in data");
    ing->add_option("--checkins", ingest_args.checkins)->required();
    ing->add_option("--venues", ingest_args.venues)->required();
    ing->add_option("--graph", ingest_args.graph)->required();
    ing->add_option("--bbox", ingest_args.bbox)->required();
    ing->add_option("--start", ingest_args.start)->required();
    ing->add_option("--end", ingest_args.end)->required();
    ing->add_option("--out", ingest_args.out)->required();

    TessellateArgs tess_args;
    auto* tes = app.add_subcommand("tessellate", "build a weighted tessellation");
    tes->add_option("--bbox", tess_args.bbox)->required();
    tes->add_option("--side-m", tess_args.side_m)->required();
    tes->add_option("--points", tess_args.points);
    tes->add_flag("--synthetic-relevance", tess_args.synthetic);
    tes->add_option("--rel-beta", tess_args.rel_beta);
    tes->add_option("--rel-lambda", tess_args.rel_lambda);
    tes->add_option("--exclude", tess_args.exclude);
    tes->add_flag("--filter-relevant", tess_args.filter_rel);
    tes->add_option("--seed", tess_args.seed);
    tes->add_option("--out", tess_args.out)->required();

    TrainDiaryArgs diary_args;
    auto* tdi = app.add_subcommand("train-diary", "train the diary generator");
    tdi->add_option("--traj", diary_args.traj)->required();
    tdi->add_option("--tess", diary_args.tess)->required();
    tdi->add_option("--slot-hours", diary_args.slot_hours);
    tdi->add_option("--out", diary_args.out)->required();

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "generate synthetic trajectories");
    sim->add_option("--model", sim_args.model);
    sim->add_option("--tess", sim_args.tess)->required();
    sim->add_option("--graph", sim_args.graph)->required();
    sim->add_option("--diary", sim_args.diary);
    sim->add_option("--start", sim_args.start);
    sim->add_option("--end", sim_args.end);
    sim->add_option("--runs", sim_args.runs);
    sim->add_option("--rsl", sim_args.rsl);
    auto* speed = sim->add_option("--speed-kmh", sim_args.speed_kmh);
    sim->add_option("--degree-social", sim_args.degree_social);
    auto* nmax = sim->add_option("--n-max", sim_args.n_max);
    sim->add_option("--seed", sim_args.seed);
    sim->add_option("--config", sim_args.config);
    sim->add_option("--out", sim_args.out)->required();

    EvaluateArgs eval_args;
    auto* eva = app.add_subcommand("evaluate", "score synthetic against real");
    eva->add_option("--real", eval_args.real)->required();
    eva->add_option("--synthetic", eval_args.synthetic)
        ->required()
        ->take_all();
    eva->add_option("--measures", eval_args.measures);
    eva->add_option("--bins", eval_args.bins);
    eva->add_option("--graph", eval_args.graph);
    eva->add_option("--wt-mode", eval_args.wt_mode);
    eva->add_option("--label", eval_args.label);
    eva->add_option("--seed", eval_args.seed);
    eva->add_flag("--dump-samples", eval_args.dump_samples);
    eva->add_option("--out", eval_args.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (ing->parsed()) return run_ingest(ingest_args);
        if (tes->parsed()) return run_tessellate(tess_args);
        if (tdi->parsed()) return run_train_diary(diary_args);
        if (sim->parsed()) {
            sim_args.speed_set = speed->count() > 0;
            sim_args.n_max_set = nmax->count() > 0;
            return run_simulate(sim_args);
        }
        if (eva->parsed()) return run_evaluate(eval_args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
