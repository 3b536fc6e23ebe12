// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.
#include <array>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mobsim/diary.hpp"
#include "mobsim/engine.hpp"
#include "mobsim/metrics.hpp"
#include "mobsim/scores.hpp"
#include "mobsim/social_graph.hpp"
#include "mobsim/tessellation.hpp"
#include "mobsim/time_util.hpp"
#include "mobsim/trajectory.hpp"
#include "oracles.hpp"

using namespace mobsim;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
    std::printf("%s: criterion %d — %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

constexpr double kDegPerKmEquator = 1.0 / 111.19492664455873;

WeightedTessellation line_world(const std::vector<double>& offsets_km,
                                const std::vector<double>& relevances) {
    std::vector<Location> locs;
    for (std::size_t i = 0; i < offsets_km.size(); ++i) {
        locs.push_back({static_cast<int>(i),
                        {0.0, offsets_km[i] * kDegPerKmEquator},
                        relevances[i]});
    }
    BoundingBox bbox{-0.5, -0.5, 0.5, 0.5 + offsets_km.back() * kDegPerKmEquator};
    return WeightedTessellation(std::move(locs), 0.0, bbox);
}

WeightedTessellation grid_world(int rows, int cols, double side_m,
                                std::vector<double> relevances) {
    const double d_lat = side_m / 111320.0;
    BoundingBox b{0.0, 0.0, rows * d_lat, 0.0};
    const double mid = 0.5 * (b.min_lat + b.max_lat);
    const double d_lng = side_m / (111320.0 * std::cos(deg2rad(mid)));
    b.max_lng = cols * d_lng;
    auto tess = build_squared_tessellation(b, side_m);
    for (std::size_t i = 0; i < relevances.size() && i < tess.size(); ++i) {
        tess.set_relevance(static_cast<int>(i), relevances[i]);
    }
    return tess;
}

DiaryGenerator::Matrix hourly_chain(const std::array<double, 24>& p_other) {
    DiaryGenerator::Matrix m{};
    for (int h = 0; h < 24; ++h) {
        const int nh = (h + 1) % 24;
        for (int x = 0; x < 2; ++x) {
            auto& row = m[static_cast<std::size_t>(
                DiaryGenerator::state_index(h, x == 1))];
            row[static_cast<std::size_t>(DiaryGenerator::state_index(nh, true))] =
                p_other[static_cast<std::size_t>(h)];
            row[static_cast<std::size_t>(DiaryGenerator::state_index(nh, false))] =
                1.0 - p_other[static_cast<std::size_t>(h)];
        }
    }
    return m;
}

std::int64_t base_time() {
    return 1334016000;  // 2012-04-10T00:00:00, a midnight
}

// --------------------------------------------------------------------------
// criterion 1: selection-law oracle on a 5-tile fixture
// --------------------------------------------------------------------------

struct Fixture {
    ModelConfig cfg;
    WeightedTessellation tess;
    SocialGraph graph;
};

bool build_fixture_state(Variant v, const DiaryGenerator* gen, Simulation** out,
                         const WeightedTessellation& tess,
                         const SocialGraph& graph) {
    // find a seed placing agent 0 at tile 0 and agent 1 at tile 1
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        ModelConfig cfg;
        cfg.variant = v;
        cfg.n_agents = 2;
        cfg.rsl = false;
        cfg.seed = seed;
        cfg.start_time = base_time();
        cfg.end_time = base_time() + 14 * 86400;
        auto* sim = new Simulation(cfg, tess, graph, gen);
        if (sim->agents()[0].home == 0 && sim->agents()[1].home == 1) {
            const std::int64_t t = base_time();
            // agent 0: lv = {0:3, 1:1}, run ends at home so nothing but the
            // home tile is excluded under sts-epr
            sim->apply_move(0, {1, Action::ExploreIndividual, true}, t + 3600);
            sim->apply_move(0, {0, Action::ReturnIndividual, false}, t + 7200);
            sim->apply_move(0, {0, Action::HomeReturn, false}, t + 10800);
            // agent 1 (the contact): lv = {1:2, 2:4, 3:1}
            sim->apply_move(1, {2, Action::ExploreIndividual, true}, t + 3600);
            sim->apply_move(1, {3, Action::ExploreIndividual, true}, t + 7200);
            sim->apply_move(1, {2, Action::ReturnIndividual, false}, t + 10800);
            sim->apply_move(1, {2, Action::ReturnIndividual, false}, t + 14400);
            sim->apply_move(1, {2, Action::ReturnIndividual, false}, t + 18000);
            sim->apply_move(1, {1, Action::HomeReturn, false}, t + 21600);
            *out = sim;
            return true;
        }
        delete sim;
    }
    return false;
}

bool criterion1(std::string* detail) {
    const std::vector<double> offsets = {0.0, 1.0, 2.5, 4.0, 7.0};
    const std::vector<double> weights = {1.0, 2.0, 8.0, 4.0, 5.0};
    const auto tess = line_world(offsets, weights);
    SocialGraph graph(2);
    graph.add_edge(0, 1);

    std::array<double, 24> flat{};
    flat.fill(0.0);
    const DiaryGenerator home_only(1.0, hourly_chain(flat));

    // independent distances for the oracle
    std::array<std::array<double, 5>, 5> d{};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                haversine_km({0.0, offsets[static_cast<std::size_t>(i)] *
                                       kDegPerKmEquator},
                             {0.0, offsets[static_cast<std::size_t>(j)] *
                                       kDegPerKmEquator});
        }
    }

    const int n_draws = 200000;
    double worst = 0.0;
    std::string worst_case;

    for (Variant v : {Variant::GeoSim, Variant::GeoSimD, Variant::GeoSimGravity,
                      Variant::StsEpr}) {
        const bool sts = v == Variant::StsEpr;
        Simulation* sim = nullptr;
        if (!build_fixture_state(v, sts ? &home_only : nullptr, &sim, tess,
                                 graph)) {
            *detail = "could not place fixture agents";
            return false;
        }

        // brute-force expected probabilities per action
        std::map<Action, std::map<int, double>> expected;
        {
            // ExploreIndividual over C = {2,3,4}
            std::map<int, double> w;
            for (int i : {2, 3, 4}) {
                const double dist = d[0][static_cast<std::size_t>(i)];
                switch (v) {
                    case Variant::GeoSim: w[i] = 1.0; break;
                    case Variant::GeoSimD: w[i] = 1.0 / dist; break;
                    default:
                        w[i] = weights[static_cast<std::size_t>(i)] / (dist * dist);
                }
            }
            double total = 0.0;
            for (auto& [id, x] : w) total += x;
            for (auto& [id, x] : w) x /= total;
            expected[Action::ExploreIndividual] = w;

            // ReturnIndividual: lv_0 = {0:3, 1:1}; sts excludes the home tile
            if (sts) {
                expected[Action::ReturnIndividual] = {{1, 1.0}};
            } else {
                expected[Action::ReturnIndividual] = {{0, 0.75}, {1, 0.25}};
            }

            // ExploreSocial: exp_0 ∩ ret_1 = {2, 3} weighted by lv_1 = (4, 1)
            expected[Action::ExploreSocial] = {{2, 0.8}, {3, 0.2}};

            // ReturnSocial: ret_0 ∩ ret_1 = {1}
            expected[Action::ReturnSocial] = {{1, 1.0}};
        }

        for (const auto& [action, probs] : expected) {
            std::map<int, int> hits;
            for (int i = 0; i < n_draws; ++i) {
                const auto outcome = sim->resolve_movement(0, action, 1.0);
                hits[outcome.location]++;
            }
            for (const auto& [loc, count] : hits) {
                const double freq = static_cast<double>(count) / n_draws;
                auto it = probs.find(loc);
                const double p = it == probs.end() ? 0.0 : it->second;
                const double err = std::abs(freq - p);
                if (err > worst) {
                    worst = err;
                    worst_case = std::string(to_string(v)) + "/" + to_string(action);
                }
            }
            for (const auto& [loc, p] : probs) {
                if (hits.find(loc) == hits.end() && p > 0.01) {
                    worst = std::max(worst, p);
                    worst_case = std::string(to_string(v)) + "/" +
                                 to_string(action) + " missing location";
                }
            }
        }
        delete sim;
    }
    std::ostringstream ss;
    ss << "max Linf = " << worst << (worst_case.empty() ? "" : " at " + worst_case);
    *detail = ss.str();
    return worst <= 0.01;
}

// --------------------------------------------------------------------------
// criterion 2: exploration probability law over S-deciles
// --------------------------------------------------------------------------

bool criterion2(std::string* detail) {
    std::vector<double> rel(400, 1.0);
    const auto tess = grid_world(20, 20, 1000.0, rel);
    const SocialGraph graph(1);

    std::array<double, 10> observed{};
    std::array<double, 10> expected{};
    std::array<double, 10> variance{};
    std::array<std::int64_t, 10> events{};

    for (int s = 0; s < 500; ++s) {
        ModelConfig cfg;
        cfg.variant = Variant::GeoSim;
        cfg.alpha = 0.0;  // no contacts in a 1-agent world
        cfg.rsl = false;
        cfg.n_agents = 1;
        cfg.seed = static_cast<std::uint64_t>(s);
        cfg.start_time = 0;
        cfg.end_time = 1;
        Simulation sim(cfg, tess, graph);
        std::int64_t t = 0;
        while (sim.agents()[0].distinct_locations() < 200) {
            const int S = sim.agents()[0].distinct_locations();
            const double p = sim.exploration_probability(0);
            const auto outcome = sim.resolve_movement(0, 1.0);
            const std::size_t bucket = static_cast<std::size_t>((S - 1) / 20);
            observed[bucket] += outcome.explored ? 1.0 : 0.0;
            expected[bucket] += p;
            variance[bucket] += p * (1.0 - p);
            events[bucket]++;
            t += 3600;
            sim.apply_move(0, outcome, t);
        }
    }

    double worst_z = 0.0;
    for (std::size_t b = 0; b < 10; ++b) {
        const double sigma = std::sqrt(variance[b]);
        const double z = std::abs(observed[b] - expected[b]) / sigma;
        worst_z = std::max(worst_z, z);
    }
    std::ostringstream ss;
    ss << "worst decile z = " << worst_z << " (99% bound 2.576)";
    *detail = ss.str();
    return worst_z <= 2.576;
}

// --------------------------------------------------------------------------
// criteria 3 and 4: the two truncated power-law samplers
// --------------------------------------------------------------------------

bool criterion3(std::string* detail) {
    const auto tess = line_world({0.0, 1.0}, {1.0, 1.0});
    ModelConfig cfg;
    cfg.variant = Variant::GeoSim;
    cfg.n_agents = 1;
    cfg.rsl = false;
    cfg.seed = 12345;
    cfg.start_time = 0;
    cfg.end_time = 1;
    Simulation sim(cfg, tess, SocialGraph(1));
    std::vector<double> samples;
    samples.reserve(100000);
    bool all_above_min = true;
    for (int i = 0; i < 100000; ++i) {
        const double wt = sim.sample_waiting_time();
        all_above_min = all_above_min && wt >= 1.0;
        samples.push_back(wt);
    }
    const oracles::TruncatedPowerLawCdf cdf(1.0, kWaitingTimeSupportMaxHours, 0.8,
                                            17.0);
    const double ks = oracles::ks_distance(samples, cdf);
    std::ostringstream ss;
    ss << "KS = " << ks << (all_above_min ? "" : ", minimum violated");
    *detail = ss.str();
    return all_above_min && ks < 0.01;
}

bool criterion4(std::string* detail) {
    Rng rng(777);
    const auto samples = sample_synthetic_relevance(100000, 1.25, 104.0, rng);
    const oracles::TruncatedPowerLawCdf cdf(1.0, kRelevanceSupportMax, 1.25,
                                            104.0);
    const double ks = oracles::ks_distance(samples, cdf);
    std::ostringstream ss;
    ss << "KS = " << ks;
    *detail = ss.str();
    return ks < 0.01;
}

// --------------------------------------------------------------------------
// criterion 5: score fixtures and range invariants
// --------------------------------------------------------------------------

scores::BinnedDistribution unit_bins(std::vector<double> density) {
    scores::BinnedDistribution d;
    d.density = std::move(density);
    d.edges.resize(d.density.size() + 1);
    for (std::size_t i = 0; i < d.edges.size(); ++i) {
        d.edges[i] = static_cast<double>(i);
    }
    return d;
}

bool criterion5(std::string* detail) {
    double worst = 0.0;
    const auto check = [&](double got, double want) {
        worst = std::max(worst, std::abs(got - want));
    };

    const auto identical =
        scores::compute_scores(unit_bins({0.3, 0.4, 0.3}), unit_bins({0.3, 0.4, 0.3}));
    check(identical.rmse, 0.0);
    check(identical.kl, 0.0);
    check(identical.hellinger, 0.0);
    check(identical.pearson, 1.0);
    check(identical.spearman, 1.0);

    const auto disjoint =
        scores::compute_scores(unit_bins({1.0, 0.0}), unit_bins({0.0, 1.0}));
    check(disjoint.hellinger, 1.0);
    check(disjoint.rmse, 1.0);

    const auto kl =
        scores::compute_scores(unit_bins({0.5, 0.5}), unit_bins({0.25, 0.75}));
    check(kl.kl, 0.1438410362258905);

    const auto reversed = scores::compute_scores(
        unit_bins({0.1, 0.2, 0.3, 0.4}), unit_bins({0.4, 0.3, 0.2, 0.1}));
    check(reversed.spearman, -1.0);
    check(reversed.pearson, -1.0);

    bool fixtures_ok = worst <= 1e-6;

    // range invariants over random distribution pairs
    Rng rng(31337);
    bool ranges_ok = true;
    for (int trial = 0; trial < 10000 && ranges_ok; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(16);
        std::vector<double> p(n), q(n);
        double sp = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.u01() < 0.25 ? 0.0 : rng.u01();
            q[i] = rng.u01() < 0.25 ? 0.0 : rng.u01();
            sp += p[i];
            sq += q[i];
        }
        if (sp == 0.0) p[0] = sp = 1.0;
        if (sq == 0.0) q[0] = sq = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        const auto s = scores::compute_scores(unit_bins(p), unit_bins(q));
        ranges_ok = s.kl >= 0.0 && s.hellinger >= -1e-12 &&
                    s.hellinger <= 1.0 + 1e-12 && s.pearson >= -1.0 - 1e-12 &&
                    s.pearson <= 1.0 + 1e-12 && s.spearman >= -1.0 - 1e-12 &&
                    s.spearman <= 1.0 + 1e-12;
    }

    std::ostringstream ss;
    ss << "fixture max err = " << worst << ", ranges "
       << (ranges_ok ? "hold" : "violated") << " on 10^4 pairs";
    *detail = ss.str();
    return fixtures_ok && ranges_ok;
}

// --------------------------------------------------------------------------
// criterion 6: determinism, including across parallel-run counts
// --------------------------------------------------------------------------

std::string run_to_csv(const ModelConfig& cfg, const WeightedTessellation& tess,
                       const SocialGraph& graph, const DiaryGenerator* gen) {
    Simulation sim(cfg, tess, graph, gen);
    const auto records = sim.run();
    std::ostringstream out;
    out << "uid,lat,lng,timestamp\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,", r.uid, r.point.lat,
                      r.point.lng);
        out << buf << format_iso8601(r.timestamp) << "\n";
    }
    return out.str();
}

bool criterion6(std::string* detail) {
    std::vector<double> rel;
    Rng relrng(5);
    for (int i = 0; i < 100; ++i) {
        rel.push_back(sample_truncated_power_law(relrng, 1.0, kRelevanceSupportMax,
                                                 1.25, 104.0));
    }
    const auto tess = grid_world(10, 10, 1000.0, rel);
    SocialGraph graph(8);
    for (int i = 0; i < 8; ++i) graph.add_edge(i, (i + 1) % 8);
    graph.add_edge(0, 4);

    std::array<double, 24> p{};
    for (int h = 9; h <= 19; ++h) p[static_cast<std::size_t>(h)] = 0.4;
    const DiaryGenerator gen(1.0, hourly_chain(p));

    for (Variant v : {Variant::GeoSimGravity, Variant::StsEpr}) {
        ModelConfig cfg;
        cfg.variant = v;
        cfg.n_agents = 8;
        cfg.seed = 99;
        cfg.start_time = base_time();
        cfg.end_time = base_time() + 7 * 86400;
        const DiaryGenerator* g = v == Variant::StsEpr ? &gen : nullptr;

        // same seed, two sequential executions
        if (run_to_csv(cfg, tess, graph, g) != run_to_csv(cfg, tess, graph, g)) {
            *detail = std::string("sequential rerun differs for ") + to_string(v);
            return false;
        }

        // multi-run: sequential vs fully concurrent must agree per seed
        std::vector<std::string> sequential;
        for (int r = 0; r < 4; ++r) {
            ModelConfig rc = cfg;
            rc.seed = cfg.seed + static_cast<std::uint64_t>(r);
            sequential.push_back(run_to_csv(rc, tess, graph, g));
        }
        std::vector<std::future<std::string>> futures;
        for (int r = 0; r < 4; ++r) {
            ModelConfig rc = cfg;
            rc.seed = cfg.seed + static_cast<std::uint64_t>(r);
            futures.push_back(std::async(std::launch::async, [rc, &tess, &graph,
                                                              g] {
                return run_to_csv(rc, tess, graph, g);
            }));
        }
        for (int r = 0; r < 4; ++r) {
            if (futures[static_cast<std::size_t>(r)].get() !=
                sequential[static_cast<std::size_t>(r)]) {
                *detail = std::string("parallel run ") + std::to_string(r) +
                          " differs for " + to_string(v);
                return false;
            }
        }
    }
    *detail = "byte-identical across reruns and parallel-run counts";
    return true;
}

// --------------------------------------------------------------------------
// criterion 7: structural invariants over 1,000 sts-epr runs
// --------------------------------------------------------------------------

bool criterion7(std::string* detail) {
    std::vector<double> rel = {4.0, 1.0, 2.0, 7.0, 1.0, 3.0, 1.0, 5.0, 2.0, 1.0};
    const auto tess = grid_world(2, 5, 1000.0, rel);
    SocialGraph graph(5);
    graph.add_edge(0, 1);
    graph.add_edge(1, 2);
    graph.add_edge(2, 3);
    graph.add_edge(3, 4);
    graph.add_edge(0, 4);

    std::array<double, 24> p{};
    for (int h = 0; h < 24; ++h) p[static_cast<std::size_t>(h)] = 0.45;
    const DiaryGenerator gen(1.0, hourly_chain(p));

    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        ModelConfig cfg;
        cfg.variant = Variant::StsEpr;
        cfg.n_agents = 5;
        cfg.seed = seed;
        cfg.start_time = base_time();
        cfg.end_time = base_time() + 7 * 86400;
        Simulation sim(cfg, tess, graph, &gen);
        const auto records = sim.run();

        // conservation
        std::map<int, std::int64_t> per_uid;
        for (const auto& r : records) per_uid[r.uid]++;
        for (const auto& st : sim.agents()) {
            if (st.lv.total() != per_uid[st.id] ||
                st.distinct_locations() !=
                    static_cast<int>(st.lv.counts().size())) {
                *detail = "conservation violated at seed " + std::to_string(seed);
                return false;
            }
        }

        // run injectivity on the output
        bool ok = true;
        for_each_user(records, [&](int uid, std::span<const TrajectoryRecord> user) {
            const auto& home =
                tess.location(sim.agents()[static_cast<std::size_t>(uid)].home)
                    .centroid;
            std::set<std::pair<double, double>> seen;
            for (const auto& r : user) {
                if (r.point.lat == home.lat && r.point.lng == home.lng) {
                    seen.clear();
                    continue;
                }
                const auto key = std::make_pair(r.point.lat, r.point.lng);
                if (seen.count(key)) ok = false;
                seen.insert(key);
            }
        });
        if (!ok) {
            *detail = "run injectivity violated at seed " + std::to_string(seed);
            return false;
        }
    }
    *detail = "1,000 runs: conservation, injectivity, termination";
    return true;
}

// --------------------------------------------------------------------------
// criterion 8: qualitative shape on a synthetic desk-scale scenario
// --------------------------------------------------------------------------

// commuter-style training data with midday and evening excursions
std::vector<TrajectoryRecord> commuter_records(const WeightedTessellation& tess,
                                               int n_users, int n_days,
                                               Rng& rng) {
    std::vector<TrajectoryRecord> recs;
    const int n_tiles = static_cast<int>(tess.size());
    for (int u = 0; u < n_users; ++u) {
        const int home = static_cast<int>(rng.uniform_index(
            static_cast<std::size_t>(n_tiles)));
        int work = home;
        while (work == home) {
            work = static_cast<int>(
                rng.uniform_index(static_cast<std::size_t>(n_tiles)));
        }
        for (int d = 0; d < n_days; ++d) {
            for (int h = 0; h < 24; ++h) {
                int tile;
                if (h >= 9 && h <= 17) {
                    tile = work;
                    if (h == 12 && rng.u01() < 0.55) {
                        tile = static_cast<int>(
                            rng.uniform_index(static_cast<std::size_t>(n_tiles)));
                    }
                } else {
                    tile = home;
                    if ((h == 19 || h == 20) && rng.u01() < 0.3) {
                        tile = static_cast<int>(
                            rng.uniform_index(static_cast<std::size_t>(n_tiles)));
                    }
                }
                recs.push_back({u, tess.location(tile).centroid,
                                base_time() + (static_cast<std::int64_t>(d) * 24 +
                                               h) * 3600});
            }
        }
    }
    sort_trajectories(recs);
    return recs;
}

// rank correlation of bin index vs probability density (mass per km)
double spearman_of_log_density(const scores::BinnedDistribution& d) {
    std::vector<double> idx(d.density.size());
    std::vector<double> density(d.density.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = static_cast<double>(i);
        density[i] = d.density[i] / (d.edges[i + 1] - d.edges[i]);
    }
    return scores::spearman_correlation(idx, density);
}

bool criterion8(std::string* detail) {
    // synthetic world: 20x20 tiles, 1 km side, power-law relevance
    Rng relrng(2025);
    const auto weights = sample_synthetic_relevance(400, 1.25, 104.0, relrng);
    const auto tess = grid_world(20, 20, 1000.0, weights);

    // 100 agents on a ring with random chords
    SocialGraph graph(100);
    Rng graphrng(71);
    for (int i = 0; i < 100; ++i) graph.add_edge(i, (i + 1) % 100);
    for (int e = 0; e < 120; ++e) {
        const int u = static_cast<int>(graphrng.uniform_index(100));
        const int v = static_cast<int>(graphrng.uniform_index(100));
        if (u != v) graph.add_edge(u, v);
    }

    const std::int64_t start = base_time();
    const std::int64_t end = start + 14 * 86400;

    const auto simulate = [&](Variant v, const DiaryGenerator* gen) {
        ModelConfig cfg;
        cfg.variant = v;
        cfg.n_agents = 100;
        cfg.seed = 424242;
        cfg.start_time = start;
        cfg.end_time = end;
        Simulation sim(cfg, tess, graph, gen);
        return sim.run();
    };

    // (a) jump-length monotonicity under the gravity law, violated by the
    // uniform-exploration baseline
    const auto gravity_records = simulate(Variant::GeoSimGravity, nullptr);
    const auto baseline_records = simulate(Variant::GeoSim, nullptr);

    // bins wide enough to average over the grid's quantized distance
    // spectrum, which would otherwise leave empty small-distance bins
    const scores::BinScheme log10{scores::BinScheme::Kind::Log, 10, {}};
    const auto gravity_jumps = metrics::jump_lengths(gravity_records);
    const auto baseline_jumps = metrics::jump_lengths(baseline_records);
    const auto gravity_density = scores::bin_samples(
        gravity_jumps, scores::make_edges(gravity_jumps, log10));
    const auto baseline_density = scores::bin_samples(
        baseline_jumps, scores::make_edges(baseline_jumps, log10));
    const double rho_gravity = spearman_of_log_density(gravity_density);
    const double rho_baseline = spearman_of_log_density(baseline_density);
    const bool shape_ok = rho_gravity <= -0.9 && rho_baseline > -0.9;

    // (b) circadian rhythm: sts-epr follows the diary generator, the
    // waiting-time models stay near-uniform
    Rng commuter_rng(9000);
    const auto training = commuter_records(tess, 40, 28, commuter_rng);
    const auto gen = train_diary_generator(training, tess);

    const auto sts_records = simulate(Variant::StsEpr, &gen);
    const auto sts_activity = metrics::activity_per_hour(sts_records);

    // the generator's own hourly movement distribution, Monte-Carlo
    std::array<double, 24> gen_hours{};
    {
        Rng mc(31415);
        std::int64_t entries = 0;
        for (int rep = 0; rep < 40; ++rep) {
            const auto diary =
                gen.generate(start, start + 5000LL * 3600LL, mc);
            for (std::size_t i = 1; i < diary.entries.size(); ++i) {
                gen_hours[static_cast<std::size_t>(
                    hour_of_day(diary.entries[i].time))] += 1.0;
                ++entries;
            }
        }
        for (auto& v : gen_hours) v /= static_cast<double>(entries);
    }

    scores::BinnedDistribution gen_dist = unit_bins(
        std::vector<double>(gen_hours.begin(), gen_hours.end()));
    scores::BinnedDistribution sts_dist = unit_bins(std::vector<double>(
        sts_activity.density.begin(), sts_activity.density.end()));
    const double kl_sts = scores::compute_scores(gen_dist, sts_dist).kl;

    bool uniform_ok = true;
    double worst_uniform_dev = 0.0;
    for (Variant v : {Variant::GeoSim, Variant::GeoSimD, Variant::GeoSimGravity}) {
        const auto records =
            v == Variant::GeoSim
                ? baseline_records
                : (v == Variant::GeoSimGravity ? gravity_records
                                               : simulate(v, nullptr));
        const auto activity = metrics::activity_per_hour(records);
        for (double dd : activity.density) {
            worst_uniform_dev = std::max(worst_uniform_dev,
                                         std::abs(dd - 1.0 / 24.0));
        }
    }
    uniform_ok = worst_uniform_dev <= 0.02;

    const bool rhythm_ok = kl_sts < 0.05;

    std::ostringstream ss;
    ss << "jump spearman gravity = " << rho_gravity << ", baseline = "
       << rho_baseline << "; sts activity KL = " << kl_sts
       << "; waiting-time-model hourly dev = " << worst_uniform_dev;
    *detail = ss.str();
    return shape_ok && rhythm_ok && uniform_ok;
}

}  // namespace

int main() {
    std::string detail;

    bool ok = criterion1(&detail);
    report(1, "selection-law oracle equivalence", ok, detail);

    ok = criterion2(&detail);
    report(2, "exploration-probability law", ok, detail);

    ok = criterion3(&detail);
    report(3, "waiting-time sampler vs quadrature CDF", ok, detail);

    ok = criterion4(&detail);
    report(4, "synthetic-relevance sampler vs quadrature CDF", ok, detail);

    ok = criterion5(&detail);
    report(5, "score fixtures and range invariants", ok, detail);

    ok = criterion6(&detail);
    report(6, "determinism across reruns and parallel-run counts", ok, detail);

    ok = criterion7(&detail);
    report(7, "structural invariants over 1,000 sts-epr runs", ok, detail);

    ok = criterion8(&detail);
    report(8, "qualitative shape reproduction", ok, detail);

    std::printf("SKIP: criterion 9 — dataset-gated targets (requires the public "
                "check-in dump; see README)\n");

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
