#include "mobsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>

#include "mobsim/errors.hpp"

namespace mobsim {

namespace {

const std::set<int> kNoExclusions;

bool is_exploration(Action a) {
    return a == Action::ExploreIndividual || a == Action::ExploreSocial;
}

}  // namespace

const char* to_string(Variant v) {
    switch (v) {
        case Variant::GeoSim: return "geosim";
        case Variant::GeoSimD: return "geosim-d";
        case Variant::GeoSimGravity: return "geosim-gravity";
        case Variant::StsEpr: return "sts-epr";
    }
    return "?";
}

const char* to_string(Action a) {
    switch (a) {
        case Action::ExploreIndividual: return "explore-individual";
        case Action::ExploreSocial: return "explore-social";
        case Action::ReturnIndividual: return "return-individual";
        case Action::ReturnSocial: return "return-social";
        case Action::HomeReturn: return "home-return";
    }
    return "?";
}

std::optional<Variant> parse_variant(const std::string& name) {
    if (name == "geosim") return Variant::GeoSim;
    if (name == "geosim-d") return Variant::GeoSimD;
    if (name == "geosim-gravity") return Variant::GeoSimGravity;
    if (name == "sts-epr") return Variant::StsEpr;
    return std::nullopt;
}

void ModelConfig::validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigMismatchError("rho must be in (0,1]");
    if (gamma < 0.0) throw ConfigMismatchError("gamma must be >= 0");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigMismatchError("alpha must be in [0,1]");
    if (!(min_wt_hours > 0.0)) throw ConfigMismatchError("min_wt_hours must be > 0");
    if (!(wt_tau_hours > 0.0)) throw ConfigMismatchError("wt_tau_hours must be > 0");
    if (n_max < 1) throw ConfigMismatchError("n_max must be >= 1");
    if (n_agents <= 0) throw ConfigMismatchError("n_agents must be > 0");
    if (end_time < start_time) throw ConfigMismatchError("end before start");
    if (reachable_speed_kmh && !(*reachable_speed_kmh > 0.0)) {
        throw ConfigMismatchError("reachable speed must be > 0");
    }
}

Simulation::Simulation(const ModelConfig& cfg, const WeightedTessellation& tess,
                       const SocialGraph& graph, const DiaryGenerator* diary_gen)
    : cfg_(cfg),
      tess_(tess),
      graph_(graph),
      dm_(tess_),
      rng_(cfg.seed) {
    if (diary_gen != nullptr) diary_gen_ = *diary_gen;
    cfg_.validate();
    if (graph_.node_count() != static_cast<std::size_t>(cfg_.n_agents)) {
        throw ConfigMismatchError("social graph has " +
                                  std::to_string(graph_.node_count()) +
                                  " nodes but n_agents is " +
                                  std::to_string(cfg_.n_agents));
    }
    if (cfg_.variant == Variant::StsEpr && !diary_gen_) {
        throw ConfigMismatchError("sts-epr requires a diary generator");
    }
    if (tess_.size() == 0) throw ConfigMismatchError("tessellation is empty");

    std::vector<double> relevances;
    if (cfg_.rsl) {
        relevances.reserve(tess_.size());
        double total = 0.0;
        for (const auto& l : tess_.locations()) {
            relevances.push_back(l.relevance);
            total += l.relevance;
        }
        if (!(total > 0.0)) {
            throw ConfigMismatchError("rsl requires positive total relevance");
        }
    }

    agents_.resize(static_cast<std::size_t>(cfg_.n_agents));
    sim_cache_.resize(agents_.size());
    first_event_.assign(agents_.size(), 0);
    records_.reserve(agents_.size());
    for (int a = 0; a < cfg_.n_agents; ++a) {
        AgentState& st = agents_[static_cast<std::size_t>(a)];
        st.id = a;
        const int start = cfg_.rsl
                              ? static_cast<int>(pick_weighted(rng_, relevances))
                              : static_cast<int>(rng_.uniform_index(tess_.size()));
        st.current = st.home = start;
        st.lv.add(start);
        st.lv_version = 1;
        st.run_used = {start};
        st.last_event = cfg_.start_time;
        records_.push_back({a, tess_.location(start).centroid, cfg_.start_time});
        if (cfg_.variant == Variant::StsEpr) {
            st.diary = diary_gen_->generate(cfg_.start_time, cfg_.end_time, rng_);
            st.diary_cursor = 1;  // entry 0 is the initial home record
        } else {
            const double wt = sample_waiting_time();
            first_event_[static_cast<std::size_t>(a)] =
                cfg_.start_time + static_cast<std::int64_t>(std::llround(wt * 3600.0));
        }
    }
}

double Simulation::exploration_probability(int agent) const {
    const auto& st = agents_[static_cast<std::size_t>(agent)];
    return cfg_.rho * std::pow(static_cast<double>(st.distinct_locations()),
                               -cfg_.gamma);
}

Action Simulation::action_from_draws(double u_explore, double u_social,
                                     int distinct_locations,
                                     const ModelConfig& cfg) {
    const double p_exp =
        cfg.rho * std::pow(static_cast<double>(distinct_locations), -cfg.gamma);
    const bool explore = u_explore < p_exp;
    const bool social = u_social < cfg.alpha;
    if (explore) {
        return social ? Action::ExploreSocial : Action::ExploreIndividual;
    }
    return social ? Action::ReturnSocial : Action::ReturnIndividual;
}

Action Simulation::select_action(int agent) {
    const double u_explore = rng_.u01();
    const double u_social = rng_.u01();
    return action_from_draws(u_explore, u_social,
                             agents_[static_cast<std::size_t>(agent)].distinct_locations(),
                             cfg_);
}

double Simulation::sample_waiting_time() {
    return sample_truncated_power_law(rng_, cfg_.min_wt_hours,
                                      kWaitingTimeSupportMaxHours, cfg_.wt_beta,
                                      cfg_.wt_tau_hours);
}

std::optional<double> Simulation::radius_for(double dt_hours) const {
    if (!cfg_.reachable_speed_kmh) return std::nullopt;
    return dt_hours * *cfg_.reachable_speed_kmh;
}

std::vector<int> Simulation::reachable_subset(int agent, double dt_hours,
                                              double speed_kmh,
                                              std::span<const int> candidates) const {
    const double dist_max = dt_hours * speed_kmh;
    const int from = agents_[static_cast<std::size_t>(agent)].current;
    std::vector<int> out;
    for (int id : candidates) {
        if (dm_.lookup(from, id) <= dist_max) out.push_back(id);
    }
    return out;
}

Simulation::Selection Simulation::select_explore_individual(
    int agent, const std::set<int>& excluded, std::optional<double> radius_km) {
    const auto& st = agents_[static_cast<std::size_t>(agent)];
    const int n = static_cast<int>(tess_.size());
    std::vector<int> ids;
    std::vector<double> weights;
    bool any_before_radius = false;
    for (int i = 0; i < n; ++i) {
        if (st.lv.contains(i)) continue;
        if (excluded.count(i)) continue;
        any_before_radius = true;
        double d = 0.0;
        if (cfg_.variant != Variant::GeoSim || radius_km) {
            d = dm_.lookup(st.current, i);
        }
        if (radius_km && d > *radius_km) continue;
        double w = 1.0;
        switch (cfg_.variant) {
            case Variant::GeoSim:
                w = 1.0;
                break;
            case Variant::GeoSimD:
                w = 1.0 / std::max(d, 1e-9);
                break;
            case Variant::GeoSimGravity:
            case Variant::StsEpr:
                // Gravity weight w_i * w_j / d^2; the current tile's
                // relevance w_j is a common factor and cancels.
                w = tess_.location(i).relevance / std::max(d * d, 1e-18);
                break;
        }
        if (w <= 0.0) continue;
        ids.push_back(i);
        weights.push_back(w);
    }
    if (ids.empty()) {
        return {std::nullopt, any_before_radius};
    }
    return {ids[pick_weighted(rng_, weights)], false};
}

Simulation::Selection Simulation::select_return_individual(
    int agent, const std::set<int>& excluded, std::optional<double> radius_km) {
    const auto& st = agents_[static_cast<std::size_t>(agent)];
    std::vector<int> ids;
    std::vector<double> weights;
    bool any_before_radius = false;
    for (const auto& [id, count] : st.lv.counts()) {
        if (excluded.count(id)) continue;
        any_before_radius = true;
        if (radius_km && dm_.lookup(st.current, id) > *radius_km) continue;
        ids.push_back(id);
        weights.push_back(static_cast<double>(count));
    }
    if (ids.empty()) return {std::nullopt, any_before_radius};
    return {ids[pick_weighted(rng_, weights)], false};
}

double Simulation::contact_weight_similarity(int agent, int contact) {
    auto& entry = sim_cache_[static_cast<std::size_t>(agent)][contact];
    const auto& sa = agents_[static_cast<std::size_t>(agent)];
    const auto& sc = agents_[static_cast<std::size_t>(contact)];
    if (entry.ver_a != sa.lv_version || entry.ver_c != sc.lv_version) {
        entry.ver_a = sa.lv_version;
        entry.ver_c = sc.lv_version;
        entry.value = mobility_similarity(sa.lv, sc.lv);
    }
    return entry.value;
}

std::optional<int> Simulation::select_contact(int agent, ContactMode mode) {
    const auto& nb = graph_.neighbors(agent);
    if (nb.empty()) return std::nullopt;
    std::vector<double> weights(nb.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
        weights[i] = mode == ContactMode::Degree
                         ? static_cast<double>(graph_.degree(nb[i]))
                         : contact_weight_similarity(agent, nb[i]);
        total += weights[i];
    }
    if (total <= 0.0) {
        // Nothing to weight by yet: uniform over the neighbors.
        std::fill(weights.begin(), weights.end(), 1.0);
    }
    return nb[pick_weighted(rng_, weights)];
}

Simulation::Selection Simulation::select_social(int agent, Action action,
                                                const std::set<int>& excluded,
                                                std::optional<double> radius_km) {
    const ContactMode mode =
        (action == Action::ExploreSocial && cfg_.degree_social_exploration)
            ? ContactMode::Degree
            : ContactMode::MobilitySimilarity;
    const auto contact = select_contact(agent, mode);
    if (!contact) return {std::nullopt, false};

    const auto& sa = agents_[static_cast<std::size_t>(agent)];
    const auto& sc = agents_[static_cast<std::size_t>(*contact)];
    std::vector<int> ids;
    std::vector<double> weights;
    bool any_before_radius = false;
    for (const auto& [id, count] : sc.lv.counts()) {
        const bool in_set = action == Action::ExploreSocial ? !sa.lv.contains(id)
                                                            : sa.lv.contains(id);
        if (!in_set) continue;
        if (excluded.count(id)) continue;
        any_before_radius = true;
        if (radius_km && dm_.lookup(sa.current, id) > *radius_km) continue;
        ids.push_back(id);
        weights.push_back(static_cast<double>(count));
    }
    if (ids.empty()) return {std::nullopt, any_before_radius};
    return {ids[pick_weighted(rng_, weights)], false};
}

std::optional<int> Simulation::explore_individual(int agent,
                                                  const std::set<int>& excluded,
                                                  std::optional<double> radius_km) {
    return select_explore_individual(agent, excluded, radius_km).id;
}

std::optional<int> Simulation::return_individual(int agent,
                                                 const std::set<int>& excluded,
                                                 std::optional<double> radius_km) {
    return select_return_individual(agent, excluded, radius_km).id;
}

std::optional<int> Simulation::explore_social(int agent, int contact,
                                              const std::set<int>& excluded,
                                              std::optional<double> radius_km) {
    const auto& sa = agents_[static_cast<std::size_t>(agent)];
    const auto& sc = agents_[static_cast<std::size_t>(contact)];
    std::vector<int> ids;
    std::vector<double> weights;
    for (const auto& [id, count] : sc.lv.counts()) {
        if (sa.lv.contains(id) || excluded.count(id)) continue;
        if (radius_km && dm_.lookup(sa.current, id) > *radius_km) continue;
        ids.push_back(id);
        weights.push_back(static_cast<double>(count));
    }
    if (ids.empty()) return std::nullopt;
    return ids[pick_weighted(rng_, weights)];
}

std::optional<int> Simulation::return_social(int agent, int contact,
                                             const std::set<int>& excluded,
                                             std::optional<double> radius_km) {
    const auto& sa = agents_[static_cast<std::size_t>(agent)];
    const auto& sc = agents_[static_cast<std::size_t>(contact)];
    std::vector<int> ids;
    std::vector<double> weights;
    for (const auto& [id, count] : sc.lv.counts()) {
        if (!sa.lv.contains(id) || excluded.count(id)) continue;
        if (radius_km && dm_.lookup(sa.current, id) > *radius_km) continue;
        ids.push_back(id);
        weights.push_back(static_cast<double>(count));
    }
    if (ids.empty()) return std::nullopt;
    return ids[pick_weighted(rng_, weights)];
}

std::optional<double> Simulation::resample_larger_waiting_time(double dt_hours) {
    // Waiting-time law conditioned on exceeding the current value, realized
    // by resampling; bounded attempts so correction can proceed.
    for (int i = 0; i < 50; ++i) {
        const double wt = sample_waiting_time();
        if (wt > dt_hours) return wt;
    }
    return std::nullopt;
}

MoveOutcome Simulation::resolve_movement(int agent, double dt_hours) {
    return resolve_movement(agent, select_action(agent), dt_hours);
}

MoveOutcome Simulation::resolve_movement(int agent, Action forced,
                                         double dt_hours) {
    const bool sts = cfg_.variant == Variant::StsEpr;
    const auto& st = agents_[static_cast<std::size_t>(agent)];
    const std::set<int>& excluded = sts ? st.run_used : kNoExclusions;

    // Correction chain: a failed social action falls back to the individual
    // action with the same mechanism (GeoSim family goes straight to the
    // individual return); a failed individual action falls back to its
    // complement; when everything fails the agent returns home.
    std::vector<Action> chain;
    switch (forced) {
        case Action::ExploreIndividual:
            chain = {Action::ExploreIndividual, Action::ReturnIndividual};
            break;
        case Action::ExploreSocial:
            chain = sts ? std::vector<Action>{Action::ExploreSocial,
                                              Action::ExploreIndividual,
                                              Action::ReturnIndividual}
                        : std::vector<Action>{Action::ExploreSocial,
                                              Action::ReturnIndividual};
            break;
        case Action::ReturnIndividual:
            chain = sts ? std::vector<Action>{Action::ReturnIndividual,
                                              Action::ExploreIndividual}
                        : std::vector<Action>{Action::ReturnIndividual};
            break;
        case Action::ReturnSocial:
            chain = sts ? std::vector<Action>{Action::ReturnSocial,
                                              Action::ReturnIndividual,
                                              Action::ExploreIndividual}
                        : std::vector<Action>{Action::ReturnSocial,
                                              Action::ReturnIndividual};
            break;
        case Action::HomeReturn:
            return {st.home, Action::HomeReturn, false};
    }

    double dt = dt_hours;
    bool radius_retries_spent = false;
    std::size_t i = 0;
    while (i < chain.size()) {
        const Action step = chain[i];
        Selection sel;
        switch (step) {
            case Action::ExploreIndividual:
                sel = select_explore_individual(agent, excluded, radius_for(dt));
                break;
            case Action::ReturnIndividual:
                sel = select_return_individual(agent, excluded, radius_for(dt));
                break;
            case Action::ExploreSocial:
            case Action::ReturnSocial:
                sel = select_social(agent, step, excluded, radius_for(dt));
                break;
            default:
                sel = {};
        }
        if (sel.id) {
            return {*sel.id, step, is_exploration(step)};
        }
        if (is_exploration(step) && sel.blocked_by_radius &&
            cfg_.reachable_speed_kmh && !radius_retries_spent) {
            // Candidates exist but none is reachable: grow the waiting time
            // and retry the individual exploration, a bounded number of
            // times, before correcting to a return.
            radius_retries_spent = true;
            bool resolved = false;
            int picked = -1;
            for (int k = 0; k < cfg_.n_max; ++k) {
                const auto grown = resample_larger_waiting_time(dt);
                if (!grown) break;
                dt = *grown;
                const auto retry =
                    select_explore_individual(agent, excluded, radius_for(dt));
                if (retry.id) {
                    resolved = true;
                    picked = *retry.id;
                    break;
                }
            }
            if (resolved) {
                return {picked, Action::ExploreIndividual, true};
            }
            // Skip ahead to the individual return if the chain still has one.
            std::size_t next = i + 1;
            while (next < chain.size() && chain[next] != Action::ReturnIndividual) {
                ++next;
            }
            i = next < chain.size() ? next : i + 1;
            // Skip a duplicate explore-individual step already covered above.
            while (i < chain.size() && chain[i] == Action::ExploreIndividual) ++i;
            continue;
        }
        ++i;
    }

    if (!sts) {
        // The individual return cannot fail here: nothing is excluded and the
        // current location is at distance zero.
        assert(false && "return-individual failed outside sts-epr");
    }
    return {st.home, Action::HomeReturn, false};
}

void Simulation::reset_run(int agent) {
    auto& st = agents_[static_cast<std::size_t>(agent)];
    st.run_used = {st.home};
}

void Simulation::apply_move(int agent, const MoveOutcome& outcome,
                            std::int64_t time) {
    auto& st = agents_[static_cast<std::size_t>(agent)];
    st.lv.add(outcome.location);
    ++st.lv_version;
    st.current = outcome.location;
    if (cfg_.variant == Variant::StsEpr) {
        if (outcome.action == Action::HomeReturn) {
            reset_run(agent);  // the run splits here
        } else {
            st.run_used.insert(outcome.location);
        }
    }
    records_.push_back({agent, tess_.location(outcome.location).centroid, time});
    st.last_event = time;
}

std::vector<TrajectoryRecord> Simulation::run() {
    if (ran_) throw ConfigMismatchError("simulation already ran");
    ran_ = true;

    using Event = std::pair<std::int64_t, int>;  // (time, agent)
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue;

    if (cfg_.variant == Variant::StsEpr) {
        for (auto& st : agents_) {
            if (st.diary_cursor < st.diary.entries.size()) {
                queue.emplace(st.diary.entries[st.diary_cursor].time, st.id);
            }
        }
    } else {
        for (auto& st : agents_) {
            queue.emplace(first_event_[static_cast<std::size_t>(st.id)], st.id);
        }
    }

    while (!queue.empty()) {
        const auto [t, agent] = queue.top();
        queue.pop();
        if (t >= cfg_.end_time) continue;
        auto& st = agents_[static_cast<std::size_t>(agent)];
        const double dt_hours =
            static_cast<double>(t - st.last_event) / 3600.0;

        if (cfg_.variant == Variant::StsEpr) {
            const DiaryEntry entry = st.diary.entries[st.diary_cursor];
            if (entry.abstract_id == 0) {
                apply_move(agent, {st.home, Action::HomeReturn, false}, t);
            } else {
                apply_move(agent, resolve_movement(agent, dt_hours), t);
            }
            ++st.diary_cursor;
            if (st.diary_cursor < st.diary.entries.size()) {
                queue.emplace(st.diary.entries[st.diary_cursor].time, agent);
            }
        } else {
            apply_move(agent, resolve_movement(agent, dt_hours), t);
            const double wt = sample_waiting_time();
            const std::int64_t next =
                t + static_cast<std::int64_t>(std::llround(wt * 3600.0));
            if (next < cfg_.end_time) queue.emplace(next, agent);
        }
    }

    std::vector<TrajectoryRecord> out = records_;
    sort_trajectories(out);
    return out;
}

}  // namespace mobsim
