#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mobsim/diary.hpp"
#include "mobsim/location_vector.hpp"
#include "mobsim/random.hpp"
#include "mobsim/social_graph.hpp"
#include "mobsim/tessellation.hpp"
#include "mobsim/trajectory.hpp"

namespace mobsim {

enum class Variant { GeoSim, GeoSimD, GeoSimGravity, StsEpr };

enum class Action {
    ExploreIndividual,
    ExploreSocial,
    ReturnIndividual,
    ReturnSocial,
    HomeReturn,
};

enum class ContactMode { MobilitySimilarity, Degree };

const char* to_string(Variant v);
const char* to_string(Action a);
std::optional<Variant> parse_variant(const std::string& name);

struct ModelConfig {
    Variant variant = Variant::GeoSim;
    double rho = 0.6;
    double gamma = 0.21;
    double alpha = 0.2;
    double wt_beta = 0.8;
    double wt_tau_hours = 17.0;
    double min_wt_hours = 1.0;
    bool rsl = true;
    std::optional<double> reachable_speed_kmh;  // reachable-locations filter, off by default
    bool degree_social_exploration = false;
    int n_max = 5;
    std::uint64_t seed = 0;
    int n_agents = 0;
    std::int64_t start_time = 0;
    std::int64_t end_time = 0;

    // Throws ConfigMismatchError when a parameter is out of range.
    void validate() const;
};

struct AgentState {
    int id = 0;
    LocationVector lv;
    int current = -1;
    int home = -1;
    MobilityDiary diary;
    std::size_t diary_cursor = 0;
    std::set<int> run_used;  // locations mapped in the current run, home included
    std::int64_t last_event = 0;
    std::uint64_t lv_version = 0;

    int distinct_locations() const { return lv.support_size(); }
};

struct MoveOutcome {
    int location = -1;
    Action action = Action::HomeReturn;
    bool explored = false;  // location was unvisited before this move
};

// One simulation over a tessellation and a social graph, both copied in.
// The event loop is single-threaded with a global (time, agent-id) order, so
// identical inputs and seed always produce identical output.
class Simulation {
  public:
    Simulation(const ModelConfig& cfg, const WeightedTessellation& tess,
               const SocialGraph& graph,
               const DiaryGenerator* diary_gen = nullptr);

    // Runs the event loop over [start, end) and returns all records sorted
    // by (uid, timestamp), the initial per-agent records included.
    // Single-shot.
    std::vector<TrajectoryRecord> run();

    // Movement resolution with action correction; selects the action first.
    // dt_hours is the waiting time associated with this displacement.
    MoveOutcome resolve_movement(int agent, double dt_hours);
    // Same, with the initial action forced (correction still applies).
    MoveOutcome resolve_movement(int agent, Action forced, double dt_hours);

    // Applies a resolved move: updates lv, current, run bookkeeping, and
    // appends the trajectory record.
    void apply_move(int agent, const MoveOutcome& outcome, std::int64_t time);

    Action select_action(int agent);
    static Action action_from_draws(double u_explore, double u_social,
                                    int distinct_locations,
                                    const ModelConfig& cfg);
    double exploration_probability(int agent) const;

    double sample_waiting_time();

    // Location selection per action.  The excluded set is honored and the
    // reachable radius (in km) applied when given; nullopt result means no
    // candidate survived.
    std::optional<int> explore_individual(int agent, const std::set<int>& excluded,
                                          std::optional<double> radius_km);
    std::optional<int> return_individual(int agent, const std::set<int>& excluded,
                                         std::optional<double> radius_km);
    std::optional<int> select_contact(int agent, ContactMode mode);
    std::optional<int> explore_social(int agent, int contact,
                                      const std::set<int>& excluded,
                                      std::optional<double> radius_km);
    std::optional<int> return_social(int agent, int contact,
                                     const std::set<int>& excluded,
                                     std::optional<double> radius_km);

    // Candidates within dt_hours * speed_kmh of the agent's position.
    std::vector<int> reachable_subset(int agent, double dt_hours,
                                      double speed_kmh,
                                      std::span<const int> candidates) const;

    const std::vector<AgentState>& agents() const { return agents_; }
    const ModelConfig& config() const { return cfg_; }
    const std::vector<TrajectoryRecord>& records() const { return records_; }
    Rng& rng() { return rng_; }

  private:
    struct Selection {
        std::optional<int> id;
        bool blocked_by_radius = false;  // nonempty set emptied by the radius
    };

    Selection select_explore_individual(int agent, const std::set<int>& excluded,
                                        std::optional<double> radius_km);
    Selection select_return_individual(int agent, const std::set<int>& excluded,
                                       std::optional<double> radius_km);
    Selection select_social(int agent, Action action, const std::set<int>& excluded,
                            std::optional<double> radius_km);
    double contact_weight_similarity(int agent, int contact);
    std::optional<double> resample_larger_waiting_time(double dt_hours);
    std::optional<double> radius_for(double dt_hours) const;
    void reset_run(int agent);

    ModelConfig cfg_;
    WeightedTessellation tess_;
    SocialGraph graph_;
    std::optional<DiaryGenerator> diary_gen_;
    DistanceMatrix dm_;
    Rng rng_;
    std::vector<AgentState> agents_;
    std::vector<std::int64_t> first_event_;  // GeoSim family initial schedule
    std::vector<TrajectoryRecord> records_;
    bool ran_ = false;

    struct SimCacheEntry {
        std::uint64_t ver_a = ~0ull;
        std::uint64_t ver_c = ~0ull;
        double value = 0.0;
    };
    std::vector<std::unordered_map<int, SimCacheEntry>> sim_cache_;
};

}  // namespace mobsim
