#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(MOBSIM_CLI_PATH) + " " + args + " >cli_stdout.log 2>cli_stderr.log";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool exists(const std::string& path) {
    std::ifstream in(path);
    return in.good();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// measure -> score -> mean
std::map<std::string, std::map<std::string, double>> parse_report(
    const std::string& path) {
    std::map<std::string, std::map<std::string, double>> rows;
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("measure,", 0) == 0) {
            continue;
        }
        std::istringstream ss(line);
        std::string measure, model, score, mean, std_s;
        REQUIRE(std::getline(ss, measure, ','));
        REQUIRE(std::getline(ss, model, ','));
        REQUIRE(std::getline(ss, score, ','));
        REQUIRE(std::getline(ss, mean, ','));
        REQUIRE(std::getline(ss, std_s));
        rows[measure][score] = std::stod(mean);
    }
    return rows;
}

const char* kBBox = "0.0,0.0,0.06,0.06";

}  // namespace

TEST_CASE("cli workflow") {
    // a small synthetic world shared by the subcases below
    REQUIRE(run_cli(std::string("tessellate --bbox ") + kBBox +
                    " --side-m 1000 --synthetic-relevance --seed 4 "
                    "--out cli_tess.csv") == 0);
    REQUIRE(exists("cli_tess.csv"));

    write_file("cli_graph.txt", "0 1\n1 2\n2 3\n3 0\n0 2\n");

    SUBCASE("simulate happy path is deterministic") {
        const std::string cmd =
            std::string("simulate --model geosim-gravity --tess cli_tess.csv "
                        "--graph cli_graph.txt --start 2012-04-10T00:00:00 "
                        "--end 2012-04-13T00:00:00 --seed 7 --out cli_traj.csv");
        REQUIRE(run_cli(cmd) == 0);
        REQUIRE(exists("cli_traj.csv"));
        const std::string first = slurp("cli_traj.csv");
        REQUIRE(run_cli(cmd) == 0);
        CHECK(slurp("cli_traj.csv") == first);

        // header + at least the four initial records
        std::istringstream ss(first);
        std::string header;
        std::getline(ss, header);
        CHECK(header == "uid,lat,lng,timestamp");
    }

    SUBCASE("sts-epr without a diary is a usage error") {
        CHECK(run_cli("simulate --model sts-epr --tess cli_tess.csv "
                      "--graph cli_graph.txt --start 2012-04-10T00:00:00 "
                      "--end 2012-04-11T00:00:00 --out cli_x.csv") == 1);
    }

    SUBCASE("unknown flags and missing files map to the exit contract") {
        CHECK(run_cli("simulate --bogus-flag 1") == 1);
        CHECK(run_cli("simulate --model geosim --tess missing_tess.csv "
                      "--graph cli_graph.txt --start 2012-04-10T00:00:00 "
                      "--end 2012-04-11T00:00:00 --out cli_x.csv") == 2);
        CHECK(run_cli("nonsense") == 1);
    }

    SUBCASE("train-diary and sts-epr end to end, multi-run") {
        // geosim output doubles as training data for the diary generator
        REQUIRE(run_cli("simulate --model geosim --tess cli_tess.csv "
                        "--graph cli_graph.txt --start 2012-04-10T00:00:00 "
                        "--end 2012-04-20T00:00:00 --seed 3 "
                        "--out cli_train.csv") == 0);
        REQUIRE(run_cli("train-diary --traj cli_train.csv --tess cli_tess.csv "
                        "--out cli_diary.txt") == 0);
        REQUIRE(exists("cli_diary.txt"));

        REQUIRE(run_cli("simulate --model sts-epr --tess cli_tess.csv "
                        "--graph cli_graph.txt --diary cli_diary.txt "
                        "--start 2012-04-10T00:00:00 --end 2012-04-13T00:00:00 "
                        "--runs 2 --seed 11 --out cli_sts.csv") == 0);
        REQUIRE(exists("cli_sts.run0.csv"));
        REQUIRE(exists("cli_sts.run1.csv"));
        CHECK(slurp("cli_sts.run0.csv") != slurp("cli_sts.run1.csv"));

        // a single run with the same base seed reproduces run 0 exactly
        REQUIRE(run_cli("simulate --model sts-epr --tess cli_tess.csv "
                        "--graph cli_graph.txt --diary cli_diary.txt "
                        "--start 2012-04-10T00:00:00 --end 2012-04-13T00:00:00 "
                        "--seed 11 --out cli_sts_single.csv") == 0);
        CHECK(slurp("cli_sts_single.csv") == slurp("cli_sts.run0.csv"));
    }

    SUBCASE("evaluate a trajectory against itself") {
        REQUIRE(run_cli("simulate --model geosim-gravity --tess cli_tess.csv "
                        "--graph cli_graph.txt --start 2012-04-10T00:00:00 "
                        "--end 2012-04-17T00:00:00 --seed 5 "
                        "--out cli_eval.csv") == 0);
        REQUIRE(run_cli("evaluate --real cli_eval.csv --synthetic cli_eval.csv "
                        "--graph cli_graph.txt --seed 1 --out cli_self") == 0);
        const auto rows = parse_report("cli_self.scores.csv");
        REQUIRE(!rows.empty());
        // every computable measure must appear, self-comparison is perfect
        for (const char* m :
             {"jump_length", "radius_of_gyration", "visits_per_location",
              "location_frequency_rank", "waiting_time", "uncorrelated_entropy",
              "activity_per_hour", "mobility_similarity"}) {
            INFO(m);
            REQUIRE(rows.count(m) == 1);
            const auto& scores = rows.at(m);
            CHECK(scores.at("kl") == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(scores.at("hellinger") == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(scores.at("pearson") == doctest::Approx(1.0));
            CHECK(scores.at("rmse") == doctest::Approx(0.0).epsilon(1e-9));
        }
        REQUIRE(exists("cli_self.jump_length.hist.csv"));
    }

    SUBCASE("ingest produces engine-format outputs") {
        write_file("cli_in_venues.tsv",
                   "A\t0.010\t0.010\tCafe\tXX\n"
                   "B\t0.020\t0.020\tPark\tXX\n");
        write_file("cli_in_checkins.tsv",
                   "10\tA\tTue Apr 03 10:00:00 2012\t0\n"
                   "10\tB\tTue Apr 03 12:00:00 2012\t0\n"
                   "11\tA\tTue Apr 03 11:00:00 2012\t0\n"
                   "11\tB\tTue Apr 03 13:00:00 2012\t0\n");
        write_file("cli_in_graph.tsv", "10\t11\n");
        REQUIRE(run_cli("ingest --checkins cli_in_checkins.tsv "
                        "--venues cli_in_venues.tsv --graph cli_in_graph.tsv "
                        "--bbox 0.0,0.0,0.06,0.06 --start 2012-04-01T00:00:00 "
                        "--end 2012-05-01T00:00:00 --out cli_ing") == 0);
        REQUIRE(exists("cli_ing_traj.csv"));
        REQUIRE(exists("cli_ing_graph.txt"));
        REQUIRE(exists("cli_ing_report.txt"));
        CHECK(slurp("cli_ing_graph.txt") == "0 1\n");
        // ingested trajectories feed straight back into simulate
        REQUIRE(run_cli("tessellate --bbox 0.0,0.0,0.06,0.06 --side-m 1000 "
                        "--points cli_ing_traj.csv --out cli_ing_tess.csv") == 0);
        REQUIRE(run_cli("simulate --model geosim --tess cli_ing_tess.csv "
                        "--graph cli_ing_graph.txt --start 2012-04-10T00:00:00 "
                        "--end 2012-04-11T00:00:00 --seed 2 "
                        "--out cli_ing_sim.csv") == 0);
    }

    SUBCASE("evaluate rejects unknown measures and honors explicit requests") {
        write_file("cli_tiny.csv",
                   "uid,lat,lng,timestamp\n"
                   "0,0.010000,0.010000,2012-04-10T00:00:00\n"
                   "0,0.020000,0.020000,2012-04-10T05:00:00\n");
        CHECK(run_cli("evaluate --real cli_tiny.csv --synthetic cli_tiny.csv "
                      "--measures bogus") == 1);
        // mobility similarity without a graph is a usage error when explicit
        CHECK(run_cli("evaluate --real cli_tiny.csv --synthetic cli_tiny.csv "
                      "--measures mobility_similarity") == 1);
        CHECK(run_cli("evaluate --real cli_tiny.csv --synthetic cli_tiny.csv "
                      "--measures jump_length") == 0);
    }
}
