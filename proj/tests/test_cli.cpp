#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "graphspace/io.hpp"

namespace fs = std::filesystem;
using graphspace::json;

namespace {

const fs::path golden = GRAPHSPACE_GOLDEN_DIR;

fs::path workdir() {
    const fs::path dir = fs::temp_directory_path() / "graphspace_test_cli";
    fs::create_directories(dir);
    return dir;
}

// Exit status of the CLI; stdout goes to out.txt in the work directory.
int run(const std::string& args) {
    const std::string cmd = "cd '" + workdir().string() + "' && '" GRAPHSPACE_CLI_PATH "' " + args +
                            " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string out() { return slurp(workdir() / "out.txt"); }

}  // namespace

TEST(Cli, DistanceCsvGolden) {
    const std::string e = (golden / "edge.json").string();
    const std::string n = (golden / "isolated.json").string();
    ASSERT_EQ(run("dist '" + e + "' '" + n + "' '" + e + "'"), 0);
    EXPECT_EQ(out(),
              "graph,edge,isolated,edge\n"
              "edge,0,1.4142135623730951,0\n"
              "isolated,1.4142135623730951,0,1.4142135623730951\n"
              "edge,0,1.4142135623730951,0\n");
}

TEST(Cli, MatchReportsRegistration) {
    const std::string e = (golden / "edge.json").string();
    ASSERT_EQ(run("match '" + e + "' '" + e + "'"), 0);
    const json j = json::parse(out());
    EXPECT_EQ(j["d_g"].get<double>(), 0.0);
    EXPECT_EQ(j["permutation"].size(), 4u);
    EXPECT_TRUE(j["trace"]["converged"].get<bool>());
    EXPECT_EQ(graphspace::from_document(j["g1_registered"]).real_node_count(), 2);
}

TEST(Cli, ValidationErrorsExitWithTwo) {
    const std::string e = (golden / "edge.json").string();
    EXPECT_EQ(run("match '" + e + "' missing.json"), 2);
    EXPECT_EQ(run("--solver nope match '" + e + "' '" + e + "'"), 2);
    EXPECT_EQ(run("--lambda -1 match '" + e + "' '" + e + "'"), 2);
    EXPECT_EQ(run("--lambda 1 match '" + e + "' '" + e + "'"), 2);  // no attributes
    EXPECT_EQ(run("match '" + e + "'"), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    {
        std::ofstream bad(workdir() / "loop.json");
        bad << R"({"nodes": [{"id": 0}], "edges": [{"i": 0, "j": 0, "w": 1}]})";
    }
    EXPECT_EQ(run("match loop.json loop.json"), 2);
    EXPECT_NE(slurp(workdir() / "err.txt").find("self-loop"), std::string::npos);
}

TEST(Cli, NonConvergenceExitsWithThreeAndStillWrites) {
    ASSERT_EQ(run("--seed 4 generate --family full_heavy_tailed --n-min 8 --n-max 8 --count 2 --out-dir nc"), 0);
    fs::remove(workdir() / "nc_match.json");
    EXPECT_EQ(run("--max-iter 1 --tol 1e-300 match nc/g_000.json nc/g_001.json -o nc_match.json"), 3);
    const json j = json::parse(slurp(workdir() / "nc_match.json"));
    EXPECT_FALSE(j["trace"]["converged"].get<bool>());
    EXPECT_EQ(j["trace"]["iterations"].get<int>(), 1);
}

TEST(Cli, GeodesicWritesStepsAndManifest) {
    const std::string e = (golden / "edge.json").string();
    const std::string n = (golden / "isolated.json").string();
    fs::remove_all(workdir() / "geo");
    ASSERT_EQ(run("geodesic '" + e + "' '" + n + "' --steps 2 --out-dir geo"), 0);
    const json manifest = json::parse(slurp(workdir() / "geo" / "manifest.json"));
    ASSERT_EQ(manifest["files"].size(), 3u);
    EXPECT_EQ(manifest["times"][1].get<double>(), 0.5);
    EXPECT_EQ(manifest["permutation"].size(), 4u);
    const graphspace::Graph mid = graphspace::load_graph(workdir() / "geo" / manifest["files"][1].get<std::string>());
    EXPECT_EQ(mid.adjacency().sum(), 1.0);  // one edge at half weight, both orientations
}

TEST(Cli, BenchReportSchema) {
    ASSERT_EQ(run("--seed 1 bench-recovery --family binomial --n-min 5 --n-max 6 --trials 4"), 0);
    const json j = json::parse(out());
    for (const char* key : {"graph_family", "size_range", "trials", "fraction_exact_registration",
                            "mean_objective_gap_vs_oracle", "nonconverged_trials"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_FALSE(j.contains("wall_time_stats"));
    ASSERT_EQ(run("--seed 1 bench-recovery --family binomial --n-min 5 --n-max 6 --trials 4 --timing"), 0);
    EXPECT_TRUE(json::parse(out()).contains("wall_time_stats"));
}

TEST(Cli, PcaAndSampleRoundTrip) {
    fs::remove_all(workdir() / "letters");
    fs::remove_all(workdir() / "drawn");
    ASSERT_EQ(run("--seed 3 generate --family letter_like --letter T --count 6 --out-dir letters"), 0);
    ASSERT_EQ(run("--padding one_way pca letters --components 2 -o model.json"), 0);
    const auto model = graphspace::pca_from_json(graphspace::read_json_file(workdir() / "model.json"));
    EXPECT_EQ(model.components(), 2);
    ASSERT_EQ(run("--seed 9 sample --model model.json --count 4 --threshold 0.5 --out-dir drawn"), 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(workdir() / "drawn")) {
        const auto g = graphspace::load_graph(entry.path());
        EXPECT_TRUE(g.nonnegative());
        ++files;
    }
    EXPECT_EQ(files, 4);
    EXPECT_EQ(run("--padding one_way pca letters --components 99 -o model.json"), 2);
}
