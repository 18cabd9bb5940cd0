#include "dcurv/io.hpp"
#include "dcurv/manifest.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "dcurv_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Runs the CLI with its output directory under the work dir; returns the exit status.
int run(const std::string& out, const std::string& args) {
    const fs::path dir = work_dir() / out;
    fs::create_directories(dir);
    const std::string cmd = std::string(DCURV_BIN) + " --out-dir " + dir.string() + " " + args + " > " +
                            (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string file(const std::string& out, const std::string& name) { return dcurv::read_text(work_dir() / out / name); }

}  // namespace

TEST_CASE("gen writes a cloud, its curvature and a manifest") {
    REQUIRE(run("gen", "--seed 4 gen --surface torus --n 200 --R 3 --r 1") == 0);
    const dcurv::CsvTable curv = dcurv::read_csv(work_dir() / "gen" / "curvature.csv");
    CHECK(curv.header == std::vector<std::string>{"point_id", "gauss_curvature", "interior"});
    CHECK(curv.rows.size() == 200);
    CHECK(dcurv::load_cloud(work_dir() / "gen" / "cloud.csv").size() == 200);
    const dcurv::RunManifest m = dcurv::RunManifest::read(work_dir() / "gen" / "manifest.json");
    CHECK(m.command == "gen");

    REQUIRE(run("gen2", "--seed 4 gen --surface torus --n 200 --R 3 --r 1") == 0);
    CHECK(file("gen", "cloud.csv") == file("gen2", "cloud.csv"));
    CHECK(file("gen", "manifest.json") == file("gen2", "manifest.json"));
}

TEST_CASE("exit codes") {
    CHECK(run("bad_sub", "frobnicate") == 1);
    CHECK(run("bad_flag", "gen --no-such-flag") == 1);
    CHECK(run("bad_torus", "gen --surface torus --R 1 --r 2") == 2);
    CHECK(file("bad_torus", "stderr.txt").find("InvalidSurfaceParams") != std::string::npos);
    CHECK(run("missing", "curvature --input /nonexistent/cloud.csv") == 2);
}

TEST_CASE("curvature subcommand") {
    REQUIRE(run("plane", "--seed 1 gen --surface plane --n 150") == 0);
    const std::string cloud = (work_dir() / "plane" / "cloud.csv").string();
    REQUIRE(run("full", "curvature --input " + cloud + " --t 1 --r-quantile 1.0") == 0);
    const dcurv::CsvTable t = dcurv::read_csv(work_dir() / "full" / "curvature.csv");
    const auto col = t.column("curvature");
    REQUIRE(col.has_value());
    REQUIRE(t.rows.size() == 150);
    for (const auto& row : t.rows) {
        double v = 0.0;
        REQUIRE(dcurv::parse_double(row[*col], v));
        CHECK(v == doctest::Approx(1.0 / 150.0).epsilon(1e-12));
    }

    REQUIRE(run("saddle", "--seed 0 gen --surface hyperbolic-paraboloid --n 300") == 0);
    const std::string saddle = (work_dir() / "saddle").string();
    REQUIRE(run("saddle_curv", "curvature --input " + saddle + "/cloud.csv --reference " + saddle + "/curvature.csv") ==
            0);
    const auto report = nlohmann::json::parse(file("saddle_curv", "correlation.json"));
    CHECK(report.contains("pearson"));
    CHECK(report["count"].get<int>() >= 10);
    CHECK(run("both_radii", "curvature --input " + cloud + " --r 1 --r-quantile 0.2") != 0);
}

TEST_CASE("operator subcommand") {
    REQUIRE(run("sph", "gen --n 80") == 0);
    REQUIRE(run("op", "operator --input " + (work_dir() / "sph" / "cloud.csv").string() + " --map") == 0);
    CHECK(fs::exists(work_dir() / "op" / "operator.bin"));
    CHECK(fs::exists(work_dir() / "op" / "map.bin"));
    CHECK(file("op", "operator.bin").substr(0, 4) == "DCOP");
}

TEST_CASE("corpus, train and eval chain") {
    const std::string small = "--quadrics 12 --points 30 --dims 2 --K 2 --d-emb 4";
    REQUIRE(run("corpus", "--seed 3 corpus " + small) == 0);
    const std::string manifest = (work_dir() / "corpus" / "manifest.json").string();
    REQUIRE(run("train", "--seed 3 train --corpus " + manifest + " --epochs 5 --encoder 8 --head 8") == 0);
    CHECK(dcurv::read_csv(work_dir() / "train" / "loss.csv").rows.size() == 5);
    CHECK(file("train", "model.dcnn").substr(0, 4) == "DCNN");
    const std::string model = (work_dir() / "train" / "model.dcnn").string();
    REQUIRE(run("eval", "--seed 3 eval --corpus " + manifest + " --model " + model + " --held-out 10") == 0);
    const dcurv::CsvTable t = dcurv::read_csv(work_dir() / "eval" / "mse_table.csv");
    CHECK(t.column("baseline_random_mean").has_value());
    CHECK(t.rows.back().front() == "all");
}

TEST_CASE("probe subcommand") {
    REQUIRE(run("probe", "probe --objective saddle2d --samples 200") == 0);
    CHECK(file("probe", "stdout.txt").find("Saddle") != std::string::npos);
    const auto h = nlohmann::json::parse(file("probe", "hessian.json"));
    CHECK(h.contains("eigenvalues"));
    CHECK(dcurv::read_csv(work_dir() / "probe" / "histogram.csv").rows.size() == 64);

    dcurv::write_text(work_dir() / "probe_input.csv", "x0,x1,f\n0,0,0\n");
    CHECK(run("probe_short", "probe --input " + (work_dir() / "probe_input.csv").string()) == 2);
}

TEST_CASE("report reruns from its manifest") {
    dcurv::write_text(work_dir() / "ordering.json",
                      R"({"n_points": 150, "first_seed": 0, "n_seeds": 2, "t": 8, "quantile": 0.1, "alpha": 1.0})");
    REQUIRE(run("report", "report --experiment ordering --config " + (work_dir() / "ordering.json").string()) == 0);
    const std::string manifest = (work_dir() / "report" / "manifest.json").string();
    REQUIRE(run("rerun", "report --manifest " + manifest) == 0);
    CHECK(file("report", "ordering.csv") == file("rerun", "ordering.csv"));
    CHECK(dcurv::read_csv(work_dir() / "report" / "ordering.csv").rows.size() == 2);
    CHECK(run("report_bad", "report --experiment nope") == 2);
}
