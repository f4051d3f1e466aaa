#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "fsolink/report.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("FSO_CLI");
    REQUIRE_MESSAGE(env != nullptr, "FSO_CLI must point at the built binary");
    return env;
}

struct CliResult {
    int exit_code;
    std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    const int status = pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fsolink_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("version and help exit cleanly") {
    const auto version = run_cli("--version");
    CHECK(version.exit_code == 0);
    CHECK(version.output.find("0.1.0") != std::string::npos);

    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("sweep --help").exit_code == 0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").exit_code == 2);                      // missing subcommand
    CHECK(run_cli("frobnicate").exit_code == 2);            // unknown subcommand
    CHECK(run_cli("sweep --no-such-flag").exit_code == 2);  // unknown flag

    const auto bad_value = run_cli("sweep --set detector=genie --trials 10");
    CHECK(bad_value.exit_code == 2);
    CHECK(bad_value.output.find("detector") != std::string::npos);

    CHECK(run_cli("sweep --set detector=qam_dnn --trials 10").exit_code == 2);
    CHECK(run_cli("train --set detector=qam_ml_perfect").exit_code == 2);
    CHECK(run_cli("validate-channel --set turbulence=off").exit_code == 2);
}

TEST_CASE("I/O failures exit with code 4") {
    CHECK(run_cli("sweep --config /nonexistent/file.cfg").exit_code == 4);
    const auto missing_model = run_cli(
        "sweep --set detector=qam_dnn --set rx_model=/nonexistent/rx.mlp "
        "--trials 10");
    CHECK(missing_model.exit_code == 4);
    CHECK(run_cli("plot /nonexistent/ser.csv").exit_code == 4);
}

TEST_CASE("training divergence exits with code 3") {
    const auto out = fresh_dir("diverge");
    const auto r = run_cli(
        "train --set detector=qam_dnn --set modulation_order=4 "
        "--set turbulence=off --set learning_rate=1e154 --set iterations=10 "
        "--set batch_size=8 --set samples_per_batch_ratio=1 "
        "--set hidden_layers=2 --set hidden_width=16 --out " +
        out.string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("non-finite") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("sweep writes ser.csv plus a manifest that hashes it") {
    const auto out = fresh_dir("sweep");
    const auto r = run_cli(
        "sweep --set turbulence=off --set modulation_order=4 --grid 5,10 "
        "--trials 2000 --seed 7 --svg --out " +
        out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ser") != std::string::npos);

    const auto curve = fsolink::read_ser_csv(out / "ser.csv");
    REQUIRE(curve.points.size() == 2u);
    CHECK(curve.points[0].es_n0_db == 5.0);
    CHECK(curve.points[0].trials == 2000);
    CHECK(curve.points[0].ser > curve.points[1].ser);

    CHECK(fs::exists(out / "plot.svg"));
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["command"] == "sweep");
    CHECK(manifest["seed"] == 7);
    bool found_ser = false, found_svg = false;
    for (const auto& entry : manifest["outputs"]) {
        if (entry["path"] == "ser.csv") {
            found_ser = true;
            CHECK(entry["sha256"] == fsolink::sha256_file(out / "ser.csv"));
        }
        if (entry["path"] == "plot.svg") found_svg = true;
    }
    CHECK(found_ser);
    CHECK(found_svg);
    CHECK(manifest["config"].get<std::string>().find("modulation_order = 4") !=
          std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("sweep results do not depend on the thread count") {
    const auto out1 = fresh_dir("threads1");
    const auto out4 = fresh_dir("threads4");
    const std::string common =
        "sweep --set modulation_order=16 --set n_rx=2 --grid 10,20 "
        "--trials 4001 --seed 11 ";
    CHECK(run_cli(common + "--set threads=1 --out " + out1.string()).exit_code == 0);
    CHECK(run_cli(common + "--set threads=4 --out " + out4.string()).exit_code == 0);
    CHECK(slurp(out1 / "ser.csv") == slurp(out4 / "ser.csv"));
    fs::remove_all(out1);
    fs::remove_all(out4);
}

TEST_CASE("receiver training then sweeping with the saved model") {
    const auto tdir = fresh_dir("train_rx");
    const auto r = run_cli(
        "train --set detector=qam_dnn --set modulation_order=4 "
        "--set turbulence=off --set train_es_n0_db=10 --set iterations=40 "
        "--set batch_size=32 --set samples_per_batch_ratio=1 "
        "--set hidden_layers=1 --set hidden_width=16 --seed 5 --out " +
        tdir.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(tdir / "receiver.mlp"));
    const std::string loss = slurp(tdir / "loss.csv");
    CHECK(loss.rfind("iteration,mean_batch_loss\n", 0) == 0);
    CHECK(std::count(loss.begin(), loss.end(), '\n') == 41);

    const auto sdir = fresh_dir("sweep_rx");
    const auto s = run_cli(
        "sweep --set detector=qam_dnn --set modulation_order=4 "
        "--set turbulence=off --set rx_model=" +
        (tdir / "receiver.mlp").string() +
        " --grid 10 --trials 2000 --seed 9 --out " + sdir.string());
    CHECK(s.exit_code == 0);
    const auto curve = fsolink::read_ser_csv(sdir / "ser.csv");
    CHECK(curve.points[0].ser < 0.2);
    fs::remove_all(tdir);
    fs::remove_all(sdir);
}

TEST_CASE("end-to-end training emits both models and a constellation") {
    const auto tdir = fresh_dir("train_e2e");
    const auto r = run_cli(
        "train --set detector=end_to_end_dnn --set modulation_order=4 "
        "--set turbulence=off --set train_es_n0_db=15 --set iterations=20 "
        "--set batch_size=16 --set samples_per_batch_ratio=1 "
        "--set hidden_layers=1 --set hidden_width=16 --seed 6 --out " +
        tdir.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(tdir / "transmitter.mlp"));
    CHECK(fs::exists(tdir / "receiver.mlp"));
    const std::string cons = slurp(tdir / "constellation.csv");
    CHECK(cons.rfind("symbol,re,im\n", 0) == 0);
    CHECK(std::count(cons.begin(), cons.end(), '\n') == 5);

    const auto sdir = fresh_dir("sweep_e2e");
    const auto s = run_cli(
        "sweep --set detector=end_to_end_dnn --set modulation_order=4 "
        "--set turbulence=off --set rx_model=" +
        (tdir / "receiver.mlp").string() +
        " --set tx_model=" + (tdir / "transmitter.mlp").string() +
        " --grid 10 --trials 1000 --seed 9 --out " + sdir.string());
    CHECK(s.exit_code == 0);
    CHECK(fs::exists(sdir / "ser.csv"));
    fs::remove_all(tdir);
    fs::remove_all(sdir);
}

TEST_CASE("plot combines existing curves") {
    const auto a = fresh_dir("plot_a");
    const auto b = fresh_dir("plot_b");
    CHECK(run_cli("sweep --set turbulence=off --set modulation_order=4 "
                  "--grid 5,10 --trials 500 --seed 1 --out " +
                  a.string())
              .exit_code == 0);
    CHECK(run_cli("sweep --set turbulence=off --set modulation_order=16 "
                  "--grid 5,10 --trials 500 --seed 1 --out " +
                  b.string())
              .exit_code == 0);

    const auto pdir = fresh_dir("plot_out");
    const auto r = run_cli("plot " + (a / "ser.csv").string() + " " +
                           (b / "ser.csv").string() +
                           " --label four --label sixteen --title Compare --out " +
                           pdir.string());
    CHECK(r.exit_code == 0);
    const std::string svg = slurp(pdir / "plot.svg");
    CHECK(svg.find("four") != std::string::npos);
    CHECK(svg.find("sixteen") != std::string::npos);
    CHECK(svg.find("Compare") != std::string::npos);

    CHECK(run_cli("plot " + (a / "ser.csv").string() + " --label x --label y")
              .exit_code == 2);
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(pdir);
}

TEST_CASE("validate-channel agrees with the analytic law") {
    const auto out = fresh_dir("validate");
    const auto r = run_cli(
        "validate-channel --set turbulence=weak --set channel_samples=50000 "
        "--seed 3 --out " +
        out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("consistent") != std::string::npos);
    CHECK(fs::exists(out / "channel_stats.csv"));
    const std::string csv = slurp(out / "channel_stats.csv");
    CHECK(csv.rfind("metric,value\n", 0) == 0);
    CHECK(csv.find("scintillation") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("config file feeds the run and flags override it") {
    const auto dir = fresh_dir("cfgfile");
    fs::create_directories(dir);
    const auto cfg = dir / "run.cfg";
    std::ofstream(cfg) << "turbulence = off\nmodulation_order = 4\n"
                       << "grid = 5\ntrials = 50\nseed = 2\n";
    const auto out = dir / "out";
    const auto r = run_cli("sweep --config " + cfg.string() + " --trials 700 --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto curve = fsolink::read_ser_csv(out / "ser.csv");
    REQUIRE(curve.points.size() == 1u);
    CHECK(curve.points[0].trials == 700);  // flag beat the file
    fs::remove_all(dir);
}
