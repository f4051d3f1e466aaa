#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "fsolink/errors.hpp"
#include "fsolink/report.hpp"

using namespace fsolink;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "fsolink_report_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SerCurve sample_curve() {
    SerCurve curve;
    SerPoint a;
    a.es_n0_db = 5.0;
    a.trials = 1000;
    a.errors = 250;
    a.ser = 0.25;
    a.ci_low = 0.1;
    a.ci_high = 0.5;
    SerPoint b;
    b.es_n0_db = 10.0;
    b.trials = 1000;
    b.errors = 0;
    b.ser = 0.0;
    b.ci_low = 0.0;
    b.ci_high = 0.0036994;
    curve.points = {a, b};
    return curve;
}

}  // namespace

TEST_CASE("sha256 published test vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256_file hashes file bytes") {
    const auto path = temp_dir() / "hash_me.txt";
    std::ofstream(path, std::ios::binary) << "abc";
    CHECK(sha256_file(path) == sha256_hex("abc"));
    CHECK_THROWS_AS(sha256_file(temp_dir() / "no_such_file"), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("write_text_atomic leaves no temp file and creates directories") {
    const auto dir = temp_dir() / "nested" / "deeper";
    std::filesystem::remove_all(temp_dir() / "nested");
    const auto path = dir / "note.txt";
    write_text_atomic(path, "hello\n");
    CHECK(slurp(path) == "hello\n");
    CHECK(!std::filesystem::exists(path.string() + ".tmp"));

    write_text_atomic(path, "replaced\n");
    CHECK(slurp(path) == "replaced\n");
    std::filesystem::remove_all(temp_dir() / "nested");
}

TEST_CASE("ser_csv exact text") {
    CHECK(ser_csv(sample_curve()) ==
          "es_n0_db,trials,errors,ser,ci_low,ci_high\n"
          "5,1000,250,0.25,0.1,0.5\n"
          "10,1000,0,0,0,0.0036994\n");
    CHECK(ser_csv(SerCurve{}) == "es_n0_db,trials,errors,ser,ci_low,ci_high\n");
}

TEST_CASE("read_ser_csv round-trips ser_csv output") {
    const auto path = temp_dir() / "curve.csv";
    write_text_atomic(path, ser_csv(sample_curve()));
    const SerCurve back = read_ser_csv(path);
    REQUIRE(back.points.size() == 2u);
    CHECK(back.points[0].es_n0_db == 5.0);
    CHECK(back.points[0].trials == 1000);
    CHECK(back.points[0].errors == 250);
    CHECK(back.points[0].ser == 0.25);
    CHECK(back.points[0].ci_low == 0.1);
    CHECK(back.points[0].ci_high == 0.5);
    CHECK(back.points[1].errors == 0);
    CHECK(back.points[1].ci_high == 0.0036994);
    std::filesystem::remove(path);
}

TEST_CASE("read_ser_csv failure modes") {
    CHECK_THROWS_AS(read_ser_csv(temp_dir() / "absent.csv"), IoError);

    const auto path = temp_dir() / "bad.csv";
    write_text_atomic(path, "wrong,header\n1,2\n");
    CHECK_THROWS_AS(read_ser_csv(path), IoError);

    write_text_atomic(path,
                      "es_n0_db,trials,errors,ser,ci_low,ci_high\n1,2,3\n");
    CHECK_THROWS_AS(read_ser_csv(path), IoError);

    write_text_atomic(path,
                      "es_n0_db,trials,errors,ser,ci_low,ci_high\n"
                      "5,1000,abc,0.1,0.1,0.1\n");
    try {
        read_ser_csv(path);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        // Line number in the message for malformed rows.
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("loss_csv exact text") {
    LossReport loss;
    loss.mean_batch_loss = {2.5, 1.25};
    CHECK(loss_csv(loss) == "iteration,mean_batch_loss\n1,2.5\n2,1.25\n");
    CHECK(loss_csv(LossReport{}) == "iteration,mean_batch_loss\n");
}

TEST_CASE("constellation_csv exact text at full precision") {
    const auto c = normalize_constellation({{1.0, 0.0}, {-1.0, 0.0}});
    CHECK(constellation_csv(c) == "symbol,re,im\n0,1,0\n1,-1,0\n");
}

TEST_CASE("ser_plot_svg basic structure") {
    PlotSeries s1;
    s1.label = "ml & baseline";  // & must be escaped
    s1.curve = sample_curve();
    PlotSeries s2;
    s2.label = "dnn";
    s2.curve = sample_curve();
    const std::vector<PlotSeries> series = {s1, s2};
    const std::string svg = ser_plot_svg(series, "4-QAM <strong>");

    CHECK(svg.find("<svg xmlns=") == 0u);
    CHECK(svg.find("4-QAM &lt;strong&gt;") != std::string::npos);
    CHECK(svg.find("ml &amp; baseline") != std::string::npos);
    CHECK(svg.find("dnn") != std::string::npos);
    CHECK(svg.find("Es/N0 (dB)") != std::string::npos);
    CHECK(svg.find("Symbol error rate") != std::string::npos);
    // Whiskers + filled markers for positive SER, open marker for zero SER.
    CHECK(svg.find("fill=\"white\" stroke=") != std::string::npos);
    CHECK(svg.find("<path d=\"M") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);

    // Empty input still produces a valid document.
    const std::string empty = ser_plot_svg({}, "nothing");
    CHECK(empty.find("<svg xmlns=") == 0u);
    CHECK(empty.find("nothing") != std::string::npos);
}

TEST_CASE("write_manifest emits parseable JSON with all fields") {
    const auto dir = temp_dir() / "run";
    std::filesystem::remove_all(dir);

    RunManifest m;
    m.command = "sweep --grid 5,10";
    m.version = "0.1.0";
    m.seed = 42;
    m.threads = 4;
    m.wall_seconds = 1.5;
    m.config_text = "trials = 10\n";
    m.outputs.push_back({"ser.csv", sha256_hex("data")});
    write_manifest(dir, m);

    const auto parsed = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(parsed["command"] == "sweep --grid 5,10");
    CHECK(parsed["version"] == "0.1.0");
    CHECK(parsed["seed"] == 42);
    CHECK(parsed["threads"] == 4);
    CHECK(parsed["wall_seconds"] == 1.5);
    CHECK(parsed["config"] == "trials = 10\n");
    REQUIRE(parsed["outputs"].size() == 1u);
    CHECK(parsed["outputs"][0]["path"] == "ser.csv");
    CHECK(parsed["outputs"][0]["sha256"] == sha256_hex("data"));
    std::filesystem::remove_all(dir);
}
