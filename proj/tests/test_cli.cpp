#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "glow_test_cli";

int run_cli(const std::string& args, const std::string& stderr_file = "") {
    std::string cmd = std::string(GLOWRECON_BIN) + " " + args + " >/dev/null";
    cmd += stderr_file.empty() ? " 2>/dev/null" : (" 2>" + stderr_file);
    const int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

json tiny_config(const std::string& out_dir, bool with_phantom) {
    json j;
    j["grid"] = {{"g", {-0.2, 0.2, -0.2, 0.2, -0.2, 0.16}},
                 {"omega", {-0.08, 0.08, -0.08, 0.08, -0.08, 0.04}},
                 {"h", 0.04}};
    if (with_phantom)
        j["phantom"] = {{"shapes",
                         {{{"type", "box"},
                           {"center", {0.0, 0.0, -0.02}},
                           {"half_widths", {0.04, 0.04, 0.02}},
                           {"eps", 4.0}}}}};
    j["output_dir"] = out_dir;
    return j;
}

}  // namespace

TEST_CASE("bad invocations exit with the configuration code") {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);

    CHECK(run_cli("") == 2);                                    // missing subcommand
    CHECK(run_cli("invert") == 2);                              // missing --config
    CHECK(run_cli("invert --config /does/not/exist.json") == 2);
    CHECK(run_cli("invert --config x --bogus-flag") == 2);

    const fs::path bad = kRoot / "bad.json";
    spit(bad, "{not json");
    CHECK(run_cli("invert --config " + bad.string()) == 2);

    const fs::path preset = kRoot / "preset.json";
    spit(preset, R"({"preset":"test9","output_dir":"o"})");
    CHECK(run_cli("invert --config " + preset.string()) == 2);

    const fs::path ladder = kRoot / "ladder.json";
    spit(ladder, R"({"preset":"mini","ladder":{"smin":10.0,"smax":8.0},"output_dir":"o"})");
    CHECK(run_cli("invert --config " + ladder.string()) == 2);

    const fs::path unknown = kRoot / "unknown.json";
    spit(unknown, R"({"preset":"mini","surprise":1,"output_dir":"o"})");
    CHECK(run_cli("invert --config " + unknown.string()) == 2);

    // a time step violating the stability bound is refused with a CFL message
    json cfl = tiny_config((kRoot / "cflrun").string(), false);
    cfl["tau"] = 0.05;
    const fs::path cflp = kRoot / "cfl.json";
    spit(cflp, cfl.dump());
    const fs::path errf = kRoot / "cfl.err";
    CHECK(run_cli("simulate --config " + cflp.string(), errf.string()) == 2);
    CHECK(slurp(errf).find("CFL") != std::string::npos);

    // inversion without simulated inputs reports the missing file as config
    json noin = tiny_config((kRoot / "numite").string(), true);
    const fs::path noinp = kRoot / "noin.json";
    spit(noinp, noin.dump());
    CHECK(run_cli("invert --config " + noinp.string()) == 2);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("simulate --help") == 0);
}

TEST_CASE("homogeneous scene: total and reference records coincide") {
    const fs::path dir = kRoot / "homog";
    const fs::path cfgp = kRoot / "homog.json";
    spit(cfgp, tiny_config(dir.string(), false).dump());
    REQUIRE(run_cli("simulate --config " + cfgp.string()) == 0);
    CHECK(slurp(dir / "trace_total.glwt") == slurp(dir / "trace_reference.glwt"));
    CHECK(slurp(dir / "gamma_data.glws") == slurp(dir / "reference.glws"));
}

TEST_CASE("full pipeline on a small dielectric scene") {
    const fs::path dir = kRoot / "run1";
    const fs::path cfgp = kRoot / "run1.json";
    spit(cfgp, tiny_config(dir.string(), true).dump());

    REQUIRE(run_cli("simulate --config " + cfgp.string()) == 0);
    for (const char* f : {"trace_total.glwt", "gamma_data.glws", "trace_reference.glwt",
                          "reference.glws", "config.json", "phantom.json"})
        CHECK(fs::exists(dir / f));

    REQUIRE(run_cli("invert --config " + cfgp.string()) == 0);
    for (const char* f : {"eps_comp.glwr", "norms.csv", "report.json", "state.json",
                          "timings.json"})
        CHECK(fs::exists(dir / f));
    const json rj = json::parse(slurp(dir / "report.json"));
    CHECK(rj.at("class").get<std::string>() == "dielectric");
    const double n_comp = rj.at("n_comp").get<double>();
    CHECK(n_comp > 1.25);
    CHECK(n_comp < 1.75);
    CHECK(rj.at("true_n").get<double>() == doctest::Approx(2.0));

    // repeated inversion of the same inputs is byte-identical
    const std::string report1 = slurp(dir / "report.json");
    const std::string field1 = slurp(dir / "eps_comp.glwr");
    REQUIRE(run_cli("invert --config " + cfgp.string()) == 0);
    CHECK(slurp(dir / "report.json") == report1);
    CHECK(slurp(dir / "eps_comp.glwr") == field1);

    REQUIRE(run_cli("postprocess --config " + cfgp.string()) == 0);
    for (const char* f : {"eps_image.glwr", "eps_image.vtk", "image.json"})
        CHECK(fs::exists(dir / f));
    const json ij = json::parse(slurp(dir / "image.json"));
    REQUIRE(!ij.at("empty").get<bool>());
    CHECK(ij.at("support_count").get<long>() >= 1);
    CHECK(ij.at("centroid_ij").at(0).get<double>() == doctest::Approx(5.0).epsilon(0.2));
    CHECK(ij.at("centroid_ij").at(1).get<double>() == doctest::Approx(5.0).epsilon(0.2));

    const fs::path csv = kRoot / "summary.csv";
    REQUIRE(run_cli("report " + dir.string() + " --csv " + csv.string()) == 0);
    const std::string table = slurp(csv);
    CHECK(table.rfind("run,class,true_n,n_comp,rel_err_pct,picked_interval\n", 0) == 0);
    CHECK(table.find(",dielectric,2.0000,") != std::string::npos);
    CHECK(table.find("average,") != std::string::npos);
}

TEST_CASE("measurement cleanup feeds the inversion") {
    const fs::path dir = kRoot / "run1";  // reuses the simulated records
    REQUIRE(fs::exists(dir / "trace_total.glwt"));

    json cfg = tiny_config(dir.string(), true);
    cfg["preprocess"] = {{"corruption", json::object()}};
    cfg["data_file"] = "gamma_processed.glws";
    const fs::path cfgp = kRoot / "run1_meas.json";
    spit(cfgp, cfg.dump());

    REQUIRE(run_cli("preprocess --config " + cfgp.string()) == 0);
    CHECK(fs::exists(dir / "gamma_processed.glws"));
    const json pj = json::parse(slurp(dir / "preprocess.json"));
    CHECK(pj.at("corrupted").get<bool>());
    CHECK(pj.at("detected_lag_samples").get<double>() == doctest::Approx(5.0).epsilon(0.2));
    // gain error of 1.05 should be nearly undone by the calibration factor
    CHECK(pj.at("calibration_factor").get<double>() == doctest::Approx(1.0 / 1.05).epsilon(0.1));

    REQUIRE(run_cli("invert --config " + cfgp.string()) == 0);
    const json rj = json::parse(slurp(dir / "report.json"));
    CHECK(rj.at("data_file").get<std::string>() == "gamma_processed.glws");
    CHECK(rj.at("class").get<std::string>() == "dielectric");
    const double n_comp = rj.at("n_comp").get<double>();
    CHECK(n_comp > 1.1);
    CHECK(n_comp < 1.9);
}

TEST_CASE("report with no runs prints an empty table") {
    CHECK(run_cli("report") == 0);
    fs::remove_all(kRoot);
}
