#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "qcse/config.hpp"
#include "qcse/errors.hpp"
#include "qcse/experiment.hpp"

using namespace qcse;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("qcse_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QCSE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ExperimentConfig small(const std::string& name) {
    auto c = preset("fig4b").at(1);
    c.name = c.output_dir = name;
    c.mode = ModeSelection::both;
    c.scan.points = 401;
    c.outputs.dynamics = true;
    c.outputs.densities = true;
    c.densities.points = 51;
    c.dynamics.t_max = 20.0;
    return c;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("bundle files and their schemas") {
    TempDir tmp("bundle");
    RunOptions opt;
    opt.output_root = tmp.path;
    opt.origin = "test";
    const auto results = run_experiments({small("a")}, opt);
    REQUIRE(results.size() == 1);
    const auto dir = tmp.path / "a";

    const auto spectrum_text = slurp(dir / "spectrum.csv");
    CHECK(first_line(spectrum_text) == "omega_ghz,power,r_shift_ghz,gamma_ghz,mode,source");
    const auto dyn = slurp(dir / "dynamics.csv");
    CHECK(first_line(dyn) == "t_ns,re_chi,im_chi,population,rho11,mode,source");
    const auto den = slurp(dir / "densities.csv");
    CHECK(first_line(den) == "omega_ghz,j_intrinsic,j_cavity,source");
    CHECK(!fs::exists(dir / "oracle_trace.csv"));

    // Both modes present, each row complete.
    int full = 0, rwa = 0;
    std::stringstream ss(spectrum_text);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        const auto f = fields(line);
        REQUIRE(f.size() == 6);
        full += f[4] == "full";
        rwa += f[4] == "rwa";
        CHECK(f[5] == "analytic");
        CHECK(std::stod(f[1]) > 0.0);
    }
    CHECK(full > 401);
    CHECK(rwa > 401);

    std::stringstream ds(dyn);
    std::getline(ds, line);
    std::getline(ds, line);
    auto f = fields(line);
    REQUIRE(f.size() == 7);
    CHECK(std::stod(f[0]) == 0.0);
    CHECK(std::stod(f[3]) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::stod(f[4]) == doctest::Approx(0.5 * (1.0 + results[0].modes[0].renormalization.eta)));

    const auto peaks = json::parse(slurp(dir / "peaks.json"));
    CHECK(peaks.contains("full"));
    CHECK(peaks.contains("rwa"));
    CHECK(peaks["full"]["peak_count"] == 2);
    CHECK(peaks["full"]["classification"].is_string());

    const auto man = json::parse(slurp(dir / "manifest.json"));
    CHECK(man["schema"] == "qcse.result/1");
    CHECK(man["version"] == std::string(kToolVersion));
    CHECK(man["origin"] == "test");
    CHECK(man["modes"].size() == 2);
    CHECK(man["wall_time_s"].is_number());
    CHECK(to_json(parse_experiment(man["config"])) == man["config"]);

    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("runs are deterministic across job counts") {
    TempDir a("det1"), b("det3");
    std::vector<ExperimentConfig> configs{small("x"), small("y"), small("z")};
    configs[1].environment.cavity = LorentzianCavity{1.0, 1e-3, 10.0};
    configs[2].environment.intrinsic = LowFrequency{1e-4, 0.1};
    RunOptions o1, o3;
    o1.output_root = a.path;
    o1.jobs = 1;
    o1.record_wall_time = false;
    o3 = o1;
    o3.output_root = b.path;
    o3.jobs = 3;
    run_experiments(configs, o1);
    run_experiments(configs, o3);
    for (const char* name : {"x", "y", "z"})
        for (const auto& e : fs::directory_iterator(a.path / name)) {
            CAPTURE(e.path());
            CHECK(slurp(e.path()) == slurp(b.path / name / e.path().filename()));
        }
}

TEST_CASE("a failing config leaves nothing behind") {
    TempDir tmp("fail");
    auto bad = small("bad");
    bad.environment.intrinsic = Ohmic{0.3, 100.0};
    RunOptions opt;
    opt.output_root = tmp.path;
    CHECK_THROWS_WITH_AS(run_experiments({small("good"), bad}, opt), doctest::Contains("bad"), NumericError);
    CHECK(fs::is_empty(tmp.path));

    auto long_run = small("long");
    long_run.dynamics.t_max = 1e6;
    CHECK_THROWS_AS(run_experiments({long_run}, opt), ConfigError);
}

TEST_CASE("atomic write replaces the target") {
    TempDir tmp("atomic");
    const auto p = tmp.path / "sub" / "f.txt";
    write_atomic(p, "one");
    write_atomic(p, "two");
    CHECK(slurp(p) == "two");
    CHECK(!fs::exists(tmp.path / "sub" / "f.txt.tmp"));
}

TEST_CASE("peaks json maps NaN to null") {
    PeakReport r;
    r.peaks.push_back({10.0, 1.0, std::numeric_limits<double>::quiet_NaN()});
    r.peak_count = 1;
    r.classification = "single";
    const auto j = peaks_json(r);
    CHECK(j["peaks"][0]["fwhm"].is_null());
    CHECK(j["height_ratio"] == 1.0);
}

TEST_CASE("rwa doublet is symmetric") {
    for (const auto& cfg : preset("fig3b")) {
        if (std::get<LorentzianCavity>(cfg.environment.cavity).g < 0.5) continue;
        auto c = cfg;
        c.outputs.dynamics = false;
        const auto r = compute_experiment(c);
        CAPTURE(c.name);
        CHECK(r.modes.at(0).peaks.height_ratio == doctest::Approx(1.0).epsilon(0.02));
        CHECK(r.modes.at(0).peaks.classification == "S");
    }
}

TEST_CASE("table1 cells and reference labels") {
    CHECK(table1_reference(BathKind::ohmic, "weak") == "single");
    CHECK(table1_reference(BathKind::low_frequency, "strong") == "AS");
    CHECK(table1_reference(BathKind::low_frequency, "ultrastrong") == "VAS");
    CHECK(table1_reference(BathKind::ohmic, "strong") == "AS*");
    CHECK(table1_reference(BathKind::ohmic, "ultrastrong") == "AS");

    std::vector<ExperimentResult> results;
    for (const auto& c : preset("table1")) {
        ExperimentResult r;
        r.config = c;
        ModeResult m;
        m.peaks.classification = "S";
        r.modes.push_back(m);
        results.push_back(r);
    }
    const auto cells = table1_cells(results);
    REQUIRE(cells.size() == 12);
    CHECK(cells[0].coupling == "weak");
    CHECK(cells[0].quality == doctest::Approx(1e4));
    CHECK(cells[11].bath == BathKind::ohmic);
    CHECK(cells[11].quality == doctest::Approx(1e3));
    const auto j = table1_json(cells);
    CHECK(j["schema"] == "qcse.table1/1");
    CHECK(j["cells"].size() == 12);
    CHECK(j["all_match"] == false);
}

TEST_CASE("command-line exit codes") {
    TempDir tmp("cli");
    const auto root = tmp.path.string();
    auto write = [&](const std::string& name, const json& j) {
        const auto p = tmp.path / name;
        std::ofstream(p) << j.dump();
        return p.string();
    };
    const json ok{{"name", "ok"}, {"cavity", {{"g", "1 GHz"}, {"Q", 100}}}, {"scan", {{"points", 401}}}};
    CHECK(run_cli("spectrum " + write("ok.json", ok) + " -o " + root + " --no-wall-time") == 0);
    CHECK(fs::exists(tmp.path / "ok" / "spectrum.csv"));
    CHECK(run_cli("show fig4a") == 0);
    CHECK(run_cli("spectrum " + write("empty.json", json{{"experiments", json::array()}}) + " -o " + root) == 1);

    json both = ok;
    both["cavity"]["lambda"] = 0.1;
    CHECK(run_cli("spectrum " + write("both.json", both) + " -o " + root) == 2);
    json unknown = ok;
    unknown["colour"] = "red";
    CHECK(run_cli("spectrum " + write("unknown.json", unknown) + " -o " + root) == 2);
    CHECK(run_cli("preset fig9 -o " + root) == 2);
    CHECK(run_cli("spectrum nowhere.json -o " + root) == 2);
    CHECK(run_cli("dynamics " + write("ok2.json", ok) + " -o " + root + " --t-max 1e6") == 2);
    CHECK(run_cli("frobnicate") == 2);

    json strong{{"name", "strong"}, {"intrinsic", {{"kind", "ohmic"}, {"alpha", 0.3}}}};
    CHECK(run_cli("spectrum " + write("strong.json", strong) + " -o " + root) == 3);
    CHECK(!fs::exists(tmp.path / "strong"));

    write("blocker", json::object());
    CHECK(run_cli("spectrum " + tmp.path.string() + "/ok.json -o " + (tmp.path / "blocker").string()) == 4);
}

}
