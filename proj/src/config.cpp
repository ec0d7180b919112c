#include "qcse/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qcse/errors.hpp"

namespace qcse {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError((path.empty() ? std::string("/") : path) + ": " + what);
}

// Splits "<number> <unit>" and scales by the unit table.
double parse_with_unit(const json& v, const std::string& path,
                       std::initializer_list<std::pair<std::string_view, double>> units, std::string_view kind) {
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path, "not a finite number");
        return x;
    }
    if (!v.is_string()) fail(path, std::string("expected a number or a ") + std::string(kind) + " string");
    const auto s = v.get<std::string>();
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    double x = 0.0;
    std::string unit, rest;
    if (!(in >> x)) fail(path, "cannot parse \"" + s + "\"");
    in >> unit;
    if (in >> rest) fail(path, "trailing text in \"" + s + "\"");
    for (const auto& [name, scale] : units)
        if (unit == name) {
            if (!std::isfinite(x)) fail(path, "not a finite number");
            return x * scale;
        }
    std::string known;
    for (const auto& u : units) known += (known.empty() ? "" : ", ") + std::string(u.first);
    fail(path, "unknown unit \"" + unit + "\" (expected one of " + known + ")");
}

// Reads the keys of one JSON object and remembers what was defaulted.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path, std::vector<std::string>& filled)
        : j_(j), path_(std::move(path)), filled_(filled) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    std::string at(const std::string& key) const { return path_ + "/" + key; }
    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double frequency(const std::string& key, double fallback) {
        if (has(key)) return parse_frequency(j_.at(key), at(key));
        filled_.push_back(at(key));
        return fallback;
    }
    double time(const std::string& key, double fallback) {
        if (has(key)) return parse_time(j_.at(key), at(key));
        filled_.push_back(at(key));
        return fallback;
    }
    double number(const std::string& key, double fallback) {
        if (!has(key)) {
            filled_.push_back(at(key));
            return fallback;
        }
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        return v.get<double>();
    }
    int integer(const std::string& key, int fallback) {
        if (!has(key)) {
            filled_.push_back(at(key));
            return fallback;
        }
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        return v.get<int>();
    }
    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) {
            filled_.push_back(at(key));
            return fallback;
        }
        const auto& v = j_.at(key);
        if (!v.is_boolean()) fail(at(key), "expected true or false");
        return v.get<bool>();
    }
    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) {
            filled_.push_back(at(key));
            return fallback;
        }
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fail(at(k), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string>& filled_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail(path, what);
}

BathSpec parse_intrinsic(ObjectReader& r, double delta, const std::string& path) {
    const auto kind = r.string("kind", "ohmic");
    if (kind == "ohmic") {
        Ohmic b;
        b.alpha = r.number("alpha", 0.0);
        b.omega_c = r.frequency("omega_c", kDefaultOhmicCutoffRatio * delta);
        return b;
    }
    if (kind == "low_frequency") {
        LowFrequency b;
        b.alpha = r.number("alpha", 0.0);
        b.omega_low = r.frequency("omega_low", kDefaultLowFrequencyRatio * delta);
        return b;
    }
    fail(path + "/kind", "expected \"ohmic\" or \"low_frequency\", got \"" + kind + "\"");
}

LorentzianCavity parse_cavity(ObjectReader& r, double delta, const std::string& path) {
    LorentzianCavity c;
    c.g = r.frequency("g", 0.0);
    c.omega_cav = r.frequency("omega_cav", delta);
    const bool has_q = r.has("Q"), has_l = r.has("lambda");
    if (has_q && has_l) fail(path, "Q and lambda are mutually exclusive");
    if (has_q) {
        const auto& q = r.raw("Q");
        if (!q.is_number() || !(q.get<double>() > 0.0)) fail(path + "/Q", "expected a positive number");
        c.lambda = c.omega_cav / q.get<double>();
    } else if (has_l) {
        c.lambda = parse_frequency(r.raw("lambda"), path + "/lambda");
    } else if (c.g > 0.0) {
        fail(path, "one of Q or lambda is required");
    } else {
        c.lambda = r.frequency("lambda", c.omega_cav / 100.0);  // inert while g = 0
    }
    return c;
}

ModeSelection parse_mode(const std::string& s, const std::string& path) {
    if (s == "full") return ModeSelection::full;
    if (s == "rwa") return ModeSelection::rwa;
    if (s == "both") return ModeSelection::both;
    fail(path, "expected \"full\", \"rwa\" or \"both\", got \"" + s + "\"");
}

bool valid_name(const std::string& s) {
    if (s.empty() || s == "." || s == "..") return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

} // namespace

std::vector<Mode> modes_of(ModeSelection m) {
    switch (m) {
    case ModeSelection::full: return {Mode::full};
    case ModeSelection::rwa: return {Mode::rwa};
    case ModeSelection::both: return {Mode::full, Mode::rwa};
    }
    return {};
}

std::string_view to_string(ModeSelection m) noexcept {
    switch (m) {
    case ModeSelection::full: return "full";
    case ModeSelection::rwa: return "rwa";
    case ModeSelection::both: return "both";
    }
    return "?";
}

double parse_frequency(const json& value, const std::string& path) {
    return parse_with_unit(value, path, {{"GHz", 1.0}, {"MHz", 1e-3}, {"kHz", 1e-6}, {"Hz", 1e-9}}, "frequency");
}

double parse_time(const json& value, const std::string& path) {
    return parse_with_unit(value, path, {{"ns", 1.0}, {"ps", 1e-3}, {"us", 1e3}, {"ms", 1e6}}, "time");
}

ExperimentConfig parse_experiment(const json& j, const std::string& path) {
    ExperimentConfig cfg;
    auto& filled = cfg.defaults_filled;
    ObjectReader top(j, path, filled);
    if (top.has("schema")) {
        const auto& s = top.raw("schema");
        if (!s.is_string() || s.get<std::string>() != kConfigSchema)
            fail(top.at("schema"), "expected \"" + std::string(kConfigSchema) + "\"");
    }
    top.has("derived");  // informational block written by to_json()

    cfg.name = top.string("name", "experiment");
    require(valid_name(cfg.name), top.at("name"), "use letters, digits, '_', '-' or '.'");
    cfg.output_dir = top.string("output_dir", cfg.name);
    require(!cfg.output_dir.empty(), top.at("output_dir"), "must not be empty");

    auto& env = cfg.environment;
    env.delta = top.frequency("delta", 10.0);
    require(env.delta > 0.0, top.at("delta"), "must be > 0");

    if (top.has("intrinsic")) {
        ObjectReader r(top.raw("intrinsic"), top.at("intrinsic"), filled);
        env.intrinsic = parse_intrinsic(r, env.delta, top.at("intrinsic"));
        r.finish();
    } else {
        filled.push_back(top.at("intrinsic"));
        env.intrinsic = Ohmic{0.0, kDefaultOhmicCutoffRatio * env.delta};
    }
    if (top.has("cavity")) {
        ObjectReader r(top.raw("cavity"), top.at("cavity"), filled);
        env.cavity = parse_cavity(r, env.delta, top.at("cavity"));
        r.finish();
    } else {
        filled.push_back(top.at("cavity"));
        env.cavity = LorentzianCavity{0.0, env.delta / 100.0, env.delta};
    }
    try {
        validate(env.intrinsic, env.delta);
    } catch (const ConfigError& e) {
        fail(top.at("intrinsic"), e.what());
    }
    try {
        validate(env.cavity, env.delta);
        validate(env);
    } catch (const ConfigError& e) {
        fail(top.at("cavity"), e.what());
    }

    cfg.mode = parse_mode(top.string("mode", "full"), top.at("mode"));

    if (top.has("scan")) {
        ObjectReader r(top.raw("scan"), top.at("scan"), filled);
        cfg.scan.points = r.integer("points", cfg.scan.points);
        cfg.scan.half_span = r.frequency("half_span", 0.0);
        cfg.scan.refine_factor = r.integer("refine_factor", cfg.scan.refine_factor);
        cfg.scan.refine_half_width = r.number("refine_half_width", cfg.scan.refine_half_width);
        r.finish();
    } else {
        filled.push_back(top.at("scan"));
    }
    if (cfg.scan.half_span <= 0.0) cfg.scan.half_span = default_half_span(env);
    require(cfg.scan.points >= 11, top.at("scan/points"), "must be >= 11");
    require(cfg.scan.refine_factor >= 1, top.at("scan/refine_factor"), "must be >= 1");
    require(cfg.scan.refine_half_width > 0.0, top.at("scan/refine_half_width"), "must be > 0");

    if (top.has("dynamics")) {
        ObjectReader r(top.raw("dynamics"), top.at("dynamics"), filled);
        cfg.dynamics.t_max = r.time("t_max", cfg.dynamics.t_max);
        cfg.dynamics.sample_dt = r.time("sample_dt", cfg.dynamics.sample_dt);
        cfg.dynamics.fft_points = r.integer("fft_points", cfg.dynamics.fft_points);
        cfg.dynamics.fft_span = r.frequency("fft_span", 0.0);
        r.finish();
    } else {
        filled.push_back(top.at("dynamics"));
    }
    require(cfg.dynamics.t_max > 0.0, top.at("dynamics/t_max"), "must be > 0");
    require(cfg.dynamics.sample_dt > 0.0, top.at("dynamics/sample_dt"), "must be > 0");
    require(cfg.dynamics.fft_points >= 1024 && cfg.dynamics.fft_points % 2 == 0, top.at("dynamics/fft_points"),
            "must be even and >= 1024");
    require(cfg.dynamics.fft_span >= 0.0, top.at("dynamics/fft_span"), "must be >= 0");

    if (top.has("oracle")) {
        ObjectReader r(top.raw("oracle"), top.at("oracle"), filled);
        cfg.oracle.modes = r.integer("modes", cfg.oracle.modes);
        cfg.oracle.t_max = r.time("t_max", cfg.oracle.t_max);
        cfg.oracle.dt = r.time("dt", 0.0);
        cfg.oracle.sample_dt = r.time("sample_dt", cfg.oracle.sample_dt);
        cfg.oracle.band_max = r.frequency("band_max", 0.0);
        r.finish();
    } else {
        filled.push_back(top.at("oracle"));
    }
    if (cfg.oracle.band_max <= 0.0) cfg.oracle.band_max = 5.0 * env.delta;
    require(cfg.oracle.modes >= 2, top.at("oracle/modes"), "must be >= 2");
    require(cfg.oracle.t_max > 0.0 && cfg.oracle.sample_dt > 0.0, top.at("oracle"), "times must be > 0");
    require(cfg.oracle.dt >= 0.0, top.at("oracle/dt"), "must be >= 0");

    if (top.has("densities")) {
        ObjectReader r(top.raw("densities"), top.at("densities"), filled);
        cfg.densities.lo = r.frequency("lo", cfg.densities.lo);
        cfg.densities.hi = r.frequency("hi", cfg.densities.hi);
        cfg.densities.points = r.integer("points", cfg.densities.points);
        r.finish();
    } else {
        filled.push_back(top.at("densities"));
    }
    require(cfg.densities.lo > 0.0 && cfg.densities.hi > cfg.densities.lo, top.at("densities"),
            "need 0 < lo < hi");
    require(cfg.densities.points >= 2, top.at("densities/points"), "must be >= 2");

    if (top.has("outputs")) {
        ObjectReader r(top.raw("outputs"), top.at("outputs"), filled);
        cfg.outputs.spectrum = r.boolean("spectrum", true);
        cfg.outputs.peaks = r.boolean("peaks", true);
        cfg.outputs.dynamics = r.boolean("dynamics", false);
        cfg.outputs.oracle = r.boolean("oracle", false);
        cfg.outputs.densities = r.boolean("densities", false);
        r.finish();
    } else {
        filled.push_back(top.at("outputs"));
    }

    if (top.has("thresholds")) {
        ObjectReader r(top.raw("thresholds"), top.at("thresholds"), filled);
        cfg.thresholds.symmetric_tolerance = r.number("symmetric_tolerance", cfg.thresholds.symmetric_tolerance);
        cfg.thresholds.vas_height = r.number("vas_height", cfg.thresholds.vas_height);
        cfg.thresholds.vas_position = r.number("vas_position", cfg.thresholds.vas_position);
        r.finish();
    } else {
        filled.push_back(top.at("thresholds"));
    }
    top.finish();
    return cfg;
}

std::vector<ExperimentConfig> parse_config(const json& j) {
    std::vector<ExperimentConfig> out;
    if (j.is_object() && j.contains("experiments")) {
        if (j.size() != 1) fail("", "\"experiments\" must be the only top-level key");
        const auto& list = j.at("experiments");
        if (!list.is_array()) fail("/experiments", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            out.push_back(parse_experiment(list[i], "/experiments/" + std::to_string(i)));
    } else {
        out.push_back(parse_experiment(j));
    }
    std::set<std::string> dirs;
    for (const auto& c : out)
        if (!dirs.insert(c.output_dir).second) fail("", "duplicate output_dir \"" + c.output_dir + "\"");
    return out;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(file.string() + ": cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    const auto& env = c.environment;
    json intrinsic;
    if (const auto* o = std::get_if<Ohmic>(&env.intrinsic))
        intrinsic = {{"kind", "ohmic"}, {"alpha", o->alpha}, {"omega_c", o->omega_c}};
    else if (const auto* l = std::get_if<LowFrequency>(&env.intrinsic))
        intrinsic = {{"kind", "low_frequency"}, {"alpha", l->alpha}, {"omega_low", l->omega_low}};
    const auto& cav = std::get<LorentzianCavity>(env.cavity);
    return json{
        {"schema", kConfigSchema},
        {"name", c.name},
        {"output_dir", c.output_dir},
        {"delta", env.delta},
        {"intrinsic", intrinsic},
        {"cavity", {{"g", cav.g}, {"lambda", cav.lambda}, {"omega_cav", cav.omega_cav}}},
        {"derived", {{"Q", cav.omega_cav / cav.lambda}, {"units", "frequencies in GHz, times in ns"}}},
        {"mode", to_string(c.mode)},
        {"scan",
         {{"points", c.scan.points},
          {"half_span", c.scan.half_span},
          {"refine_factor", c.scan.refine_factor},
          {"refine_half_width", c.scan.refine_half_width}}},
        {"dynamics",
         {{"t_max", c.dynamics.t_max},
          {"sample_dt", c.dynamics.sample_dt},
          {"fft_points", c.dynamics.fft_points},
          {"fft_span", c.dynamics.fft_span}}},
        {"oracle",
         {{"modes", c.oracle.modes},
          {"t_max", c.oracle.t_max},
          {"dt", c.oracle.dt},
          {"sample_dt", c.oracle.sample_dt},
          {"band_max", c.oracle.band_max}}},
        {"densities", {{"lo", c.densities.lo}, {"hi", c.densities.hi}, {"points", c.densities.points}}},
        {"outputs",
         {{"spectrum", c.outputs.spectrum},
          {"peaks", c.outputs.peaks},
          {"dynamics", c.outputs.dynamics},
          {"oracle", c.outputs.oracle},
          {"densities", c.outputs.densities}}},
        {"thresholds",
         {{"symmetric_tolerance", c.thresholds.symmetric_tolerance},
          {"vas_height", c.thresholds.vas_height},
          {"vas_position", c.thresholds.vas_position}}},
    };
}

} // namespace qcse
