// Compiled-in experiment presets. Delta = 10 GHz and alpha = 1e-4 throughout.

#include <array>
#include <string>

#include "qcse/config.hpp"
#include "qcse/errors.hpp"

namespace qcse {

namespace {

constexpr double kDelta = 10.0;
constexpr double kAlpha = 1e-4;

struct Coupling {
    const char* label;
    double g;
};

// Weak, strong and ultra-strong qubit-cavity couplings for the bath comparisons.
constexpr std::array<Coupling, 3> kBathCouplings{{
    {"weak", 1e-5 * kDelta},
    {"strong", 2e-2 * kDelta},
    {"ultrastrong", 1e-1 * kDelta},
}};

constexpr std::array<Coupling, 3> kCavityCouplings{{
    {"g100MHz", 0.1},
    {"g1000MHz", 1.0},
    {"g2000MHz", 2.0},
}};

ExperimentConfig base(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.output_dir = name;
    c.environment.delta = kDelta;
    c.environment.intrinsic = Ohmic{0.0, kDefaultOhmicCutoffRatio * kDelta};
    c.scan.half_span = 0.0;
    c.oracle.band_max = 5.0 * kDelta;
    return c;
}

BathSpec intrinsic(BathKind kind) {
    if (kind == BathKind::low_frequency) return LowFrequency{kAlpha, kDefaultLowFrequencyRatio * kDelta};
    return Ohmic{kAlpha, kDefaultOhmicCutoffRatio * kDelta};
}

const char* short_name(BathKind kind) { return kind == BathKind::low_frequency ? "low" : "ohmic"; }

const char* q_label(double q) { return q == 1e4 ? "Q1e4" : q == 1e3 ? "Q1e3" : "Q1e2"; }

void finalize(ExperimentConfig& c) {
    if (c.scan.half_span <= 0.0) c.scan.half_span = default_half_span(c.environment);
    validate(c.environment);
}

std::vector<ExperimentConfig> cavity_only(const std::string& id, double q, ModeSelection mode, bool oracle) {
    std::vector<ExperimentConfig> out;
    for (const auto& k : kCavityCouplings) {
        auto c = base(id + "_" + k.label);
        c.environment.cavity = LorentzianCavity{k.g, kDelta / q, kDelta};
        c.mode = mode;
        c.outputs.dynamics = true;
        c.outputs.oracle = oracle;
        finalize(c);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<ExperimentConfig> bath_series(const std::string& id, BathKind kind, double q, bool dynamics) {
    std::vector<ExperimentConfig> out;
    for (const auto& k : kBathCouplings) {
        auto c = base(id + "_" + k.label);
        c.environment.intrinsic = intrinsic(kind);
        c.environment.cavity = LorentzianCavity{k.g, kDelta / q, kDelta};
        c.outputs.dynamics = dynamics;
        finalize(c);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<ExperimentConfig> densities() {
    std::vector<ExperimentConfig> out;
    for (auto kind : {BathKind::low_frequency, BathKind::ohmic}) {
        auto c = base(std::string("fig2_") + short_name(kind));
        c.environment.intrinsic = intrinsic(kind);
        c.environment.cavity = LorentzianCavity{0.2, kDelta / 1e2, kDelta};
        c.outputs = {.spectrum = false, .peaks = false, .densities = true};
        finalize(c);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<ExperimentConfig> table() {
    std::vector<ExperimentConfig> out;
    for (auto kind : {BathKind::low_frequency, BathKind::ohmic})
        for (double q : {1e4, 1e3})
            for (auto& c : bath_series(std::string("table1_") + short_name(kind) + "_" + q_label(q), kind, q, false))
                out.push_back(std::move(c));
    return out;
}

} // namespace

const std::vector<std::string>& preset_ids() {
    static const std::vector<std::string> ids{"fig2",  "fig3a", "fig3b", "fig3c", "fig3d",
                                              "fig4a", "fig4b", "fig5a", "fig5b", "table1"};
    return ids;
}

bool is_preset(std::string_view id) {
    for (const auto& p : preset_ids())
        if (p == id) return true;
    return false;
}

std::vector<ExperimentConfig> preset(std::string_view id) {
    const std::string s(id);
    if (s == "fig2") return densities();
    if (s == "fig3a") return cavity_only(s, 1e2, ModeSelection::full, true);
    if (s == "fig3b") return cavity_only(s, 1e2, ModeSelection::rwa, false);
    if (s == "fig3c") return cavity_only(s, 1e3, ModeSelection::full, false);
    if (s == "fig3d") return cavity_only(s, 1e3, ModeSelection::rwa, false);
    if (s == "fig4a") return bath_series(s, BathKind::low_frequency, 1e4, true);
    if (s == "fig4b") return bath_series(s, BathKind::ohmic, 1e4, true);
    if (s == "fig5a") return bath_series(s, BathKind::low_frequency, 1e3, true);
    if (s == "fig5b") return bath_series(s, BathKind::ohmic, 1e3, true);
    if (s == "table1") return table();
    std::string known;
    for (const auto& p : preset_ids()) known += (known.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset \"" + s + "\" (expected one of " + known + ")");
}

} // namespace qcse
