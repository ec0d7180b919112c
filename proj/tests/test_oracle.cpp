#include <doctest.h>

#include <cmath>

#include "qcse/config.hpp"
#include "qcse/dynamics.hpp"
#include "qcse/errors.hpp"
#include "qcse/oracle.hpp"
#include "reference.hpp"

using namespace qcse;

TEST_SUITE("oracle") {

TEST_CASE("cell edges partition the band") {
    for (auto placement : {Placement::uniform, Placement::graded}) {
        for (double half : {0.01, 1.0, 20.0}) {
            DiscretizeOptions o;
            o.modes = 1000;
            o.lo = 0.0;
            o.hi = 50.0;
            o.placement = placement;
            o.core_center = 10.0;
            o.core_half_width = half;
            const auto e = cell_edges(o);
            REQUIRE(e.size() == 1001);
            CHECK(e.front() == 0.0);
            CHECK(e.back() == doctest::Approx(50.0).epsilon(1e-14));
            for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] > e[i - 1]);
        }
    }
}

TEST_CASE("graded cells are finest on the core") {
    DiscretizeOptions o;
    o.modes = 2000;
    o.hi = 50.0;
    o.core_center = 10.0;
    o.core_half_width = 0.5;
    const auto e = cell_edges(o);
    double core = 0.0, outside = 0.0;
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double w = e[i] - e[i - 1], mid = 0.5 * (e[i] + e[i - 1]);
        if (std::abs(mid - 10.0) < 0.5) core = std::max(core, w);
        else outside = std::max(outside, w);
    }
    CHECK(core == doctest::Approx(1.0 / 1000.0).epsilon(1e-6));
    CHECK(outside > 10.0 * core);
}

TEST_CASE("coupling sum rule") {
    SUBCASE("Lorentzian cavity, rwa") {
        const LorentzianCavity cav{1.0, 0.1, 10.0};
        Environment env;
        env.cavity = cav;
        OracleSettings s;
        const auto opt = discretize_options(env, BathKind::lorentzian_cavity, 10.0, s);
        const auto b = discretize(cav, 1.0, 10.0, Mode::rwa, opt);
        const auto f = [&](double w) { return eval_density(cav, w, 10.0); };
        const double exact = ref::integrate(f, ref::lorentzian_points(10.0, 0.1, opt.lo, opt.hi));
        CHECK(coupling_sum(b) == doctest::Approx(exact).epsilon(1e-3));
    }
    SUBCASE("Ohmic bath, full") {
        const Ohmic bath{1e-3, 100.0};
        const double eta = 0.995;
        DiscretizeOptions o;
        o.modes = 4000;
        o.hi = 50.0;
        o.core_center = 10.0;
        o.core_half_width = 0.5;
        const auto b = discretize(bath, eta, 10.0, Mode::full, o);
        const auto f = [&](double w) {
            const double c = coupling_renorm_factor(w, eta, 10.0);
            return c * c * eval_density(bath, w, 10.0);
        };
        const double exact = ref::integrate(f, {0.0, 1.0, 9.5, 10.5, 20.0, 50.0});
        CHECK(coupling_sum(b) == doctest::Approx(exact).epsilon(1e-3));
    }
}

TEST_CASE("too few modes on a narrow cavity") {
    const LorentzianCavity cav{0.2, 1e-3, 10.0};
    DiscretizeOptions o;
    o.modes = 100;
    o.placement = Placement::uniform;
    CHECK_THROWS_AS(discretize(cav, 1.0, 10.0, Mode::rwa, o), ConfigError);
}

TEST_CASE("single resonant mode gives cos(g t)") {
    const double g = 0.3;
    const std::vector<DiscretizedBath> baths{single_mode(10.0, g)};
    EvolveOptions o;
    o.t_max = 50.0;
    o.dt = 0.01;
    const auto tr = evolve(baths, 10.0, o);
    double dev = 0.0;
    for (std::size_t i = 0; i < tr.time.size(); ++i)
        dev = std::max(dev, std::abs(tr.chi[i] - std::cos(g * tr.time[i])));
    CHECK(dev < 1e-8);
    CHECK(tr.max_norm_drift < 1e-10);
}

TEST_CASE("uncoupled modes leave chi at 1") {
    const std::vector<DiscretizedBath> baths{single_mode(12.0, 0.0)};
    EvolveOptions o;
    o.t_max = 10.0;
    const auto tr = evolve(baths, 10.0, o);
    for (const auto& c : tr.chi) CHECK(std::abs(c - 1.0) == 0.0);
}

TEST_CASE("oracle population follows the analytic dynamics") {
    const auto env = preset("fig4a").at(1).environment;
    OracleSettings s;
    const auto run = run_oracle(env, Mode::full, s);
    const auto tr = survival_amplitude(matched_kernel(env, Mode::full, s));
    double dev = 0.0;
    for (std::size_t i = 0; i < run.trace.time.size(); ++i)
        dev = std::max(dev, std::abs(std::norm(run.trace.chi[i]) - std::norm(amplitude_at(tr, run.trace.time[i]))));
    CHECK(dev < 0.02);
}

TEST_CASE("oracle spectrum peaks agree with the analytic scan") {
    const auto cfg = preset("fig3a").at(1);
    OracleSettings s;
    const auto run = run_oracle(cfg.environment, Mode::full, s);
    OracleSpectrumOptions so;
    so.lo = cfg.environment.delta - cfg.scan.half_span;
    so.hi = cfg.environment.delta + cfg.scan.half_span;
    const auto o = find_peaks(oracle_spectrum(run.trace, cfg.environment, Mode::full, so));
    ScanOptions sc;
    sc.half_span = cfg.scan.half_span;
    const auto a = find_peaks(scan_spectrum(matched_kernel(cfg.environment, Mode::full, s), sc));
    REQUIRE(o.peak_count == 2);
    REQUIRE(a.peak_count == 2);
    const double step = (so.hi - so.lo) / 4000.0;
    for (int i = 0; i < 2; ++i) CHECK(std::abs(o.peaks[i].position - a.peaks[i].position) < step);
}

TEST_CASE("oracle reproduces the peak height ordering of the Ohmic strong-coupling doublet") {
    const auto cfg = preset("fig4b").at(1);
    OracleSettings s;
    s.evolve.t_max = 1000.0;
    const auto run = run_oracle(cfg.environment, Mode::full, s);
    OracleSpectrumOptions so;
    so.lo = cfg.environment.delta - cfg.scan.half_span;
    so.hi = cfg.environment.delta + cfg.scan.half_span;
    so.taper_fraction = 0.5;
    so.decay_threshold = 2.0;
    const auto o = find_peaks(oracle_spectrum(run.trace, cfg.environment, Mode::full, so));
    ScanOptions sc;
    sc.half_span = cfg.scan.half_span;
    const auto a = find_peaks(scan_spectrum(matched_kernel(cfg.environment, Mode::full, s), sc));
    REQUIRE(o.peak_count == 2);
    CHECK((o.height_ratio < 1.0) == (a.height_ratio < 1.0));
    CHECK(o.height_ratio == doctest::Approx(a.height_ratio).epsilon(0.03));
}

TEST_CASE("undecayed trace is rejected by the spectrum") {
    const std::vector<DiscretizedBath> baths{single_mode(10.0, 0.3)};
    EvolveOptions o;
    o.t_max = 20.0;
    const auto tr = evolve(baths, 10.0, o);
    Environment env;
    CHECK_THROWS_AS(oracle_spectrum(tr, env, Mode::full), NumericError);
}

}
