#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cstring>
#include <string>

#include "mfsi/analysis.hpp"
#include "mfsi/error.hpp"
#include "mfsi/io.hpp"
#include "mfsi/scenario.hpp"

using namespace mfsi;

namespace {

ErrorCode code_of(const std::string& bytes, bool checked = true) {
    try {
        parse_scenario(bytes, checked);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse failure");
    return ErrorCode::UsageError;
}

const char* kMinimal = R"({
  "alpha": 0.2, "sigma": 0.29, "beta1": 0.67, "beta2": 0.56,
  "mu1": 0.8, "mu2": 0.41, "s0": 10000, "i0": 1865, "t0": 0, "t1": 10
})";

std::string with_replacement(const std::string& needle, const std::string& repl) {
    std::string text = kMinimal;
    auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    text.replace(at, needle.size(), repl);
    return text;
}

} // namespace

TEST_CASE("presets round-trip through serialization") {
    for (char name : {'A', 'B', 'C', 'D'}) {
        Scenario sc = preset(name);
        Scenario back = parse_scenario(serialize_scenario(sc));
        CHECK(back.params.alpha == sc.params.alpha);
        CHECK(back.params.sigma == sc.params.sigma);
        CHECK(back.params.beta1 == sc.params.beta1);
        CHECK(back.params.beta2 == sc.params.beta2);
        CHECK(back.params.mu1 == sc.params.mu1);
        CHECK(back.params.mu2 == sc.params.mu2);
        CHECK(back.x0.s == sc.x0.s);
        CHECK(back.x0.i == sc.x0.i);
        CHECK(back.t0 == sc.t0);
        CHECK(back.t1 == sc.t1);
        CHECK(back.label == sc.label);
        CHECK(back.assumed == sc.assumed);
        CHECK(back.solver.method == sc.solver.method);
        CHECK(back.solver.step == sc.solver.step);
        CHECK(back.solver.rel_tol == sc.solver.rel_tol);
        CHECK(back.solver.max_step_count == sc.solver.max_step_count);
        CHECK(back.solver.blowup_threshold == sc.solver.blowup_threshold);
    }
    CHECK(preset('B').assumed);
    CHECK(!preset('C').assumed);
    CHECK_THROWS_AS(preset('E'), Error);

    // serialization is deterministic
    CHECK(serialize_scenario(preset('C')) == serialize_scenario(preset('C')));
}

TEST_CASE("minimal scenario parses with solver defaults") {
    Scenario sc = parse_scenario(kMinimal);
    CHECK(sc.params.beta1 == 0.67);
    CHECK(sc.x0.s == 10000.0);
    CHECK(sc.t1 == 10.0);
    CHECK(sc.label.empty());
    CHECK(!sc.assumed);
    CHECK(sc.solver.method == SolverMethod::rk4_fixed);
    CHECK(sc.solver.step == 1e-3);
    CHECK(sc.solver.max_step_count == 10000000);
    CHECK(sc.solver.blowup_threshold == 1e12);
}

TEST_CASE("solver block is honored") {
    std::string text = with_replacement(
        "\"t1\": 10",
        "\"t1\": 10, \"solver\": {\"method\": \"rk4-adaptive\", \"step\": 0.01, "
        "\"rel_tol\": 1e-10, \"max_steps\": 500, \"blowup_threshold\": 1e6}");
    Scenario sc = parse_scenario(text);
    CHECK(sc.solver.method == SolverMethod::rk4_adaptive);
    CHECK(sc.solver.step == 0.01);
    CHECK(sc.solver.rel_tol == 1e-10);
    CHECK(sc.solver.max_step_count == 500);
    CHECK(sc.solver.blowup_threshold == 1e6);
}

TEST_CASE("parse failures carry the right code and location") {
    CHECK(code_of("{ not json") == ErrorCode::SyntaxError);
    CHECK(code_of("[1,2,3]") == ErrorCode::SchemaError);

    // unknown key is named with its path
    try {
        parse_scenario(with_replacement("\"t1\": 10", "\"t1\": 10, \"gamma\": 1"));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaError);
        CHECK(std::string(e.what()).find("$.gamma") != std::string::npos);
    }
    try {
        parse_scenario(with_replacement(
            "\"t1\": 10", "\"t1\": 10, \"solver\": {\"turbo\": true}"));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("$.solver.turbo") != std::string::npos);
    }

    // missing and mistyped fields
    CHECK(code_of(with_replacement("\"mu2\": 0.41, ", "")) == ErrorCode::SchemaError);
    CHECK(code_of(with_replacement("\"s0\": 10000", "\"s0\": \"big\"")) ==
          ErrorCode::SchemaError);
    CHECK(code_of(with_replacement("\"t1\": 10",
                                   "\"t1\": 10, \"solver\": {\"max_steps\": 1.5}")) ==
          ErrorCode::SchemaError);
    CHECK(code_of(with_replacement("\"t1\": 10",
                                   "\"t1\": 10, \"solver\": {\"method\": \"euler\"}")) ==
          ErrorCode::SchemaError);

    // domain checks still apply after the schema pass
    CHECK(code_of(with_replacement("\"alpha\": 0.2", "\"alpha\": 0")) ==
          ErrorCode::AlphaOutOfRange);
    CHECK(code_of(with_replacement("\"t1\": 10", "\"t1\": -1")) == ErrorCode::InvalidSpan);
    CHECK(code_of(with_replacement("\"mu1\": 0.8", "\"mu1\": 5")) ==
          ErrorCode::FieldOutOfRange);

    // rate cap can be lifted explicitly
    Scenario loose = parse_scenario(with_replacement("\"mu1\": 0.8", "\"mu1\": 5"), false);
    CHECK(loose.params.mu1 == 5.0);
}

TEST_CASE("shortest round-trip number formatting") {
    for (double v : {0.1, 1.0 / 3.0, 1e300, 1e-300, -2.5, 0.0, 12000.0, 6.873863636363637}) {
        std::string text = format_double(v);
        double back = 0;
        auto r = std::from_chars(text.data(), text.data() + text.size(), back);
        REQUIRE(r.ec == std::errc{});
        CHECK(std::memcmp(&back, &v, sizeof(double)) == 0);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(12000.0) == "12000");
}

TEST_CASE("row thinning keeps the ends and spaces evenly") {
    auto idx = thin_indices(51, 11);
    REQUIRE(idx.size() == 11);
    CHECK(idx.front() == 0);
    CHECK(idx.back() == 50);
    for (std::size_t j = 0; j < 11; ++j)
        CHECK(idx[j] == j * 5);

    auto all = thin_indices(100, 10001);
    REQUIRE(all.size() == 100);
    CHECK(all[37] == 37);

    auto two = thin_indices(1000, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == 0);
    CHECK(two[1] == 999);
}

TEST_CASE("trajectory CSV layout") {
    Scenario sc = preset('C');
    sc.t1 = 0.05;
    Trajectory traj = integrate(sc.params, sc.x0, sc.t0, sc.t1, sc.solver);
    std::string csv = trajectory_csv(sc, traj);

    CHECK(csv.rfind("t,s,i,p,par\n", 0) == 0);
    CHECK(csv.find("0,10000,1865,59325,0.1571849978929625\n") != std::string::npos);
    // byte-identical across invocations
    CHECK(csv == trajectory_csv(sc, traj));

    // thinned output keeps exactly the selected sample rows
    std::string thin = trajectory_csv(sc, traj, 11);
    std::size_t rows = 0;
    for (char c : thin)
        rows += (c == '\n');
    CHECK(rows == 12); // header + 11 samples
    CHECK(thin.find("0.05," + format_double(traj.samples.back().x.s)) != std::string::npos);
}

TEST_CASE("a resting trajectory reports an undefined portfolio share") {
    Scenario sc = preset('C');
    sc.x0 = {0.0, 0.0};
    Trajectory traj = integrate(sc.params, sc.x0, 0.0, 0.01, sc.solver);
    std::string csv = trajectory_csv(sc, traj);
    CHECK(csv.find("0,0,0,0,nan\n") != std::string::npos);
}

TEST_CASE("sweep CSV layout") {
    SweepBase base;
    base.params = preset('D').params;
    base.x0 = preset('D').x0;
    base.t0 = 0.0;
    base.t1 = 1.0;
    base.solver = SolverConfig{};
    SweepMap map = sweep(base, {"mu1", 0.5, 1.5, 2}, {"beta1", 0.2, 0.8, 2});
    std::string csv = sweep_csv(map);
    CHECK(csv.rfind("axis1,axis2,outcome,endpoint_s,endpoint_i\n", 0) == 0);
    // row order is axis1-major
    auto first = csv.find("\n0.5,0.2,");
    auto second = csv.find("\n0.5,0.8,");
    auto third = csv.find("\n1.5,0.2,");
    CHECK(first != std::string::npos);
    CHECK(second != std::string::npos);
    CHECK(third != std::string::npos);
    CHECK(first < second);
    CHECK(second < third);
    // invalid cells write nan endpoints
    CHECK(csv.find("1.5,0.2,invalid,nan,nan\n") != std::string::npos);
    CHECK(csv == sweep_csv(map));
}

TEST_CASE("SVG charts are well formed and deterministic") {
    Scenario sc = preset('C');
    sc.t1 = 0.05;
    Trajectory traj = integrate(sc.params, sc.x0, sc.t0, sc.t1, sc.solver);
    std::string svg = trajectory_svg(traj);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos;
         at = svg.find("<polyline", at + 1))
        ++polylines;
    CHECK(polylines == 2);
    CHECK(svg == trajectory_svg(traj));
    CHECK(svg.find("</svg>") != std::string::npos);

    // a flat one-sample trajectory must not divide by a zero range
    Trajectory flat;
    flat.samples = {{0.0, {5.0, 5.0}}};
    flat.status = TrajectoryStatus::completed;
    std::string tiny = trajectory_svg(flat);
    CHECK(tiny.find("</svg>") != std::string::npos);
    CHECK(tiny.find("nan") == std::string::npos);

    SweepBase base;
    base.params = preset('D').params;
    base.x0 = preset('D').x0;
    base.t0 = 0.0;
    base.t1 = 1.0;
    base.solver = SolverConfig{};
    SweepMap map = sweep(base, {"beta1", 0.0, 1.0, 3}, {"beta2", 0.0, 1.0, 3});
    std::string raster = sweep_svg(map);
    CHECK(raster.rfind("<svg", 0) == 0);
    std::size_t rects = 0;
    for (std::size_t at = raster.find("<rect"); at != std::string::npos;
         at = raster.find("<rect", at + 1))
        ++rects;
    CHECK(rects >= 9); // one per cell plus legend swatches
    CHECK(raster == sweep_svg(map));
}

TEST_CASE("observation CSV parsing") {
    ObservationSet obs = parse_observations_csv("t,s,i\n0,10,2\n1,11,3\n2,12,4\n");
    REQUIRE(obs.rows.size() == 3);
    CHECK(obs.rows[1].t == 1.0);
    CHECK(obs.rows[1].s == 11.0);
    CHECK(obs.rows[1].w == 1.0);

    ObservationSet weighted =
        parse_observations_csv("t,s,i,w\n0,10,2,1\n1,11,3,0.5\n2,12,4,0\n");
    CHECK(weighted.rows[1].w == 0.5);
    CHECK(weighted.rows[2].w == 0.0);

    CHECK_THROWS_AS(parse_observations_csv("time,s,i\n0,1,2\n1,2,3\n2,3,4\n"), Error);
    CHECK_THROWS_AS(parse_observations_csv("t,s,i\n0,1,2\n1,2\n2,3,4\n"), Error);
    CHECK_THROWS_AS(parse_observations_csv("t,s,i\n0,1,2\n1,two,3\n2,3,4\n"), Error);
    CHECK_THROWS_AS(parse_observations_csv("t,s,i\n0,1,2\n1,2,3\n"), Error);
    CHECK_THROWS_AS(parse_observations_csv(""), Error);

    // line numbers point at the offender
    try {
        parse_observations_csv("t,s,i\n0,1,2\n1,two,3\n2,3,4\n");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    // writer and parser are inverse
    std::string bytes = observations_csv(weighted);
    ObservationSet back = parse_observations_csv(bytes);
    REQUIRE(back.rows.size() == weighted.rows.size());
    for (std::size_t j = 0; j < back.rows.size(); ++j) {
        CHECK(back.rows[j].t == weighted.rows[j].t);
        CHECK(back.rows[j].s == weighted.rows[j].s);
        CHECK(back.rows[j].i == weighted.rows[j].i);
        CHECK(back.rows[j].w == weighted.rows[j].w);
    }
}

TEST_CASE("equilibria and fit reports") {
    auto eqs = find_equilibria(preset('C').params, default_region());
    std::string report = equilibria_report(default_region(), eqs);
    CHECK(report.find("2 found") != std::string::npos);
    CHECK(report.find("class=saddle") != std::string::npos);
    CHECK(report.find("class=unstable_node") != std::string::npos);
    CHECK(report == equilibria_report(default_region(), eqs));

    FitResult fr;
    fr.params = preset('C').params;
    fr.x0 = {10000.0, 1865.0};
    fr.residual = 0.5;
    fr.evaluations = 42;
    fr.converged = true;
    fr.trace = {{0, 1.0}, {1, 0.5}};
    std::string fit_text = fit_report(fr, {"beta1"});
    CHECK(fit_text.find("fit converged=true") != std::string::npos);
    CHECK(fit_text.find("evaluations=42") != std::string::npos);
    CHECK(fit_text.find("beta1=0.67 fitted") != std::string::npos);
    CHECK(fit_text.find("mu1=0.8 frozen") != std::string::npos);
    CHECK(fit_text.find("x0=(10000,1865)") != std::string::npos);
}
