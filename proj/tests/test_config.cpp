/*
 Copyright 2026 The phes Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phes/config.hpp"
#include "phes/expr.hpp"
#include "support.hpp"

#include <cmath>

using namespace phes;
using namespace phes::testing;

namespace {

const double kPi = std::acos(-1.0);

// Returns (line, column) of the ParseError raised by parsing text.
std::pair<int, int> parse_error_at(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return {e.line(), e.column()};
    }
    return {0, 0};
}

double eval(const std::string& text, const Vec& q) { return Expression::parse(text, q.size())(q); }

const char* kCustom =
    "[model]\n"
    "name = custom\n"
    "dof = 2\n"
    "actuated = 1\n"
    "inertia = 2 + cos(q2), 0.5 * cos(q2); 0.5 * cos(q2), 1\n"
    "potential = 1 - cos(q1) + 0.5 * q2 * q2\n"
    "damping = 0.2, 0; 0, 0.1\n";

}  // namespace

TEST_CASE("full configuration") {
    const RunConfig c = parse_config(
        "# arm run\n"
        "[model]\n"
        "name = pera   # trailing comment\n"
        "i3 = 0.004\n"
        "damping = 0.1, 0.2, 0.3\n"
        "[gains]\n"
        "scenario = s2\n"
        "[region]\n"
        "q_radius = 0.25\n"
        "p_radius = 0.4\n"
        "grid = 5\n"
        "extra_samples = 16\n"
        "seed = 42\n"
        "[integrator]\n"
        "step = 2e-4\n"
        "horizon = 3\n"
        "record_every = 7\n"
        "[output]\n"
        "dir = results\n"
        "phi = ainv\n"
        "global = true\n"
        "canonical = false\n");
    CHECK(c.model == "pera");
    CHECK(c.pera.i3 == 0.004);
    CHECK(c.pera.damping(2) == 0.3);
    CHECK(c.scenario == "s2");
    CHECK(c.q_radius == 0.25);
    CHECK(c.grid_points == 5);
    CHECK(c.extra_samples == 16);
    CHECK(c.seed == 42u);
    CHECK(c.step == 2e-4);
    CHECK(c.record_every == 7u);
    CHECK(c.out_dir == "results");
    CHECK(c.phi == PhiChoice::kAInverse);
    CHECK(c.global);
    CHECK_FALSE(c.canonical);

    const Problem p = resolve(c);
    CHECK(p.gains.label == "S2");
    CHECK(p.region.seed == 42u);
    CHECK(p.sim.horizon == 3.0);
    bool seen_seed = false;
    bool seen_inertia = false;
    for (const std::string& line : p.comments) {
        seen_seed = seen_seed || line == "seed 42";
        seen_inertia = seen_inertia || line.find("I3=0.004") != std::string::npos;
    }
    CHECK(seen_seed);
    CHECK(seen_inertia);
}

TEST_CASE("parse errors carry line and column") {
    CHECK(parse_error_at("[model]\nname = msd1\nbogus = 1\n") == std::pair{3, 1});
    CHECK(parse_error_at("[model]\n  colour = 1\n") == std::pair{2, 3});
    CHECK(parse_error_at("[modle]\n") == std::pair{1, 2});
    CHECK(parse_error_at("name = pera\n") == std::pair{1, 1});
    CHECK(parse_error_at("[model]\nname = msd1\nname = pera\n") == std::pair{3, 1});
    CHECK(parse_error_at("[model\n") == std::pair{1, 1});
    CHECK(parse_error_at("[model]\nname\n") == std::pair{2, 1});
    CHECK(parse_error_at("[region]\nq_radius = 0.3x\n") == std::pair{2, 12});
    CHECK(parse_error_at("[region]\nq_radius = -1\n").first == 2);
    CHECK(parse_error_at("[gains]\nkp = 1, abc, 3\n") == std::pair{2, 9});
    CHECK(parse_error_at("[output]\nphi = bogus\n").first == 2);
    CHECK(parse_error_at("[output]\nglobal = maybe\n").first == 2);
    CHECK(parse_error_at("[integrator]\nrecord_every = 0\n").first == 2);
}

TEST_CASE("model-specific keys are checked") {
    CHECK(parse_error_at("[model]\nname = msd1\ni1 = 0.1\n").first == 3);
    CHECK(parse_error_at("[model]\nname = pera\ndof = 2\n").first == 3);
    CHECK(parse_error_at("[model]\nname = custom\ndof = 1\nactuated = 1\ninertia = 1\n").first > 0);
    CHECK_THROWS_AS(resolve(parse_config("[model]\nname = msd1\n[gains]\nscenario = s1\n")), Error);
    CHECK_THROWS_AS(resolve(parse_config("[model]\nname = nothing\n")), Error);
}

TEST_CASE("custom model from expressions") {
    const RunConfig c = parse_config(kCustom);
    REQUIRE(c.custom);
    const MechanicalSystem& sys = *c.custom;
    CHECK(sys.dof() == 2);
    CHECK(sys.actuated() == 1);
    const Vec q = (Vec(2) << 0.4, -0.9).finished();
    const Mat m = sys.inertia(q);
    CHECK(m(0, 0) == doctest::Approx(2 + std::cos(-0.9)));
    CHECK(m(0, 1) == doctest::Approx(0.5 * std::cos(-0.9)));
    CHECK(sys.potential().value(q) == doctest::Approx(1 - std::cos(0.4) + 0.405));
    const Vec g = sys.potential().gradient(q);
    CHECK(rel_diff(g, oracle_gradient([&](const Vec& x) { return sys.potential().value(x); }, q)) <=
          1e-6);
    CHECK(sys.damping(q, Vec::Zero(2))(0, 0) == doctest::Approx(0.2));

    const Problem p = resolve(c);
    CHECK(p.gains.kp.rows() == 1);
    CHECK(p.initial.q.size() == 2);
}

TEST_CASE("custom inertia must be symmetric positive definite") {
    std::string bad = kCustom;
    bad.replace(bad.find("inertia = 2 + cos(q2)"), 21, "inertia = -2 + cos(q2)");
    CHECK_THROWS_AS(parse_config(bad), ParseError);
    CHECK_THROWS_AS(make_custom_model(2, 2, "1, 0.5; 0, 1", "q1 * q1 + q2 * q2"), Error);
    CHECK_THROWS_AS(make_custom_model(2, 2, "1, 0; 0", "q1"), Error);
}

TEST_CASE("expression grammar") {
    const Vec q = (Vec(3) << 0.5, -2.0, 3.0).finished();
    CHECK(eval("1 + 2 * 3", q) == 7.0);
    CHECK(eval("(1 + 2) * 3", q) == 9.0);
    CHECK(eval("8 / 4 / 2", q) == 1.0);
    CHECK(eval("2 - 3 - 4", q) == -5.0);
    CHECK(eval("-q2", q) == 2.0);
    CHECK(eval("--q2", q) == -2.0);
    CHECK(eval("+q1 * -q3", q) == -1.5);
    CHECK(eval("1.5e2", q) == 150.0);
    CHECK(eval("2.5E-1", q) == 0.25);
    CHECK(eval("pi", q) == kPi);
    CHECK(eval("sin(q1) * cos(q2)", q) == std::sin(0.5) * std::cos(-2.0));
    CHECK(eval("cos(pi / 2 - q1)", q) == doctest::Approx(std::sin(0.5)));
    CHECK(Expression::parse("q1 + q2", 2).text() == "q1 + q2");
}

TEST_CASE("expression errors point at the offending character") {
    auto column_of = [](const std::string& text, Index dof) {
        try {
            Expression::parse(text, dof, 4, 10);
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
            return e.column() - 10;
        }
        return -1;
    };
    CHECK(column_of("1 + ", 1) == 4);
    CHECK(column_of("q3", 2) == 0);
    CHECK(column_of("q0", 2) == 0);
    CHECK(column_of("tan(q1)", 1) == 0);
    CHECK(column_of("(1 + 2", 1) == 6);
    CHECK(column_of("1 2", 1) == 2);
    CHECK(column_of("sin q1", 1) == 4);
    CHECK(column_of("1 $ 2", 1) == 2);
}

TEST_CASE("vectors broadcast and check their size") {
    CHECK(parse_vector("1.5", 3) == Vec::Constant(3, 1.5));
    CHECK(parse_vector("1, 2, 3", 3) == (Vec(3) << 1, 2, 3).finished());
    CHECK_THROWS_AS(parse_vector("1, 2", 3), ParseError);
    CHECK_THROWS_AS(resolve(parse_config("[model]\nname = linear\n[gains]\nkp = 1, 2, 3\n")),
                    Error);
}

TEST_CASE("missing config file") {
    CHECK_THROWS_AS(load_config("/nonexistent/phes.cfg"), IoError);
}

TEST_CASE("defaults per built-in model") {
    const Problem msd = resolve(parse_config("[model]\nname = msd1\n"));
    CHECK(msd.gains.ki(0, 0) == 2.0);
    CHECK(msd.initial.q(0) == 1.0);
    const Problem pera = resolve(RunConfig{});
    CHECK(pera.gains.label == "S1");
    CHECK(pera.sim.step == 1e-4);
    CHECK(pera.region.q_radii(0) == 0.3);
}

TEST_CASE("identical configurations give identical certificates") {
    const std::string text = "[model]\nname = pendulum\n[gains]\nki = 12\n[region]\nextra_samples = 40\nseed = 9\n";
    auto run = [&]() {
        const Problem p = resolve(parse_config(text));
        const CanonicalPHSystem c = to_canonical(build_closed_loop(p.sys, p.gains));
        return to_text(make_certificate(c, p.region, p.phi), p.comments);
    };
    const std::string a = run();
    CHECK(a == run());
    CHECK(a.find("seed 9") != std::string::npos);
}
