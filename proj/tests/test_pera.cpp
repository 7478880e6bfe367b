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

#include "phes/pera.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace phes;
using namespace phes::testing;

namespace {

const double kPi = std::acos(-1.0);

Vec Vec3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

Mat diag3(double a, double b, double c) { return Vec3(a, b, c).asDiagonal(); }

Vec at_q2(double q2) { return (Vec(3) << 0.4, q2, -0.7).finished(); }

}  // namespace

TEST_CASE("inertia at reference configurations") {
    const PeraParams pp;
    const MechanicalSystem sys = build_pera(pp);
    Mat expected(3, 3);
    expected << pp.i1 + pp.i2 + pp.i3, 0, pp.i3,
                0, pp.i2 + pp.i3 + 0.0256, 0,
                pp.i3, 0, pp.i3;
    CHECK(rel_diff(sys.inertia(at_q2(0.0)), expected) <= 1e-15);

    const Mat m = sys.inertia(at_q2(kPi / 2));
    CHECK(std::abs(m(0, 2)) <= 1e-15);
    CHECK(m(0, 0) == doctest::Approx(pp.i1 + pp.i2 + pp.i3 + 0.0256));
}

TEST_CASE("potential at reference configurations") {
    const MechanicalSystem sys = build_pera();
    CHECK(sys.potential().value(at_q2(0.0)) == doctest::Approx(0.0));
    CHECK(sys.potential().value(at_q2(kPi)) == doctest::Approx(3.1392));
}

TEST_CASE("only the elbow pitch carries gravity") {
    const MechanicalSystem sys = build_pera();
    std::mt19937_64 rng(6);
    for (int k = 0; k < 100; ++k) {
        const Vec g = sys.potential().gradient(uniform_vec(rng, 3, -kPi, kPi));
        CHECK(g(0) == 0.0);
        CHECK(g(2) == 0.0);
    }
}

TEST_CASE("scenario gains") {
    const auto all = pera_scenarios();
    REQUIRE(all.size() == 3);
    CHECK(all[0].name == "pera-s1");
    CHECK(all[0].gains.label == "S1");
    CHECK(rel_diff(all[0].gains.ki, diag3(200, 250, 350)) == 0.0);
    CHECK(rel_diff(all[1].gains.ki, diag3(200, 250, 200)) == 0.0);
    CHECK(rel_diff(all[2].gains.kp, diag3(5, 1, 20)) == 0.0);
    for (const PeraScenario& sc : all) {
        CHECK(sc.gains.kd.norm() == 0.0);
        CHECK(sc.initial.q.norm() == 0.0);
        CHECK(sc.initial.p.norm() == 0.0);
        CHECK(rel_diff(sc.gains.q_star, Vec3(-1.8, 1.57, 0.78)) == 0.0);
    }
    CHECK(pera_scenario("S2").name == "pera-s2");
    CHECK(pera_scenario("pera-s3").name == "pera-s3");
    CHECK_THROWS_WITH_AS(pera_scenario("s4"), doctest::Contains("available"), Error);
}

TEST_CASE("every scenario yields a valid closed loop") {
    const MechanicalSystem sys = build_pera();
    for (const PeraScenario& sc : pera_scenarios()) {
        CHECK(check_gain_condition(sys, sc.gains).holds);
        const ClosedLoopSystem cl = build_closed_loop(sys, sc.gains);
        CHECK(cl.hamiltonian_gradient(State(sc.gains.q_star, Vec::Zero(3))).norm() <= 1e-10);
    }
}

TEST_CASE("parameters are validated and described") {
    PeraParams bad;
    bad.i2 = -0.01;
    CHECK_THROWS_AS(build_pera(bad), Error);
    PeraParams neg;
    neg.damping = Vec3(0.1, -0.1, 0.0);
    CHECK_THROWS_AS(build_pera(neg), Error);

    PeraParams damped;
    damped.damping = Vec3(0.1, 0.2, 0.3);
    const MechanicalSystem sys = build_pera(damped);
    CHECK(rel_diff(sys.damping(at_q2(0.3), Vec::Zero(3)), diag3(0.1, 0.2, 0.3)) == 0.0);

    const std::string d = PeraParams().describe();
    for (const char* key : {"I1", "I2", "I3", "m2", "dc2", "g"}) {
        CHECK(d.find(key) != std::string::npos);
    }
}
