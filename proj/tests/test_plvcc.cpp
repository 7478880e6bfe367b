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

#include "phes/models.hpp"
#include "phes/pera.hpp"
#include "phes/plvcc.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace phes;
using namespace phes::testing;

namespace {

GainSet coupled_gains() {
    return GainSet::diagonal("c", (Vec(2) << 2.0, 1.0).finished(),
                             (Vec(2) << 3.0, 4.0).finished(), (Vec(2) << 0.5, 0.8).finished(),
                             (Vec(2) << 0.4, -0.3).finished());
}

GainSet scalar_gains(double kp, double ki, double q_star) {
    return GainSet::diagonal("g", Vec::Constant(1, kp), Vec::Constant(1, ki), Vec::Zero(1),
                             Vec::Constant(1, q_star));
}

// Symmetric PD field S(q) = B(q) B(q)^T + I for a fixed smooth B.
Mat smooth_pd(const Vec& q) {
    Mat b(3, 3);
    b << 1 + std::sin(q(0)), q(1), 0.3,
         std::cos(q(2)), 2.0, q(0) * q(1),
         0.1, std::sin(q(1) + q(2)), 1.5;
    return b * b.transpose() + Mat::Identity(3, 3);
}

}  // namespace

TEST_CASE("upper Cholesky examples") {
    CHECK(rel_diff(upper_cholesky(Mat::Identity(3, 3)), Mat::Identity(3, 3)) == 0.0);
    Mat s(2, 2);
    s << 2, 1, 1, 1;
    Mat t(2, 2);
    t << 1, 1, 0, 1;
    CHECK(rel_diff(upper_cholesky(s), t) <= 1e-15);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 9;
    Mat r = Mat::Zero(2, 2);
    r(0, 0) = 2;
    r(1, 1) = 3;
    CHECK(rel_diff(upper_cholesky(d), r) <= 1e-15);
}

TEST_CASE("upper Cholesky rejects indefinite input") {
    Mat s(2, 2);
    s << 1, 2, 2, 1;
    CHECK_THROWS_AS(upper_cholesky(s), NumericError);
    CHECK_THROWS_AS(upper_cholesky(Mat::Identity(2, 3)), ShapeError);
}

TEST_CASE("upper Cholesky reconstruction on random matrices") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 1000; ++k) {
        const Index n = 1 + k % 6;
        const Mat s = random_pd(rng, n);
        const Mat t = upper_cholesky(s);
        CHECK((t * t.transpose() - s).norm() / s.norm() <= 1e-10);
        CHECK(t.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm() == 0.0);
        CHECK(t.diagonal().minCoeff() > 0.0);
    }
}

TEST_CASE("Cholesky partials of simple fields") {
    const MatrixField constant = MatrixField::constant(2.0 * Mat::Identity(2, 2));
    for (const Mat& dt : cholesky_partials(constant, Vec::Ones(2))) CHECK(dt.norm() == 0.0);

    const MatrixField f = MatrixField::of_q([](const Vec& q) {
        Mat m = Mat::Identity(2, 2);
        m(0, 0) = 1 + q(0) * q(0);
        return m;
    });
    const auto dts = cholesky_partials(f, (Vec(2) << 1.0, 0.0).finished());
    CHECK(dts[0](0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
    CHECK(std::abs(dts[0](1, 1)) <= 1e-10);
    CHECK(dts[1].norm() <= 1e-10);
}

TEST_CASE("Cholesky partials solve the differential relation") {
    std::mt19937_64 rng(8);
    const MatrixField field = MatrixField::of_q(smooth_pd);
    for (int k = 0; k < 50; ++k) {
        const Vec q = uniform_vec(rng, 3, -1.5, 1.5);
        const Mat t = upper_cholesky(smooth_pd(q));
        const auto dts = cholesky_partials(field, q);
        for (Index i = 0; i < 3; ++i) {
            const Mat ds = oracle_matrix_partial(smooth_pd, q, i);
            CHECK((dts[i] * t.transpose() + t * dts[i].transpose() - ds).norm() <= 1e-6);
            const Mat fd = oracle_matrix_partial(
                [](const Vec& x) { return upper_cholesky(smooth_pd(x)); }, q, i);
            CHECK((dts[i] - fd).norm() <= 1e-6);
        }
    }
}

TEST_CASE("canonical form of the mass-spring-damper") {
    const ClosedLoopSystem cl = build_closed_loop(make_msd1(), scalar_gains(1, 2, 0.0));
    const CanonicalPHSystem c = to_canonical(cl);
    const Vec q = Vec::Constant(1, 0.4);
    const Vec p = Vec::Constant(1, -0.7);
    const CanonicalPoint pt = c.point(q, p);
    CHECK(pt.a(0, 0) == doctest::Approx(1.0));
    CHECK(pt.j.norm() == doctest::Approx(0.0));
    CHECK(pt.d(0, 0) == doctest::Approx(1.5));
    CHECK(pt.u == doctest::Approx(3 * 0.16));
    CHECK(c.potential().value(Vec::Zero(1)) == doctest::Approx(0.0));
}

TEST_CASE("constant shaped inertia gives no transport term") {
    const MechanicalSystem sys = make_linear(2, 1.0, 0.5);
    const GainSet g = GainSet::diagonal("l", Vec::Ones(2), Vec::Constant(2, 2.0),
                                        (Vec(2) << 0.7, 1.3).finished(),
                                        (Vec(2) << 0.2, -0.1).finished());
    const ClosedLoopSystem cl = build_closed_loop(sys, g);
    const CanonicalPHSystem c = to_canonical(cl);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        const CanonicalPoint pt = c.point(uniform_vec(rng, 2, -1, 1), uniform_vec(rng, 2, -1, 1));
        CHECK(pt.j.norm() <= 1e-14);
    }
}

TEST_CASE("state map examples") {
    const ClosedLoopSystem unit = build_closed_loop(make_msd1(), scalar_gains(1, 2, 0.0));
    const State s(Vec::Constant(1, 0.3), Vec::Constant(1, -1.2));
    const State m = map_state(unit, s);
    CHECK(m.q(0) == doctest::Approx(0.3));
    CHECK(m.p(0) == doctest::Approx(-1.2));

    const MechanicalSystem heavy = scalar_system(4.0, 4.0, 0.5, false);
    const ClosedLoopSystem cl = build_closed_loop(heavy, scalar_gains(1, 2, 0.0));
    const State z = map_state(cl, State(Vec::Ones(1), Vec::Constant(1, 2.0)));
    CHECK(z.q(0) == doctest::Approx(1.0));
    CHECK(z.p(0) == doctest::Approx(1.0));
}

TEST_CASE("state map round trip on the arm") {
    const ClosedLoopSystem cl = build_closed_loop(build_pera(), pera_scenario("s1").gains);
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        const State s(uniform_vec(rng, 3, -3, 3), uniform_vec(rng, 3, -2, 2));
        const State back = inverse_map_state(cl, map_state(cl, s));
        CHECK((back.stacked() - s.stacked()).norm() <= 1e-12 * (1 + s.stacked().norm()));
    }
}

TEST_CASE("canonical fields match their definitions") {
    const MechanicalSystem sys = coupled_system();
    const GainSet g = coupled_gains();
    const ClosedLoopSystem cl = build_closed_loop(sys, g);
    const CanonicalPHSystem c = to_canonical(cl);
    std::mt19937_64 rng(23);
    for (int k = 0; k < 50; ++k) {
        const Vec q = uniform_vec(rng, 2, -1, 1);
        const Vec p = uniform_vec(rng, 2, -1, 1);
        const Vec qm = q + g.q_star;
        const Mat t = upper_cholesky(cl.inertia_d(qm).inverse());
        const Vec pm = t.transpose().inverse() * p;
        const CanonicalPoint pt = c.point(q, p);
        CHECK(rel_diff(pt.a, sys.inertia(qm).inverse() * t.transpose().inverse()) <= 1e-12);
        CHECK(rel_diff(pt.d, t.transpose() * cl.dissipation(qm, pm) * t) <= 1e-12);
        CHECK(rel_diff(pt.u, cl.potential_d(qm) - cl.potential_d(g.q_star)) <= 1e-12);
    }
}

TEST_CASE("assembled interconnection is skew") {
    std::mt19937_64 rng(29);
    for (const auto& [sys, g] :
         std::vector<std::pair<MechanicalSystem, GainSet>>{
             {coupled_system(), coupled_gains()},
             {build_pera(), pera_scenario("s1").gains}}) {
        const CanonicalPHSystem c = to_canonical(build_closed_loop(sys, g));
        const Index n = sys.dof();
        for (int k = 0; k < 1000; ++k) {
            const Mat j = c.point(uniform_vec(rng, n, -1, 1), uniform_vec(rng, n, -2, 2)).j;
            CHECK((j + j.transpose()).norm() <= 1e-9);
        }
    }
}

TEST_CASE("energy is preserved by the state map") {
    std::mt19937_64 rng(31);
    for (const auto& [sys, g] :
         std::vector<std::pair<MechanicalSystem, GainSet>>{
             {coupled_system(), coupled_gains()},
             {build_pera(), pera_scenario("s2").gains}}) {
        const ClosedLoopSystem cl = build_closed_loop(sys, g);
        const CanonicalPHSystem c = to_canonical(cl);
        const Index n = sys.dof();
        for (int k = 0; k < 200; ++k) {
            const State s(g.q_star + uniform_vec(rng, n, -1, 1), uniform_vec(rng, n, -2, 2));
            const State z = map_state(cl, s);
            const double hc = 0.5 * z.p.squaredNorm() + c.potential().value(z.q);
            CHECK(std::abs(cl.hamiltonian(s) - (hc + c.energy_offset())) <=
                  1e-10 * (1 + std::abs(cl.hamiltonian(s))));
        }
    }
}

TEST_CASE("canonical flow is the pushforward of the shaped flow") {
    // Configuration-dependent inertia with derivative action exercises every
    // term of the transformed interconnection.
    const MechanicalSystem sys = coupled_system();
    const GainSet g = coupled_gains();
    const ClosedLoopSystem cl = build_closed_loop(sys, g);
    const CanonicalPHSystem c = to_canonical(cl);
    auto fx = [&](const Vec& x) { return cl.vector_field(State::from_stacked(x)); };
    auto fz = [&](const Vec& z) { return c.vector_field(State::from_stacked(z)); };
    Vec x = (Vec(4) << 1.0, -0.8, 0.5, 0.6).finished();
    Vec z = map_state(cl, State::from_stacked(x)).stacked();
    double worst = 0.0;
    for (int k = 0; k < 50000; ++k) {
        x = oracle_rk4(fx, x, 1e-4);
        z = oracle_rk4(fz, z, 1e-4);
        if (k % 50 == 0) {
            const Vec mapped = map_state(cl, State::from_stacked(x)).stacked();
            worst = std::max(worst, (mapped - z).norm() / std::max(1.0, z.norm()));
        }
    }
    CHECK(worst <= 1e-6);
}
