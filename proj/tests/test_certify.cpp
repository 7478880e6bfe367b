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

#include "phes/certify.hpp"
#include "phes/models.hpp"
#include "phes/pera.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace phes;
using namespace phes::testing;

namespace {

const PhiChoice kAt = PhiChoice::kATranspose;

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

CanonicalPHSystem pera_s1_canonical() {
    return to_canonical(build_closed_loop(build_pera(), pera_scenario("s1").gains));
}

// Pendulum closed loop: U_d'' = 9.81 cos q + 12 varies over the region.
CanonicalPHSystem pendulum_canonical() {
    const GainSet g = GainSet::diagonal("p", Vec::Constant(1, 1.0), Vec::Constant(1, 12.0),
                                        Vec::Zero(1), Vec::Zero(1));
    return to_canonical(build_closed_loop(make_pendulum(), g));
}

}  // namespace

TEST_CASE("Lyapunov candidate values") {
    const CanonicalPHSystem c = make_scalar_benchmark();
    const State s(Vec::Ones(1), Vec::Ones(1));
    CHECK(lyapunov_value(c, s, 0.05, kAt) == doctest::Approx(2.7));
    CHECK(lyapunov_value(c, State(Vec::Zero(1), Vec::Zero(1)), 0.05, kAt) == 0.0);
    std::mt19937_64 rng(1);
    const CanonicalPHSystem p = pera_s1_canonical();
    for (int k = 0; k < 20; ++k) {
        const State r = random_state(rng, 3, 0.3, 0.5);
        CHECK(lyapunov_value(p, r, 0.0, kAt) == doctest::Approx(p.hamiltonian(r)));
    }
}

TEST_CASE("Upsilon of the scalar benchmark") {
    const CanonicalPHSystem c = make_scalar_benchmark();
    const State s(Vec::Constant(1, 0.2), Vec::Constant(1, -0.3));
    // The symmetric part of eps A Phi with Phi = A^T is eps A A^T.
    CHECK(rel_diff(upsilon_sym(c, s, 0.05, kAt), mat2(0.05, 0.025, 0.025, 0.8)) <= 1e-15);
    CHECK(rel_diff(upsilon_sym(c, s, 0.0, kAt), mat2(0, 0, 0, 1)) <= 1e-15);
}

TEST_CASE("Schur test examples") {
    const SchurResult a = schur_pd_check(mat2(0.1, 0.025, 0.025, 0.8), 0.0);
    CHECK(a.positive_definite);
    CHECK(a.margin == doctest::Approx(0.1));
    CHECK(a.complement_min == doctest::Approx(0.79375));

    const SchurResult b = schur_pd_check(Mat::Identity(2, 2), 0.0);
    CHECK(b.positive_definite);
    CHECK(b.margin == doctest::Approx(1.0));

    CHECK_FALSE(schur_pd_check(mat2(1, 2, 2, 1), 0.0).positive_definite);
    // A margin inside the slack counts as not positive definite.
    CHECK_FALSE(schur_pd_check(mat2(1e-10, 0, 0, 1), 1e-9).positive_definite);
}

TEST_CASE("Schur blocks agree with an eigensolve") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        Mat m = random_pd(rng, 4);
        if (k % 2) m -= 1.5 * Mat::Identity(4, 4);
        const bool pd = min_eigenvalue(m) > 0.0;
        CHECK(schur_pd_check(m, 0.0).positive_definite == pd);
    }
}

TEST_CASE("feasibility boundary of the scalar benchmark") {
    const EpsilonSearch e =
        max_feasible_epsilon(make_scalar_benchmark(), Region::box(1, 0.5, 0.5), kAt);
    CHECK(std::abs(e.epsilon_star - 0.0625) <= 1e-3);
    CHECK(e.k1_limit == doctest::Approx(1.0 / 16.0));
    // The Upsilon constraint alone allows eps < 4/17 (det of [[e, e/2], [e/2, 1 - 4e]]),
    // far from binding.
    const State s(Vec::Constant(1, 0.1), Vec::Constant(1, 0.1));
    CHECK(schur_pd_check(upsilon_sym(make_scalar_benchmark(), s, 4.0 / 17.0 - 1e-6, kAt), 0.0)
              .positive_definite);
    CHECK_FALSE(schur_pd_check(upsilon_sym(make_scalar_benchmark(), s, 4.0 / 17.0 + 1e-6, kAt), 0.0)
                    .positive_definite);
}

TEST_CASE("heavier damping never enlarges the feasibility boundary") {
    const Region r = Region::box(1, 0.5, 0.5);
    double prev = 1e300;
    for (double d : {1.0, 10.0, 50.0, 100.0}) {
        const double e = max_feasible_epsilon(make_linear_canonical(1, 4, d), r, kAt).epsilon_star;
        CHECK(e <= prev * (1 + 1e-4));
        prev = e;
    }
    const double e1 = max_feasible_epsilon(make_linear_canonical(1, 4, 1), r, kAt).epsilon_star;
    const double e100 = max_feasible_epsilon(make_linear_canonical(1, 4, 100), r, kAt).epsilon_star;
    CHECK(e100 < e1);
    // Oracle: the 2x2 determinant bound eps < D / (4 + D^2 / 4).
    CHECK(std::abs(e100 - 100.0 / (4 + 2500.0)) <= 1e-4);
}

TEST_CASE("infeasible certificate") {
    CHECK_THROWS_AS(max_feasible_epsilon(make_linear_canonical(1, 4, 0.0), Region::box(1, 0.5, 0.5), kAt),
                    InfeasibleError);
}

TEST_CASE("convexity bounds") {
    const ConvexityBounds b = convexity_bounds(make_scalar_benchmark(), Region::box(1, 0.5, 0.5));
    CHECK(b.beta_min == doctest::Approx(1.0));
    CHECK(b.beta_max == doctest::Approx(4.0));

    const ConvexityBounds u = convexity_bounds(make_linear_canonical(3, 1, 1), Region::box(3, 0.5, 0.5));
    CHECK(u.beta_min == doctest::Approx(1.0));
    CHECK(u.beta_max == doctest::Approx(1.0));

    const CanonicalPHSystem p = pera_s1_canonical();
    const Region r = Region::box(3, 0.3, 0.5);
    const ConvexityBounds pb = convexity_bounds(p, r);
    double oracle = 0.0;
    for (const Vec& q : r.configuration_samples()) {
        const Mat h = oracle_jacobian([&](const Vec& x) { return p.potential().gradient(x); }, q);
        oracle = std::max(oracle, max_eigenvalue(0.5 * (h + h.transpose())));
    }
    CHECK(pb.beta_max >= 350.0);
    CHECK(pb.beta_max <= 352.0);
    CHECK(pb.beta_max == doctest::Approx(oracle).epsilon(1e-7));

    const CanonicalPHSystem weak = to_canonical(build_closed_loop(
        make_pendulum(), GainSet::diagonal("w", Vec::Ones(1), Vec::Constant(1, 0.1), Vec::Zero(1),
                                           Vec::Zero(1))));
    CHECK_THROWS_AS(convexity_bounds(weak, Region::box(1, 3.2, 0.5)), InfeasibleError);
}

TEST_CASE("certificate constants") {
    const CanonicalPHSystem c = make_scalar_benchmark();
    const Certificate cert = make_certificate(c, Region::box(1, 0.5, 0.5), kAt);
    CHECK(cert.epsilon == doctest::Approx(cert.epsilon_star / 2));
    const double e = cert.epsilon;
    CHECK(cert.k1 == doctest::Approx((1 - e * 16) / 2));
    CHECK(cert.k2 == doctest::Approx((4 + e * 16) / 2));
    // Reference point for the constants at eps = 0.03.
    CHECK((1 - 0.03 * 16) / 2 == doctest::Approx(0.26));
    CHECK((4 + 0.03 * 16) / 2 == doctest::Approx(2.24));
    CHECK(cert.rate_paper > 0.0);
    CHECK(cert.rate_sound > 0.0);
    CHECK(cert.rate_paper ==
          doctest::Approx(cert.beta_max * cert.mu / (1 + e * cert.norm_a_max * cert.beta_max)));
    CHECK(cert.rate_sound ==
          doctest::Approx(cert.mu * cert.beta_min * cert.beta_min / (2 * cert.k2)));
}

TEST_CASE("envelope values") {
    const Certificate cert = make_certificate(make_scalar_benchmark(), Region::box(1, 0.5, 0.5), kAt);
    CHECK(envelope(cert, 2.0, 0.0) == doctest::Approx(std::sqrt(cert.k2 / cert.k1) * 2.0));
    CHECK(envelope(cert, 1.0, 1.0) ==
          doctest::Approx(std::sqrt(cert.k2 / cert.k1) * std::exp(-cert.rate_sound)));
    Certificate flat;
    flat.k1 = flat.k2 = 1.5;
    flat.rate_sound = 0.7;
    CHECK(envelope(flat, 3.0, 2.0) == doctest::Approx(3.0 * std::exp(-1.4)));
    CHECK_THROWS_AS(envelope(flat, 1.0, -1.0), Error);
}

TEST_CASE("certified rate bounds the exact linear decay") {
    for (double k : {1.0, 4.0}) {
        for (double d : {0.5, 1.0, 2.0}) {
            const CanonicalPHSystem c = make_linear_canonical(1, k, d);
            const Certificate cert = make_certificate(c, Region::box(1, 0.5, 0.5), kAt);
            const Mat sys = mat2(0, 1, -k, -d);
            const double slowest = -Eigen::EigenSolver<Mat>(sys).eigenvalues().real().maxCoeff();
            CHECK(cert.rate_sound <= slowest);
        }
    }
}

TEST_CASE("sandwich and negativity on the samples") {
    for (const CanonicalPHSystem& c : {make_scalar_benchmark(), pendulum_canonical()}) {
        const Region r = Region::box(1, 0.5, 0.5);
        const Certificate cert = make_certificate(c, r, kAt);
        for (const State& s : r.phase_samples()) {
            const double x2 = s.stacked().squaredNorm();
            const double v = lyapunov_value(c, s, cert.epsilon, kAt);
            CHECK(v >= cert.k1 * x2 * (1 - 1e-12));
            CHECK(v <= cert.k2 * x2 * (1 + 1e-12));
            if (x2 > 0.0) CHECK(lyapunov_rate(c, s, cert.epsilon, kAt) < 0.0);
        }
    }
}

TEST_CASE("feasibility boundary shrinks on larger regions") {
    const CanonicalPHSystem c = pendulum_canonical();
    double prev = 1e300;
    for (double radius : {0.2, 0.4, 0.8, 1.2}) {
        const double e = max_feasible_epsilon(c, Region::box(1, radius, radius), kAt).epsilon_star;
        CHECK(e <= prev * (1 + 1e-4));
        prev = e;
    }
}

TEST_CASE("both weightings certify the scalar benchmark") {
    const Region r = Region::box(1, 0.5, 0.5);
    for (PhiChoice choice : {PhiChoice::kATranspose, PhiChoice::kAInverse}) {
        const CanonicalPHSystem c = make_scalar_benchmark();
        const Certificate cert = make_certificate(c, r, choice);
        CHECK(cert.rate_sound > 0.0);
        for (const Vec& q : r.configuration_samples()) CHECK(phi_condition_holds(c.point(q, Vec::Zero(1)).a, choice));
    }
    CHECK(phi_choice_from_string("at") == PhiChoice::kATranspose);
    CHECK(phi_choice_from_string("ainv") == PhiChoice::kAInverse);
    CHECK_THROWS_AS(phi_choice_from_string("bogus"), Error);
}

TEST_CASE("rate of the candidate matches its derivative along the flow") {
    std::mt19937_64 rng(41);
    struct Case {
        CanonicalPHSystem sys;
        double q_radius;
        double p_radius;
    };
    const std::vector<Case> cases = {{make_scalar_benchmark(), 0.5, 0.5},
                                     {pera_s1_canonical(), 0.3, 0.5}};
    for (const Case& cs : cases) {
        const Index n = cs.sys.dof();
        for (double eps : {1e-6, 0.01}) {
            for (PhiChoice choice : {PhiChoice::kATranspose, PhiChoice::kAInverse}) {
                for (int k = 0; k < 250; ++k) {
                    const State s = random_state(rng, n, cs.q_radius, cs.p_radius);
                    const double a = lyapunov_rate(cs.sys, s, eps, choice);
                    const double b = oracle_lyapunov_rate(cs.sys, s, eps, choice);
                    CHECK(std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)));
                }
            }
        }
    }
}

TEST_CASE("certificate text round trip") {
    const Certificate cert = make_certificate(make_scalar_benchmark(), Region::box(1, 0.5, 0.5), kAt);
    const std::string text = to_text(cert, {"model msd"});
    CHECK(text.rfind("# model msd\n", 0) == 0);
    CHECK(text.find("sampled") != std::string::npos);
    const Certificate back = parse_certificate(text);
    CHECK(back.epsilon == cert.epsilon);
    CHECK(back.rate_paper == cert.rate_paper);
    CHECK(back.rate_sound == cert.rate_sound);
    CHECK(back.k1 == cert.k1);
    CHECK(back.samples == cert.samples);
    CHECK(to_text(back, {"model msd"}) == text);

    CHECK_THROWS_AS(parse_certificate("epsilon = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_certificate(text + "bogus = 2\n"), ParseError);
}
