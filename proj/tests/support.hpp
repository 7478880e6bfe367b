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

// Independent oracles and small model builders shared by the unit tests.
// Nothing here calls the library's own finite-difference or integrator code.

#ifndef PHES_TESTS_SUPPORT_HPP
#define PHES_TESTS_SUPPORT_HPP

#include "phes/certify.hpp"
#include "phes/mechanical.hpp"
#include "phes/plvcc.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace phes::testing {

/// Fourth-order central difference with a fixed step.
inline Vec oracle_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                           double h = 1e-4) {
    Vec g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        auto at = [&](double s) {
            Vec y = x;
            y(i) += s * h;
            return f(y);
        };
        g(i) = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
    }
    return g;
}

/// d/dx_i of a matrix function, fourth-order central difference.
inline Mat oracle_matrix_partial(const std::function<Mat(const Vec&)>& f, const Vec& x,
                                 Index i, double h = 1e-4) {
    auto at = [&](double s) {
        Vec y = x;
        y(i) += s * h;
        return f(y);
    };
    return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
}

/// Jacobian of a vector function, fourth-order central difference.
inline Mat oracle_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                           double h = 1e-4) {
    const Vec f0 = f(x);
    Mat j(f0.size(), x.size());
    for (Index i = 0; i < x.size(); ++i) {
        auto at = [&](double s) {
            Vec y = x;
            y(i) += s * h;
            return f(y);
        };
        j.col(i) = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
    }
    return j;
}

/// Plain RK4 written out independently of the library integrator.
inline Vec oracle_rk4(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    const Vec k1 = f(x);
    const Vec k2 = f(x + 0.5 * h * k1);
    const Vec k3 = f(x + 0.5 * h * k2);
    const Vec k4 = f(x + h * k3);
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline double rel_diff(const Mat& a, const Mat& b) {
    return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

inline Vec uniform_vec(std::mt19937_64& rng, Index n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = d(rng);
    return v;
}

inline Mat random_pd(std::mt19937_64& rng, Index n) {
    std::normal_distribution<double> d(0.0, 1.0);
    Mat b(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) b(i, j) = d(rng);
    return b * b.transpose() + 0.5 * Mat::Identity(n, n);
}

/// d/dt S along the canonical flow, by a fourth-order difference of S on the
/// straight line x + tau f(x), which has the same first derivative.
inline double oracle_lyapunov_rate(const CanonicalPHSystem& sys, const State& s,
                                   double epsilon, PhiChoice choice) {
    const Vec x = s.stacked();
    const Vec f = sys.vector_field(s);
    const double h = 1e-3 / std::max(1.0, f.norm());
    auto at = [&](double k) {
        return lyapunov_value(sys, State::from_stacked(x + k * h * f), epsilon, choice);
    };
    return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
}

/// Uniform random state in a box centered at zero.
inline State random_state(std::mt19937_64& rng, Index n, double q_radius, double p_radius) {
    return State(uniform_vec(rng, n, -q_radius, q_radius), uniform_vec(rng, n, -p_radius, p_radius));
}

/// 1-DoF system with constant inertia and damping and potential a (1 - cos q)
/// when `trig` is set, otherwise a/2 q^2 (analytic derivatives).
inline MechanicalSystem scalar_system(double mass, double a, double damping, bool trig) {
    ScalarField u(
        [=](const Vec& q) { return trig ? a * (1 - std::cos(q(0))) : 0.5 * a * q(0) * q(0); },
        [=](const Vec& q) {
            return Vec::Constant(1, trig ? a * std::sin(q(0)) : a * q(0));
        },
        [=](const Vec& q) { return Mat::Constant(1, 1, trig ? a * std::cos(q(0)) : a); });
    return MechanicalSystem(1, 1,
                            MatrixField::constant(Mat::Constant(1, 1, mass),
                                                  MatrixProperty::kPositiveDefinite),
                            u,
                            MatrixField::constant(Mat::Constant(1, 1, damping),
                                                  MatrixProperty::kPositiveSemiDefinite));
}

/// 2-DoF system with M = I, U = -cos q1 + 1/2 q2^2, the second joint actuated
/// and damping diag(d1, d2).
inline MechanicalSystem underactuated_system(double d1, double d2) {
    ScalarField u(
        [](const Vec& q) { return -std::cos(q(0)) + 0.5 * q(1) * q(1); },
        [](const Vec& q) { return (Vec(2) << std::sin(q(0)), q(1)).finished(); },
        [](const Vec& q) {
            Mat h = Mat::Zero(2, 2);
            h(0, 0) = std::cos(q(0));
            h(1, 1) = 1.0;
            return h;
        });
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = d1;
    d(1, 1) = d2;
    return MechanicalSystem(
        2, 1, MatrixField::constant(Mat::Identity(2, 2), MatrixProperty::kPositiveDefinite), u,
        MatrixField::constant(d, MatrixProperty::kPositiveSemiDefinite));
}

/// 2-DoF system with configuration-dependent inertia
/// M = [[2 + cos q2, 0.3 cos q2], [0.3 cos q2, 1]], U = 1/2 (q1^2 + q2^2),
/// fully actuated, damping 0.1 I. Partials are left to the library fallback.
inline MechanicalSystem coupled_system() {
    auto m = [](const Vec& q) {
        Mat r(2, 2);
        r << 2 + std::cos(q(1)), 0.3 * std::cos(q(1)), 0.3 * std::cos(q(1)), 1.0;
        return r;
    };
    ScalarField u([](const Vec& q) { return 0.5 * q.squaredNorm(); },
                  [](const Vec& q) { return Vec(q); },
                  [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
    return MechanicalSystem(2, 2, MatrixField::of_q(m, MatrixProperty::kPositiveDefinite), u,
                            MatrixField::constant(0.1 * Mat::Identity(2, 2),
                                                  MatrixProperty::kPositiveSemiDefinite));
}

}  // namespace phes::testing

#endif  // PHES_TESTS_SUPPORT_HPP
