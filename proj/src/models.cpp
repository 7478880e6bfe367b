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

#include "phes/models.hpp"

#include <cmath>

namespace phes {
namespace {

MatrixField constant_inertia(Index n) {
    return MatrixField::of_q([n](const Vec&) { return Mat(Mat::Identity(n, n)); },
                             MatrixProperty::kPositiveDefinite,
                             [n](const Vec&, Index) { return Mat(Mat::Zero(n, n)); });
}

ScalarField quadratic(double k) {
    return ScalarField([k](const Vec& q) { return 0.5 * k * q.squaredNorm(); },
                       [k](const Vec& q) { return Vec(k * q); },
                       [k](const Vec& q) {
                           return Mat(k * Mat::Identity(q.size(), q.size()));
                       });
}

}  // namespace

MechanicalSystem make_msd1() {
    return MechanicalSystem(1, 1, constant_inertia(1), quadratic(4.0),
                            MatrixField::constant(Mat::Constant(1, 1, 0.5),
                                                  MatrixProperty::kPositiveSemiDefinite));
}

MechanicalSystem make_pendulum(double g, double damping) {
    ScalarField u([g](const Vec& q) { return g * (1.0 - std::cos(q(0))); },
                  [g](const Vec& q) { return Vec(Vec::Constant(1, g * std::sin(q(0)))); },
                  [g](const Vec& q) { return Mat(Mat::Constant(1, 1, g * std::cos(q(0)))); });
    MatrixField d;
    if (damping != 0.0) {
        d = MatrixField::constant(Mat::Constant(1, 1, damping),
                                  MatrixProperty::kPositiveSemiDefinite);
    }
    return MechanicalSystem(1, 1, constant_inertia(1), std::move(u), std::move(d));
}

MechanicalSystem make_linear(Index n, double k, double d) {
    return MechanicalSystem(n, n, constant_inertia(n), quadratic(k),
                            MatrixField::constant(d * Mat::Identity(n, n),
                                                  MatrixProperty::kPositiveSemiDefinite));
}

CanonicalPHSystem make_linear_canonical(Index n, double k, double d) {
    return CanonicalPHSystem(
        n, quadratic(k), constant_inertia(n),
        MatrixField::constant(Mat::Zero(n, n), MatrixProperty::kSkewSymmetric),
        MatrixField::constant(d * Mat::Identity(n, n), MatrixProperty::kPositiveSemiDefinite));
}

CanonicalPHSystem make_scalar_benchmark() { return make_linear_canonical(1, 4.0, 1.0); }

std::vector<std::string> builtin_model_names() { return {"msd1", "pendulum", "linear"}; }

MechanicalSystem make_builtin(const std::string& name) {
    if (name == "msd1") return make_msd1();
    if (name == "pendulum") return make_pendulum();
    if (name == "linear") return make_linear(2, 1.0, 1.0);
    std::string list;
    for (const auto& n : builtin_model_names()) list += (list.empty() ? "" : ", ") + n;
    throw Error("unknown model '" + name + "' (available: " + list + ", pera)");
}

}  // namespace phes
