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

#include "phes/pera.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace phes {
namespace {

Mat pera_inertia(const PeraParams& pp, double q2) {
    const double s = std::sin(q2);
    const double md2 = pp.m2 * pp.dc2 * pp.dc2;
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = pp.i1 + pp.i2 + pp.i3 + md2 * s * s;
    m(0, 2) = m(2, 0) = pp.i3 * std::cos(q2);
    m(1, 1) = pp.i2 + pp.i3 + md2;
    m(2, 2) = pp.i3;
    return m;
}

Mat pera_inertia_q2(const PeraParams& pp, double q2) {
    const double md2 = pp.m2 * pp.dc2 * pp.dc2;
    Mat dm = Mat::Zero(3, 3);
    dm(0, 0) = md2 * std::sin(2.0 * q2);
    dm(0, 2) = dm(2, 0) = -pp.i3 * std::sin(q2);
    return dm;
}

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

}  // namespace

void PeraParams::validate() const {
    if (!(i1 > 0.0 && i2 > 0.0 && i3 > 0.0)) throw Error("PERA inertias must be positive");
    if (!(m2 > 0.0 && dc2 > 0.0 && g >= 0.0)) {
        throw Error("PERA mass, link offset and gravity must be positive");
    }
    require_same_size(q_star.size(), 3, "PERA q_star");
    if (damping.size() != 0) {
        require_same_size(damping.size(), 3, "PERA damping");
        if ((damping.array() < 0.0).any()) throw Error("PERA damping must be non-negative");
    }
}

std::string PeraParams::describe() const {
    std::ostringstream os;
    const auto f = format_shortest;
    os << "PERA I1=" << f(i1) << " I2=" << f(i2) << " I3=" << f(i3) << " m2=" << f(m2)
       << " dc2=" << f(dc2) << " g=" << f(g);
    if (damping.size() == 3) {
        os << " damping=(" << f(damping(0)) << ", " << f(damping(1)) << ", " << f(damping(2))
           << ")";
    }
    return os.str();
}

MechanicalSystem build_pera(const PeraParams& params) {
    params.validate();
    const PeraParams pp = params;
    constexpr int kGrid = 3601;
    for (int k = 0; k < kGrid; ++k) {
        const double q2 = -std::numbers::pi + 2.0 * std::numbers::pi * k / (kGrid - 1);
        if (!(min_eigenvalue(pera_inertia(pp, q2)) > 0.0)) {
            throw Error("inertia parameters yield indefinite M");
        }
    }

    MatrixField inertia = MatrixField::of_q(
        [pp](const Vec& q) { return pera_inertia(pp, q(1)); },
        MatrixProperty::kPositiveDefinite,
        [pp](const Vec& q, Index i) {
            return i == 1 ? pera_inertia_q2(pp, q(1)) : Mat(Mat::Zero(3, 3));
        });

    const double w = pp.m2 * pp.dc2 * pp.g;
    ScalarField potential(
        [w](const Vec& q) { return w * (1.0 - std::cos(q(1))); },
        [w](const Vec& q) {
            Vec gr = Vec::Zero(3);
            gr(1) = w * std::sin(q(1));
            return gr;
        },
        [w](const Vec& q) {
            Mat h = Mat::Zero(3, 3);
            h(1, 1) = w * std::cos(q(1));
            return h;
        });

    MatrixField damping;
    if (pp.damping.size() == 3) {
        damping = MatrixField::constant(Mat(pp.damping.asDiagonal()),
                                        MatrixProperty::kPositiveSemiDefinite);
    }
    return MechanicalSystem(3, 3, std::move(inertia), std::move(potential), std::move(damping));
}

std::vector<PeraScenario> pera_scenarios(const PeraParams& params) {
    const Vec kd = Vec::Zero(3);
    const State origin(Vec::Zero(3), Vec::Zero(3));
    auto make = [&](const char* name, const char* label, Vec kp, Vec ki) {
        return PeraScenario{name, GainSet::diagonal(label, kp, ki, kd, params.q_star), origin};
    };
    return {
        make("pera-s1", "S1", v3(5, 15, 20), v3(200, 250, 350)),
        make("pera-s2", "S2", v3(5, 15, 20), v3(200, 250, 200)),
        make("pera-s3", "S3", v3(5, 1, 20), v3(200, 250, 350)),
    };
}

PeraScenario pera_scenario(const std::string& name, const PeraParams& params) {
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key.rfind("pera-", 0) != 0) key = "pera-" + key;
    for (auto& s : pera_scenarios(params)) {
        if (s.name == key) return s;
    }
    throw Error("unknown PERA scenario '" + name + "' (available: s1, s2, s3)");
}

}  // namespace phes
