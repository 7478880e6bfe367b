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

#ifndef PHES_PERA_HPP
#define PHES_PERA_HPP

#include "phes/mechanical.hpp"
#include "phes/pidpbc.hpp"

#include <string>
#include <vector>

namespace phes {

/// Three-joint reduction of the PERA arm (shoulder yaw, elbow pitch, elbow
/// yaw). Only the elbow pitch q2 carries gravity.
struct PeraParams {
    double i1 = 0.02;  // kg m^2
    double i2 = 0.01;
    double i3 = 0.005;
    double m2 = 1.0;    // kg
    double dc2 = 0.16;  // m
    double g = 9.81;
    Vec q_star = (Vec(3) << -1.8, 1.57, 0.78).finished();
    /// Viscous damping diag(d1, d2, d3); empty means Dm = 0.
    Vec damping;

    /// Throws Error for non-positive inertias or masses.
    void validate() const;
    /// One line with every parameter, for output headers.
    std::string describe() const;
};

/// Fully actuated model with analytic dM/dq2, grad U and hess U. Throws
/// Error("inertia parameters yield indefinite M") if M fails a PD check on a
/// dense q2 grid over [-pi, pi].
MechanicalSystem build_pera(const PeraParams& params = {});

struct PeraScenario {
    std::string name;  // pera-s1 | pera-s2 | pera-s3
    GainSet gains;
    State initial;     // q(0) = 0, p(0) = 0
};

/// S1, S2 and S3 in that order; K_D = 0 throughout.
std::vector<PeraScenario> pera_scenarios(const PeraParams& params = {});
/// Accepts s1, S1 or pera-s1 (likewise 2 and 3).
PeraScenario pera_scenario(const std::string& name, const PeraParams& params = {});

}  // namespace phes

#endif  // PHES_PERA_HPP
