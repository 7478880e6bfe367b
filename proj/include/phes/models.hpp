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

#ifndef PHES_MODELS_HPP
#define PHES_MODELS_HPP

#include "phes/mechanical.hpp"
#include "phes/plvcc.hpp"

#include <string>
#include <vector>

namespace phes {

/// Mass-spring-damper: M = 1, U = 2 q^2, Dm = 0.5, fully actuated.
MechanicalSystem make_msd1();

/// Pendulum: M = 1, U = g (1 - cos q), optional viscous damping.
MechanicalSystem make_pendulum(double g = 9.81, double damping = 0.0);

/// n-DoF linear system: M = I, U = k/2 ||q||^2, Dm = d I, fully actuated.
MechanicalSystem make_linear(Index n, double k, double d);

/// Canonical system with A = I, J = 0, D = d I, U = k/2 ||q||^2.
CanonicalPHSystem make_linear_canonical(Index n, double k, double d);

/// Canonical 1-DoF benchmark: A = 1, J = 0, D = 1, U = 2 q^2.
CanonicalPHSystem make_scalar_benchmark();

/// Names accepted by make_builtin (PERA is handled by its own module).
std::vector<std::string> builtin_model_names();
/// Throws Error listing the available names for an unknown one.
MechanicalSystem make_builtin(const std::string& name);

}  // namespace phes

#endif  // PHES_MODELS_HPP
