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

#ifndef PHES_CONFIG_HPP
#define PHES_CONFIG_HPP

#include "phes/certify.hpp"
#include "phes/mechanical.hpp"
#include "phes/pera.hpp"
#include "phes/pidpbc.hpp"
#include "phes/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace phes {

/// Everything a CLI run needs. Unset optionals fall back to model defaults.
///
/// Text form: `[section]` headers (model, gains, region, integrator, output)
/// followed by `key = value` lines; `#` starts a comment. Vectors are comma
/// separated, matrices use `;` between rows. Unknown sections or keys abort
/// parsing with the offending line and column.
struct RunConfig {
    // [model]
    std::string model = "pera";  // pera | msd1 | pendulum | linear | custom
    PeraParams pera;
    std::optional<MechanicalSystem> custom;
    std::optional<Vec> q0;
    std::optional<Vec> p0;

    // [gains]
    std::string scenario;  // PERA scenario name, empty for inline gains
    std::optional<Vec> kp;
    std::optional<Vec> ki;
    std::optional<Vec> kd;
    std::optional<Vec> q_star;

    // [region]
    double q_radius = 0.3;
    double p_radius = 0.5;
    int grid_points = 7;
    int extra_samples = 0;
    std::uint64_t seed = 0;

    // [integrator]
    double step = 1e-4;
    double horizon = 20.0;
    std::size_t record_every = 10;

    // [output]
    std::string out_dir = ".";
    PhiChoice phi = PhiChoice::kATranspose;
    bool global = false;
    bool canonical = false;

    /// Throws Error when a numeric field that must be positive is not.
    void validate() const;
};

RunConfig parse_config(const std::string& text);
/// Throws Error("cannot read config file ...") when the file is unreadable.
RunConfig load_config(const std::string& path);

/// Builds a custom model from expression text. `inertia` and `damping` are
/// matrices (rows separated by `;`); damping may be empty.
MechanicalSystem make_custom_model(Index dof, Index actuated, const std::string& inertia,
                                   const std::string& potential,
                                   const std::string& damping = {});

/// A fully resolved run: model, gains, initial state and region.
struct Problem {
    std::string model;
    MechanicalSystem sys;
    GainSet gains;
    State initial;
    Region region;  // canonical coordinates, centered at zero
    SimOptions sim;
    PhiChoice phi = PhiChoice::kATranspose;
    bool global = false;
    bool canonical = false;
    std::optional<PeraParams> pera;
    /// Provenance lines for output headers (parameters, seed, initial state).
    std::vector<std::string> comments;
};

Problem resolve(const RunConfig& cfg);

/// Comma-separated list of numbers; a single value is broadcast to `size`
/// when size > 0.
Vec parse_vector(const std::string& text, Index size = 0, int line = 1, int column = 1);

}  // namespace phes

#endif  // PHES_CONFIG_HPP
