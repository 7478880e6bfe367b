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

#ifndef PHES_REGION_HPP
#define PHES_REGION_HPP

#include "phes/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace phes {

/// Axis-aligned box in phase space around an equilibrium, realized as a
/// deterministic tensor grid plus optional Halton refinement points.
struct Region {
    Vec center;   // configuration of the equilibrium; zero in canonical coordinates
    Vec q_radii;
    Vec p_radii;
    int grid_points_per_axis = 7;
    int extra_samples = 0;
    std::uint64_t seed = 0;
    int max_samples = 20000;

    static Region box(Index n, double q_radius, double p_radius);
    static Region box(const Vec& center, double q_radius, double p_radius);

    Index dof() const { return q_radii.size(); }
    void validate() const;

    /// Grid points per axis actually used for a tensor grid over `dims`
    /// axes, reduced until the grid fits max_samples (never below 3).
    int points_per_axis(Index dims) const;

    /// Phase-space samples (q around center, p around 0). The grid always
    /// contains the box corners and the center.
    std::vector<State> phase_samples() const;
    /// Configuration-only samples around center.
    std::vector<Vec> configuration_samples() const;

    bool contains(const State& s, double slack = 1e-12) const;
    /// Same box with every radius multiplied by factor.
    Region scaled(double factor) const;
    std::string describe() const;
};

/// Radical-inverse point `index` of the Halton sequence in `dims` dimensions,
/// components in [0, 1).
Vec halton_point(std::uint64_t index, Index dims);

}  // namespace phes

#endif  // PHES_REGION_HPP
