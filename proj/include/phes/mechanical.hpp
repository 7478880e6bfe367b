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

#ifndef PHES_MECHANICAL_HPP
#define PHES_MECHANICAL_HPP

#include "phes/fields.hpp"
#include "phes/region.hpp"

#include <string>
#include <utility>

namespace phes {

/// Mechanical system in port-Hamiltonian form
///
///   qdot =  dH/dp
///   pdot = -dH/dq - Dm(q,p) dH/dp + G u,   H = 1/2 p^T M^-1(q) p + U(q)
///
/// with n degrees of freedom of which the last m are actuated, G = [0; I_m].
class MechanicalSystem {
public:
    MechanicalSystem() = default;
    /// damping may be empty, meaning Dm = 0.
    MechanicalSystem(Index dof, Index actuated, MatrixField inertia,
                     ScalarField potential, MatrixField damping = {});

    Index dof() const { return n_; }
    Index actuated() const { return m_; }
    Index unactuated() const { return n_ - m_; }
    bool fully_actuated() const { return n_ == m_; }

    /// G = [0_{l x m}; I_m]
    const Mat& input_map() const { return input_map_; }
    /// G_perp = [I_l 0_{l x m}]
    Mat annihilator() const;

    const MatrixField& inertia_field() const { return inertia_; }
    const ScalarField& potential() const { return potential_; }
    const MatrixField& damping_field() const { return damping_; }

    Mat inertia(const Vec& q) const;
    Mat inertia_partial(const Vec& q, Index i) const;
    Mat damping(const Vec& q, const Vec& p) const;

private:
    Index n_ = 0;
    Index m_ = 0;
    MatrixField inertia_;
    ScalarField potential_;
    MatrixField damping_;
    Mat input_map_;
};

/// Inverse via LU; throws NumericError(msg) when the reciprocal condition
/// estimate falls below 1e-14.
Mat checked_inverse(const Mat& m, const std::string& msg);
/// M^-1(q) with the "inertia not invertible at q" error.
Mat inertia_inverse(const MechanicalSystem& sys, const Vec& q);

/// grad_q of 1/2 p^T M^-1(q) p assembled from dM/dq_i:
/// component i is -1/2 v^T (dM/dq_i) v with v = M^-1 p.
Vec kinetic_gradient(const MechanicalSystem& sys, const Vec& q, const Vec& p);

/// Open-loop vector field. Returns (qdot, pdot).
std::pair<Vec, Vec> eval_open_loop(const MechanicalSystem& sys, const State& s,
                                   const Vec& u);

double eval_hamiltonian(const MechanicalSystem& sys, const State& s);

/// Sampled check of the standing assumptions: local strong convexity and an
/// isolated minimum of the potential at the region center, and boundedness
/// of the interconnection and dissipation matrices. Never throws on a failed
/// check; failures are flags. The property is only established on the
/// sampled box, which `region` records.
struct AssumptionReport {
    std::string region;
    std::size_t samples = 0;
    double min_hessian_eigenvalue = 0.0;
    double gradient_norm_at_center = 0.0;
    double max_norm_interconnection = 0.0;
    double max_norm_dissipation = 0.0;
    bool strongly_convex = false;
    bool isolated_minimum = false;
    bool bounded = false;
    std::string failure;  // first failure, empty when everything passed

    bool passed() const { return strongly_convex && isolated_minimum && bounded; }
};

/// Generic form: interconnection is a function of q, dissipation of (q, p).
/// Either may be empty (treated as identity / zero).
AssumptionReport validate_assumptions(const ScalarField& potential,
                                      const MatrixField& interconnection,
                                      const MatrixField& dissipation,
                                      const Region& region);

/// Mechanical form: the interconnection block is I_n and the dissipation is Dm.
AssumptionReport validate_assumptions(const MechanicalSystem& sys, const Region& region);

}  // namespace phes

#endif  // PHES_MECHANICAL_HPP
