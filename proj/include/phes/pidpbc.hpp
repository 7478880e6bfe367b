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

#ifndef PHES_PIDPBC_HPP
#define PHES_PIDPBC_HPP

#include "phes/mechanical.hpp"

#include <memory>
#include <optional>
#include <string>

namespace phes {

/// Gains of one PID passivity-based controller acting on the passive output
/// y = G^T M^-1 p:
///
///   u = -K_P y - K_I (G^T q + kappa) - K_D ydot
struct GainSet {
    std::string label;
    Mat kp;  // m x m, symmetric PSD
    Mat ki;  // m x m, symmetric PD
    Mat kd;  // m x m, symmetric PSD
    Vec q_star;

    static GainSet diagonal(std::string label, const Vec& kp, const Vec& ki,
                            const Vec& kd, Vec q_star);

    /// Throws Error when shapes mismatch or K_I is not PD / K_P, K_D not PSD
    /// (symmetry residual 1e-10, eigenvalue margin 1e-12).
    void validate(Index dof, Index actuated) const;
    bool has_derivative_action() const;
};

enum class ControlVariant {
    kStandard,
    /// Fully actuated only: u = grad U(q) - K_P y - K_I (q - q_star) - K_D ydot.
    kGravityCompensated,
};

/// kappa = -G^T q_star - K_I^-1 G^T grad U(q_star)
Vec compute_kappa(const MechanicalSystem& sys, const GainSet& gains);

/// G_perp grad U(q_star) = 0 within 1e-9; always true when fully actuated.
bool check_assignable(const MechanicalSystem& sys, const Vec& q_star);

struct GainCondition {
    bool holds = false;
    double margin = 0.0;  // lambda_min(hess U(q_star) + G K_I G^T)
};
GainCondition check_gain_condition(const MechanicalSystem& sys, const GainSet& gains,
                                   ControlVariant variant = ControlVariant::kStandard);

/// Passive output y = G^T M^-1(q) p.
Vec passive_output(const MechanicalSystem& sys, const State& s);
/// (grad_q y)^T, the m x n matrix whose column i is dy/dq_i
/// = -G^T M^-1 (dM/dq_i) M^-1 p.
Mat passive_output_q_jacobian(const MechanicalSystem& sys, const State& s);

/// Control law. Without `ydot`, the derivative of the passive output is taken
/// from the closed-loop vector field (solved jointly with u).
Vec control_signal(const MechanicalSystem& sys, const GainSet& gains, const State& s,
                   const std::optional<Vec>& ydot = std::nullopt,
                   ControlVariant variant = ControlVariant::kStandard);

/// The shaped closed loop
///
///   xdot = F_d(q,p) grad H_d,  F_d = [0, M^-1 M_d; -M_d M^-1, Jc - D_d]
///   H_d  = 1/2 p^T M_d^-1 p + U_d(q)
///
/// with M_d = M (M + G K_D G^T)^-1 M, E = M M_d^-1, B = G K_D (grad_q y)^T,
/// Jc = E^-1 (B^T - B) E^-T and D_d = E^-1 (Dm + G K_P G^T) E^-T.
/// Copies share the immutable model; all evaluators are pure.
class ClosedLoopSystem {
public:
    ClosedLoopSystem(MechanicalSystem base, GainSet gains,
                     ControlVariant variant = ControlVariant::kStandard);

    const MechanicalSystem& base() const;
    const GainSet& gains() const;
    const Vec& kappa() const;
    ControlVariant variant() const;
    Index dof() const { return base().dof(); }
    const Vec& q_star() const { return gains().q_star; }

    Mat inertia_d(const Vec& q) const;
    Mat inertia_d_inverse(const Vec& q) const;
    Mat inertia_d_inverse_partial(const Vec& q, Index i) const;

    double potential_d(const Vec& q) const;
    Vec potential_d_gradient(const Vec& q) const;
    Mat potential_d_hessian(const Vec& q) const;

    Mat e_matrix(const Vec& q) const;
    Mat b_matrix(const Vec& q, const Vec& p) const;
    Mat interconnection(const Vec& q, const Vec& p) const;
    Mat dissipation(const Vec& q, const Vec& p) const;

    double hamiltonian(const State& s) const;
    /// col(grad_q H_d, grad_p H_d)
    Vec hamiltonian_gradient(const State& s) const;
    Mat structure_matrix(const Vec& q, const Vec& p) const;

    /// F_d grad H_d, stacked.
    Vec vector_field(const State& s) const;

    // Field views (shared ownership of the model).
    MatrixField inertia_d_field() const;
    ScalarField potential_d_field() const;
    MatrixField dissipation_field() const;
    MatrixField interconnection_field() const;
    MatrixField b_field() const;
    MatrixField e_field() const;

private:
    struct Data;
    std::shared_ptr<const Data> d_;
};

/// Checks the gain condition and assignability, then constructs the closed
/// loop. Throws InfeasibleError if either fails.
ClosedLoopSystem build_closed_loop(const MechanicalSystem& sys, const GainSet& gains,
                                   ControlVariant variant = ControlVariant::kStandard);

/// Conditions for exponential stability of the shaped closed loop, sampled on
/// a region centered at q_star:
///   C1 U_d strongly convex, C2 ||M^-1 M_d|| bounded, C3 D_d positive definite.
struct ClosedLoopConditions {
    std::string region;
    double c1_min_hessian_eigenvalue = 0.0;
    double c2_max_norm = 0.0;
    double c3_min_dissipation_eigenvalue = 0.0;
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;
    bool all() const { return c1 && c2 && c3; }
};
ClosedLoopConditions check_c1_c2_c3(const ClosedLoopSystem& cl, const Region& region);

struct DampingCheck {
    bool holds = false;
    double min_eigenvalue = 0.0;  // of G_perp Dm G_perp^T over samples
    std::string note;
};
/// G_perp Dm(q,p) G_perp^T > 0 at every sample. Fully actuated systems pass
/// with the note that K_P must then be positive definite.
DampingCheck check_underactuated_damping(const MechanicalSystem& sys, const Region& region);

}  // namespace phes

#endif  // PHES_PIDPBC_HPP
