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

#ifndef PHES_PLVCC_HPP
#define PHES_PLVCC_HPP

#include "phes/pidpbc.hpp"

#include <functional>
#include <vector>

namespace phes {

/// Upper-triangular T with positive diagonal and T T^T = S. Throws
/// NumericError("matrix not positive definite (pivot <= 0 at row i)").
Mat upper_cholesky(const Mat& s);

/// Exact derivative of the upper Cholesky factor: for each dS in `ds`,
/// the upper-triangular X with X T^T + T X^T = dS.
std::vector<Mat> cholesky_partials(const Mat& t, const std::vector<Mat>& ds);

/// dT/dq_i of the upper Cholesky factor of s_field(q), i = 1..n.
std::vector<Mat> cholesky_partials(const MatrixField& s_field, const Vec& q);

/// Everything the certificate machinery needs at one canonical point,
/// computed in a single pass.
struct CanonicalPoint {
    Mat a;
    std::vector<Mat> a_partials;  // dA/dq_i; empty unless requested
    Mat j;
    Mat d;
    double u = 0.0;
    Vec grad_u;
    Mat hess_u;
};

/// Port-Hamiltonian system with identity kinetic block
///
///   qdot =  A(q) p
///   pdot = -A^T(q) grad U(q) + (J(q,p) - D(q,p)) p,   H = 1/2 p^T p + U(q)
///
/// with the equilibrium at the origin.
class CanonicalPHSystem {
public:
    using PointFn = std::function<CanonicalPoint(const Vec& q, const Vec& p, bool partials)>;

    CanonicalPHSystem() = default;
    /// skew may be empty (J = 0).
    CanonicalPHSystem(Index dof, ScalarField potential, MatrixField interconnection,
                      MatrixField skew, MatrixField dissipation);

    Index dof() const { return n_; }
    const ScalarField& potential() const { return potential_; }
    const MatrixField& interconnection_field() const { return a_; }
    const MatrixField& skew_field() const { return j_; }
    const MatrixField& dissipation_field() const { return d_; }

    /// Configuration of the original model at canonical q = 0.
    const Vec& origin_shift() const { return origin_shift_; }
    /// H_original = H_canonical + energy_offset.
    double energy_offset() const { return energy_offset_; }

    CanonicalPoint point(const Vec& q, const Vec& p, bool with_partials = false) const;
    double hamiltonian(const State& s) const;
    Vec vector_field(const State& s) const;

    // Used by to_canonical to install a cached joint evaluator.
    void set_joint_evaluator(PointFn fn) { joint_ = std::move(fn); }
    void set_origin(Vec shift, double energy_offset);

private:
    Index n_ = 0;
    ScalarField potential_;
    MatrixField a_;
    MatrixField j_;
    MatrixField d_;
    Vec origin_shift_;
    double energy_offset_ = 0.0;
    PointFn joint_;
};

/// Change of coordinates q = qm - q_star, p = T_d^T(qm) pm, where T_d is the
/// upper Cholesky factor of M_d^-1. The resulting fields are
///
///   U(q)   = U_d(q + q_star) - U_d(q_star)
///   A(q)   = M^-1 T_d^-T
///   D(q,p) = T_d^T D_d T_d
///   J(q,p) = J3 + T_d^T Jc T_d,
///   J3     = sum_i [ w_i^T (A^T e_i)^T - (A^T e_i) w_i ],  w_i = p^T T_d^-1 dT_d/dq_i
///
/// all evaluated at (q + q_star, T_d^-T p).
CanonicalPHSystem to_canonical(const ClosedLoopSystem& cl);

State map_state(const ClosedLoopSystem& cl, const State& s);
State inverse_map_state(const ClosedLoopSystem& cl, const State& canonical);

}  // namespace phes

#endif  // PHES_PLVCC_HPP
