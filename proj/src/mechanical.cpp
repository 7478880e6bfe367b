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

#include "phes/mechanical.hpp"

#include <cmath>
#include <limits>

namespace phes {

MechanicalSystem::MechanicalSystem(Index dof, Index actuated, MatrixField inertia,
                                   ScalarField potential, MatrixField damping)
    : n_(dof),
      m_(actuated),
      inertia_(std::move(inertia)),
      potential_(std::move(potential)),
      damping_(std::move(damping)) {
    if (n_ < 1 || m_ < 1 || m_ > n_) {
        throw ShapeError("shape error: need 1 <= m <= n (got n=" + std::to_string(n_) +
                         ", m=" + std::to_string(m_) + ")");
    }
    if (!inertia_ || !potential_) throw Error("inertia and potential are required");
    input_map_ = Mat::Zero(n_, m_);
    input_map_.bottomRows(m_).setIdentity();
}

Mat MechanicalSystem::annihilator() const {
    Mat gp = Mat::Zero(n_ - m_, n_);
    gp.leftCols(n_ - m_).setIdentity();
    return gp;
}

Mat MechanicalSystem::inertia(const Vec& q) const {
    require_same_size(q.size(), n_, "q vs system dimension");
    return inertia_.value(q);
}

Mat MechanicalSystem::inertia_partial(const Vec& q, Index i) const {
    return inertia_.partial(q, i);
}

Mat MechanicalSystem::damping(const Vec& q, const Vec& p) const {
    if (!damping_) return Mat::Zero(n_, n_);
    return damping_.value(q, p);
}

Mat checked_inverse(const Mat& m, const std::string& msg) {
    Eigen::PartialPivLU<Mat> lu(m);
    const double rc = lu.rcond();
    if (!(rc > 1e-14) || !std::isfinite(rc)) throw NumericError(msg);
    return lu.inverse();
}

Mat inertia_inverse(const MechanicalSystem& sys, const Vec& q) {
    return checked_inverse(sys.inertia(q), "inertia not invertible at q");
}

Vec kinetic_gradient(const MechanicalSystem& sys, const Vec& q, const Vec& p) {
    const Vec v = inertia_inverse(sys, q) * p;
    Vec g(sys.dof());
    for (Index i = 0; i < sys.dof(); ++i) {
        g(i) = -0.5 * v.dot(sys.inertia_partial(q, i) * v);
    }
    return g;
}

std::pair<Vec, Vec> eval_open_loop(const MechanicalSystem& sys, const State& s,
                                   const Vec& u) {
    require_same_size(s.dof(), sys.dof(), "state vs system dimension");
    require_same_size(u.size(), sys.actuated(), "input vs actuated count");
    const Mat minv = inertia_inverse(sys, s.q);
    const Vec v = minv * s.p;
    Vec kin(sys.dof());
    for (Index i = 0; i < sys.dof(); ++i) {
        kin(i) = -0.5 * v.dot(sys.inertia_partial(s.q, i) * v);
    }
    Vec dp = -sys.potential().gradient(s.q) - kin - sys.damping(s.q, s.p) * v +
             sys.input_map() * u;
    return {v, std::move(dp)};
}

double eval_hamiltonian(const MechanicalSystem& sys, const State& s) {
    require_same_size(s.dof(), sys.dof(), "state vs system dimension");
    const Mat minv = inertia_inverse(sys, s.q);
    return 0.5 * s.p.dot(minv * s.p) + sys.potential().value(s.q);
}

AssumptionReport validate_assumptions(const ScalarField& potential,
                                      const MatrixField& interconnection,
                                      const MatrixField& dissipation,
                                      const Region& region) {
    AssumptionReport r;
    r.region = region.describe();
    r.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
    bool finite = true;

    const Vec& c = region.center;
    const Mat hc = potential.hessian(c);
    r.gradient_norm_at_center = potential.gradient(c).norm();
    const double grad_tol = 1e-7 * (1.0 + hc.cwiseAbs().maxCoeff());
    r.isolated_minimum = r.gradient_norm_at_center <= grad_tol && min_eigenvalue(hc) > 0.0;
    if (!r.isolated_minimum) {
        r.failure = "potential has no isolated minimum at the region center";
    }

    for (const Vec& q : region.configuration_samples()) {
        const double lmin = min_eigenvalue(sym_part(potential.hessian(q)));
        if (lmin < r.min_hessian_eigenvalue) r.min_hessian_eigenvalue = lmin;
        if (interconnection) {
            const double na = spectral_norm(interconnection.value(q));
            finite = finite && std::isfinite(na);
            r.max_norm_interconnection = std::max(r.max_norm_interconnection, na);
        } else {
            r.max_norm_interconnection = 1.0;
        }
    }
    for (const State& s : region.phase_samples()) {
        ++r.samples;
        if (!dissipation) continue;
        const double nd = spectral_norm(dissipation.value(s.q, s.p));
        finite = finite && std::isfinite(nd);
        r.max_norm_dissipation = std::max(r.max_norm_dissipation, nd);
    }
    r.strongly_convex = r.min_hessian_eigenvalue > 0.0;
    r.bounded = finite;
    if (r.failure.empty() && !r.strongly_convex) {
        r.failure = "potential not strongly convex on sampled region (min eigenvalue " +
                    format_g17(r.min_hessian_eigenvalue) + ")";
    }
    if (r.failure.empty() && !r.bounded) r.failure = "unbounded interconnection or dissipation";
    return r;
}

AssumptionReport validate_assumptions(const MechanicalSystem& sys, const Region& region) {
    MatrixField damping = sys.damping_field();
    if (!damping) damping = MatrixField::constant(Mat::Zero(sys.dof(), sys.dof()));
    return validate_assumptions(sys.potential(), MatrixField{}, damping, region);
}

}  // namespace phes
