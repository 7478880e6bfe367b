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

#include "phes/pidpbc.hpp"

#include <cmath>
#include <limits>

namespace phes {
namespace {

constexpr double kSymTol = 1e-10;
constexpr double kEigMargin = 1e-12;

void check_gain_matrix(const Mat& k, Index m, const char* name, bool definite) {
    if (k.rows() != m || k.cols() != m) {
        throw ShapeError(std::string("shape error: ") + name + " must be " +
                         std::to_string(m) + "x" + std::to_string(m));
    }
    if (!k.allFinite() || symmetry_residual(k) > kSymTol) {
        throw Error(std::string(name) + " must be symmetric");
    }
    const double lmin = min_eigenvalue(sym_part(k));
    if (definite && lmin < kEigMargin) {
        throw Error(std::string(name) + " must be positive definite");
    }
    if (!definite && lmin < -kEigMargin) {
        throw Error(std::string(name) + " must be positive semi-definite");
    }
}

}  // namespace

GainSet GainSet::diagonal(std::string label, const Vec& kp, const Vec& ki, const Vec& kd,
                          Vec q_star) {
    GainSet g;
    g.label = std::move(label);
    g.kp = kp.asDiagonal();
    g.ki = ki.asDiagonal();
    g.kd = kd.asDiagonal();
    g.q_star = std::move(q_star);
    return g;
}

void GainSet::validate(Index dof, Index actuated) const {
    require_same_size(q_star.size(), dof, "q_star vs system dimension");
    if (!q_star.allFinite()) throw Error("q_star must be finite");
    check_gain_matrix(kp, actuated, "K_P", false);
    check_gain_matrix(ki, actuated, "K_I", true);
    check_gain_matrix(kd, actuated, "K_D", false);
}

bool GainSet::has_derivative_action() const { return kd.cwiseAbs().maxCoeff() > 0.0; }

Vec compute_kappa(const MechanicalSystem& sys, const GainSet& gains) {
    const Mat& g = sys.input_map();
    Eigen::LLT<Mat> llt(gains.ki);
    if (gains.ki.rows() != sys.actuated() || llt.info() != Eigen::Success ||
        min_eigenvalue(sym_part(gains.ki)) < kEigMargin) {
        throw Error("K_I must be positive definite");
    }
    require_same_size(gains.q_star.size(), sys.dof(), "q_star vs system dimension");
    const Vec grad = sys.potential().gradient(gains.q_star);
    return -g.transpose() * gains.q_star - llt.solve(g.transpose() * grad);
}

bool check_assignable(const MechanicalSystem& sys, const Vec& q_star) {
    if (sys.fully_actuated()) return true;
    const Vec r = sys.annihilator() * sys.potential().gradient(q_star);
    return r.cwiseAbs().maxCoeff() <= 1e-9;
}

GainCondition check_gain_condition(const MechanicalSystem& sys, const GainSet& gains,
                                   ControlVariant variant) {
    const Mat& g = sys.input_map();
    Mat h = g * gains.ki * g.transpose();
    if (variant == ControlVariant::kStandard) h += sys.potential().hessian(gains.q_star);
    GainCondition c;
    c.margin = min_eigenvalue(sym_part(h));
    c.holds = c.margin > 0.0;
    return c;
}

Vec passive_output(const MechanicalSystem& sys, const State& s) {
    return sys.input_map().transpose() * (inertia_inverse(sys, s.q) * s.p);
}

Mat passive_output_q_jacobian(const MechanicalSystem& sys, const State& s) {
    const Mat minv = inertia_inverse(sys, s.q);
    const Vec v = minv * s.p;
    const Mat gt_minv = sys.input_map().transpose() * minv;
    Mat yq(sys.actuated(), sys.dof());
    for (Index i = 0; i < sys.dof(); ++i) {
        yq.col(i) = -gt_minv * (sys.inertia_partial(s.q, i) * v);
    }
    return yq;
}

Vec control_signal(const MechanicalSystem& sys, const GainSet& gains, const State& s,
                   const std::optional<Vec>& ydot, ControlVariant variant) {
    require_same_size(s.dof(), sys.dof(), "state vs system dimension");
    if (variant == ControlVariant::kGravityCompensated && !sys.fully_actuated()) {
        throw Error("gravity compensation requires m = n");
    }
    const Mat& g = sys.input_map();
    const Mat minv = inertia_inverse(sys, s.q);
    const Vec v = minv * s.p;
    const Vec y = g.transpose() * v;

    Vec u0;
    if (variant == ControlVariant::kStandard) {
        const Vec kappa = compute_kappa(sys, gains);
        u0 = -gains.kp * y - gains.ki * (g.transpose() * s.q + kappa);
    } else {
        u0 = sys.potential().gradient(s.q) - gains.kp * y -
             gains.ki * (g.transpose() * s.q - gains.q_star);
    }
    if (!gains.has_derivative_action()) return u0;
    if (ydot) {
        require_same_size(ydot->size(), sys.actuated(), "ydot vs actuated count");
        return u0 - gains.kd * *ydot;
    }

    // ydot = Yq qdot + G^T M^-1 pdot with pdot = f0 + G (u0 - K_D ydot).
    Vec kin(sys.dof());
    for (Index i = 0; i < sys.dof(); ++i) {
        kin(i) = -0.5 * v.dot(sys.inertia_partial(s.q, i) * v);
    }
    const Vec f0 = -sys.potential().gradient(s.q) - kin - sys.damping(s.q, s.p) * v;
    const Mat yq = passive_output_q_jacobian(sys, s);
    const Mat gt_minv = g.transpose() * minv;
    const Mat lhs = Mat::Identity(sys.actuated(), sys.actuated()) + gt_minv * g * gains.kd;
    const Vec rhs = yq * v + gt_minv * (f0 + g * u0);
    const Vec yd = lhs.partialPivLu().solve(rhs);
    return u0 - gains.kd * yd;
}

struct ClosedLoopSystem::Data {
    MechanicalSystem base;
    GainSet gains;
    ControlVariant variant;
    Vec kappa;
    Mat gkpg;  // G K_P G^T
    Mat gkig;  // G K_I G^T
    Mat gkdg;  // G K_D G^T
    bool derivative = false;
};

ClosedLoopSystem::ClosedLoopSystem(MechanicalSystem base, GainSet gains,
                                   ControlVariant variant) {
    gains.validate(base.dof(), base.actuated());
    if (variant == ControlVariant::kGravityCompensated && !base.fully_actuated()) {
        throw Error("gravity compensation requires m = n");
    }
    auto d = std::make_shared<Data>();
    const Mat& g = base.input_map();
    d->gkpg = g * gains.kp * g.transpose();
    d->gkig = g * gains.ki * g.transpose();
    d->gkdg = g * gains.kd * g.transpose();
    d->derivative = gains.has_derivative_action();
    d->kappa = variant == ControlVariant::kStandard ? compute_kappa(base, gains)
                                                    : Vec(-gains.q_star);
    d->variant = variant;
    d->base = std::move(base);
    d->gains = std::move(gains);
    d_ = std::move(d);
}

const MechanicalSystem& ClosedLoopSystem::base() const { return d_->base; }
const GainSet& ClosedLoopSystem::gains() const { return d_->gains; }
const Vec& ClosedLoopSystem::kappa() const { return d_->kappa; }
ControlVariant ClosedLoopSystem::variant() const { return d_->variant; }

Mat ClosedLoopSystem::inertia_d(const Vec& q) const {
    const Mat m = base().inertia(q);
    if (!d_->derivative) return m;
    return m * checked_inverse(m + d_->gkdg, "M + G K_D G^T not invertible at q") * m;
}

Mat ClosedLoopSystem::inertia_d_inverse(const Vec& q) const {
    const Mat minv = inertia_inverse(base(), q);
    if (!d_->derivative) return minv;
    return minv + minv * d_->gkdg * minv;
}

Mat ClosedLoopSystem::inertia_d_inverse_partial(const Vec& q, Index i) const {
    const Mat minv = inertia_inverse(base(), q);
    const Mat dminv = -minv * base().inertia_partial(q, i) * minv;
    if (!d_->derivative) return dminv;
    return dminv + dminv * d_->gkdg * minv + minv * d_->gkdg * dminv;
}

double ClosedLoopSystem::potential_d(const Vec& q) const {
    const Mat& g = base().input_map();
    const Vec z = g.transpose() * q + kappa();
    const double shaped = 0.5 * z.dot(gains().ki * z);
    if (variant() == ControlVariant::kGravityCompensated) return shaped;
    return shaped + base().potential().value(q);
}

Vec ClosedLoopSystem::potential_d_gradient(const Vec& q) const {
    const Mat& g = base().input_map();
    const Vec shaped = g * (gains().ki * (g.transpose() * q + kappa()));
    if (variant() == ControlVariant::kGravityCompensated) return shaped;
    return shaped + base().potential().gradient(q);
}

Mat ClosedLoopSystem::potential_d_hessian(const Vec& q) const {
    if (variant() == ControlVariant::kGravityCompensated) return d_->gkig;
    return d_->gkig + base().potential().hessian(q);
}

Mat ClosedLoopSystem::e_matrix(const Vec& q) const {
    const Index n = dof();
    if (!d_->derivative) return Mat::Identity(n, n);
    return Mat::Identity(n, n) + d_->gkdg * inertia_inverse(base(), q);
}

Mat ClosedLoopSystem::b_matrix(const Vec& q, const Vec& p) const {
    const Index n = dof();
    if (!d_->derivative) return Mat::Zero(n, n);
    return base().input_map() * gains().kd * passive_output_q_jacobian(base(), State(q, p));
}

Mat ClosedLoopSystem::interconnection(const Vec& q, const Vec& p) const {
    const Index n = dof();
    if (!d_->derivative) return Mat::Zero(n, n);
    const Mat einv = checked_inverse(e_matrix(q), "E not invertible at q");
    const Mat b = b_matrix(q, p);
    return einv * (b.transpose() - b) * einv.transpose();
}

Mat ClosedLoopSystem::dissipation(const Vec& q, const Vec& p) const {
    const Mat r = base().damping(q, p) + d_->gkpg;
    if (!d_->derivative) return r;
    const Mat einv = checked_inverse(e_matrix(q), "E not invertible at q");
    return einv * r * einv.transpose();
}

double ClosedLoopSystem::hamiltonian(const State& s) const {
    return 0.5 * s.p.dot(inertia_d_inverse(s.q) * s.p) + potential_d(s.q);
}

Vec ClosedLoopSystem::hamiltonian_gradient(const State& s) const {
    const Index n = dof();
    Vec grad(2 * n);
    Vec gq = potential_d_gradient(s.q);
    for (Index i = 0; i < n; ++i) {
        gq(i) += 0.5 * s.p.dot(inertia_d_inverse_partial(s.q, i) * s.p);
    }
    grad << gq, inertia_d_inverse(s.q) * s.p;
    return grad;
}

Mat ClosedLoopSystem::structure_matrix(const Vec& q, const Vec& p) const {
    const Index n = dof();
    const Mat minv = inertia_inverse(base(), q);
    const Mat md = inertia_d(q);
    Mat f = Mat::Zero(2 * n, 2 * n);
    f.topRightCorner(n, n) = minv * md;
    f.bottomLeftCorner(n, n) = -md * minv;
    f.bottomRightCorner(n, n) = interconnection(q, p) - dissipation(q, p);
    return f;
}

Vec ClosedLoopSystem::vector_field(const State& s) const {
    return structure_matrix(s.q, s.p) * hamiltonian_gradient(s);
}

MatrixField ClosedLoopSystem::inertia_d_field() const {
    auto self = *this;
    return MatrixField::of_q([self](const Vec& q) { return self.inertia_d(q); },
                             MatrixProperty::kPositiveDefinite);
}

ScalarField ClosedLoopSystem::potential_d_field() const {
    auto self = *this;
    return ScalarField([self](const Vec& q) { return self.potential_d(q); },
                       [self](const Vec& q) { return self.potential_d_gradient(q); },
                       [self](const Vec& q) { return self.potential_d_hessian(q); });
}

MatrixField ClosedLoopSystem::dissipation_field() const {
    auto self = *this;
    return MatrixField([self](const Vec& q, const Vec& p) { return self.dissipation(q, p); },
                       MatrixProperty::kPositiveSemiDefinite);
}

MatrixField ClosedLoopSystem::interconnection_field() const {
    auto self = *this;
    return MatrixField(
        [self](const Vec& q, const Vec& p) { return self.interconnection(q, p); },
        MatrixProperty::kSkewSymmetric);
}

MatrixField ClosedLoopSystem::b_field() const {
    auto self = *this;
    return MatrixField([self](const Vec& q, const Vec& p) { return self.b_matrix(q, p); });
}

MatrixField ClosedLoopSystem::e_field() const {
    auto self = *this;
    return MatrixField::of_q([self](const Vec& q) { return self.e_matrix(q); });
}

ClosedLoopSystem build_closed_loop(const MechanicalSystem& sys, const GainSet& gains,
                                   ControlVariant variant) {
    gains.validate(sys.dof(), sys.actuated());
    if (!check_assignable(sys, gains.q_star)) {
        throw InfeasibleError("q_star is not an assignable equilibrium");
    }
    if (!check_gain_condition(sys, gains, variant).holds) {
        throw InfeasibleError("equilibrium not stabilizable with given K_I");
    }
    return ClosedLoopSystem(sys, gains, variant);
}

ClosedLoopConditions check_c1_c2_c3(const ClosedLoopSystem& cl, const Region& region) {
    ClosedLoopConditions r;
    r.region = region.describe();
    r.c1_min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
    r.c3_min_dissipation_eigenvalue = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (const Vec& q : region.configuration_samples()) {
        r.c1_min_hessian_eigenvalue = std::min(
            r.c1_min_hessian_eigenvalue, min_eigenvalue(sym_part(cl.potential_d_hessian(q))));
        const double c2 = spectral_norm(inertia_inverse(cl.base(), q) * cl.inertia_d(q));
        finite = finite && std::isfinite(c2);
        r.c2_max_norm = std::max(r.c2_max_norm, c2);
    }
    for (const State& s : region.phase_samples()) {
        r.c3_min_dissipation_eigenvalue =
            std::min(r.c3_min_dissipation_eigenvalue,
                     min_eigenvalue(sym_part(cl.dissipation(s.q, s.p))));
    }
    r.c1 = r.c1_min_hessian_eigenvalue > 0.0;
    r.c2 = finite;
    r.c3 = r.c3_min_dissipation_eigenvalue > 0.0;
    return r;
}

DampingCheck check_underactuated_damping(const MechanicalSystem& sys, const Region& region) {
    DampingCheck c;
    if (sys.fully_actuated()) {
        c.holds = true;
        c.min_eigenvalue = std::numeric_limits<double>::infinity();
        c.note = "fully actuated: requires K_P > 0";
        return c;
    }
    const Mat gp = sys.annihilator();
    c.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const State& s : region.phase_samples()) {
        const Mat block = gp * sys.damping(s.q, s.p) * gp.transpose();
        c.min_eigenvalue = std::min(c.min_eigenvalue, min_eigenvalue(sym_part(block)));
    }
    c.holds = c.min_eigenvalue > 0.0;
    c.note = c.holds ? "unactuated damping block positive definite"
                     : "unactuated damping block not positive definite";
    return c;
}

}  // namespace phes
