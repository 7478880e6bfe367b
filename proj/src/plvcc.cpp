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

#include "phes/plvcc.hpp"

#include <cmath>

namespace phes {

Mat upper_cholesky(const Mat& s) {
    const Index n = s.rows();
    if (s.cols() != n) throw ShapeError("shape error: Cholesky input must be square");
    Mat t = Mat::Zero(n, n);
    // S_ij = sum_{k >= max(i,j)} T_ik T_jk, solved from the last column backwards.
    for (Index j = n - 1; j >= 0; --j) {
        double pivot = s(j, j);
        for (Index k = j + 1; k < n; ++k) pivot -= t(j, k) * t(j, k);
        if (!(pivot > 0.0)) {
            throw NumericError("matrix not positive definite (pivot <= 0 at row " +
                               std::to_string(j + 1) + ")");
        }
        t(j, j) = std::sqrt(pivot);
        for (Index i = 0; i < j; ++i) {
            double acc = s(i, j);
            for (Index k = j + 1; k < n; ++k) acc -= t(i, k) * t(j, k);
            t(i, j) = acc / t(j, j);
        }
    }
    return t;
}

std::vector<Mat> cholesky_partials(const Mat& t, const std::vector<Mat>& ds) {
    // With W = T^-1 X upper triangular: T^-1 dS T^-T = W + W^T, so W is the
    // upper triangle of T^-1 dS T^-T with its diagonal halved.
    const Index n = t.rows();
    const auto tri = t.triangularView<Eigen::Upper>();
    std::vector<Mat> out;
    out.reserve(ds.size());
    for (const Mat& d : ds) {
        Mat c = tri.solve(d);
        c = tri.solve(c.transpose()).transpose();  // T^-1 dS T^-T
        Mat w = Mat::Zero(n, n);
        for (Index j = 0; j < n; ++j) {
            for (Index i = 0; i < j; ++i) w(i, j) = c(i, j);
            w(j, j) = 0.5 * c(j, j);
        }
        out.push_back(t * w);
    }
    return out;
}

std::vector<Mat> cholesky_partials(const MatrixField& s_field, const Vec& q) {
    const Mat t = upper_cholesky(s_field.value(q));
    std::vector<Mat> ds;
    for (Index i = 0; i < q.size(); ++i) ds.push_back(s_field.partial(q, i));
    return cholesky_partials(t, ds);
}

CanonicalPHSystem::CanonicalPHSystem(Index dof, ScalarField potential,
                                     MatrixField interconnection, MatrixField skew,
                                     MatrixField dissipation)
    : n_(dof),
      potential_(std::move(potential)),
      a_(std::move(interconnection)),
      j_(std::move(skew)),
      d_(std::move(dissipation)),
      origin_shift_(Vec::Zero(dof)) {
    if (n_ < 1) throw ShapeError("shape error: canonical system needs n >= 1");
    if (!potential_ || !a_ || !d_) {
        throw Error("canonical system needs potential, interconnection and dissipation");
    }
}

void CanonicalPHSystem::set_origin(Vec shift, double energy_offset) {
    origin_shift_ = std::move(shift);
    energy_offset_ = energy_offset;
}

CanonicalPoint CanonicalPHSystem::point(const Vec& q, const Vec& p, bool with_partials) const {
    require_same_size(q.size(), n_, "q vs canonical dimension");
    require_same_size(p.size(), n_, "p vs canonical dimension");
    if (joint_) return joint_(q, p, with_partials);
    CanonicalPoint pt;
    pt.a = a_.value(q, p);
    if (with_partials) {
        for (Index i = 0; i < n_; ++i) pt.a_partials.push_back(a_.partial(q, p, i));
    }
    pt.j = j_ ? j_.value(q, p) : Mat::Zero(n_, n_);
    pt.d = d_.value(q, p);
    pt.u = potential_.value(q);
    pt.grad_u = potential_.gradient(q);
    pt.hess_u = potential_.hessian(q);
    return pt;
}

double CanonicalPHSystem::hamiltonian(const State& s) const {
    return 0.5 * s.p.squaredNorm() + potential_.value(s.q);
}

Vec CanonicalPHSystem::vector_field(const State& s) const {
    const CanonicalPoint pt = point(s.q, s.p);
    Vec x(2 * n_);
    x << pt.a * s.p, -pt.a.transpose() * pt.grad_u + (pt.j - pt.d) * s.p;
    return x;
}

namespace {

struct TransformAt {
    Vec qm;
    Mat t;
    Mat t_inv;
    std::vector<Mat> dt;
};

TransformAt transform_at(const ClosedLoopSystem& cl, const Vec& q, bool partials) {
    TransformAt tr;
    tr.qm = q + cl.q_star();
    tr.t = upper_cholesky(cl.inertia_d_inverse(tr.qm));
    const Index n = q.size();
    tr.t_inv = tr.t.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
    if (partials) {
        std::vector<Mat> ds;
        for (Index i = 0; i < n; ++i) ds.push_back(cl.inertia_d_inverse_partial(tr.qm, i));
        tr.dt = cholesky_partials(tr.t, ds);
    }
    return tr;
}

CanonicalPoint canonical_point(const ClosedLoopSystem& cl, double u_offset, const Vec& q,
                               const Vec& p, bool with_partials) {
    const Index n = q.size();
    const TransformAt tr = transform_at(cl, q, true);
    const Mat m = cl.base().inertia(tr.qm);
    const Mat minv = checked_inverse(m, "inertia not invertible at q");
    const Vec pm = tr.t_inv.transpose() * p;

    CanonicalPoint pt;
    pt.a = minv * tr.t_inv.transpose();
    Eigen::PartialPivLU<Mat> lu(pt.a);
    if (!(lu.rcond() > 1e-14)) throw NumericError("transform degenerate at q");

    pt.d = tr.t.transpose() * cl.dissipation(tr.qm, pm) * tr.t;
    pt.j = tr.t.transpose() * cl.interconnection(tr.qm, pm) * tr.t;
    const Mat at = pt.a.transpose();
    for (Index i = 0; i < n; ++i) {
        const Vec w = (p.transpose() * tr.t_inv * tr.dt[static_cast<std::size_t>(i)]).transpose();
        const Vec ai = at.col(i);
        pt.j += w * ai.transpose() - ai * w.transpose();
    }
    if (with_partials) {
        for (Index i = 0; i < n; ++i) {
            const Mat dm = cl.base().inertia_partial(tr.qm, i);
            const Mat dt_inv = -tr.t_inv * tr.dt[static_cast<std::size_t>(i)] * tr.t_inv;
            pt.a_partials.push_back(-minv * dm * pt.a + minv * dt_inv.transpose());
        }
    }
    pt.u = cl.potential_d(tr.qm) - u_offset;
    pt.grad_u = cl.potential_d_gradient(tr.qm);
    pt.hess_u = cl.potential_d_hessian(tr.qm);
    return pt;
}

}  // namespace

CanonicalPHSystem to_canonical(const ClosedLoopSystem& cl) {
    const Index n = cl.dof();
    const double u_offset = cl.potential_d(cl.q_star());
    const Vec& qs = cl.q_star();

    ScalarField potential(
        [cl, u_offset, qs](const Vec& q) { return cl.potential_d(q + qs) - u_offset; },
        [cl, qs](const Vec& q) { return cl.potential_d_gradient(q + qs); },
        [cl, qs](const Vec& q) { return cl.potential_d_hessian(q + qs); });
    MatrixField a(
        [cl, u_offset](const Vec& q, const Vec& p) {
            return canonical_point(cl, u_offset, q, p, false).a;
        },
        MatrixProperty::kNone,
        [cl, u_offset](const Vec& q, const Vec& p, Index i) {
            return canonical_point(cl, u_offset, q, p, true).a_partials[static_cast<std::size_t>(i)];
        });
    MatrixField j(
        [cl, u_offset](const Vec& q, const Vec& p) {
            return canonical_point(cl, u_offset, q, p, false).j;
        },
        MatrixProperty::kSkewSymmetric);
    MatrixField d(
        [cl, u_offset](const Vec& q, const Vec& p) {
            return canonical_point(cl, u_offset, q, p, false).d;
        },
        MatrixProperty::kPositiveSemiDefinite);

    CanonicalPHSystem cs(n, std::move(potential), std::move(a), std::move(j), std::move(d));
    cs.set_origin(qs, u_offset);
    cs.set_joint_evaluator([cl, u_offset](const Vec& q, const Vec& p, bool partials) {
        return canonical_point(cl, u_offset, q, p, partials);
    });
    return cs;
}

State map_state(const ClosedLoopSystem& cl, const State& s) {
    require_same_size(s.dof(), cl.dof(), "state vs system dimension");
    const Mat t = upper_cholesky(cl.inertia_d_inverse(s.q));
    return State(s.q - cl.q_star(), t.transpose() * s.p);
}

State inverse_map_state(const ClosedLoopSystem& cl, const State& canonical) {
    require_same_size(canonical.dof(), cl.dof(), "state vs system dimension");
    const Vec qm = canonical.q + cl.q_star();
    const Mat t = upper_cholesky(cl.inertia_d_inverse(qm));
    const Vec pm = t.transpose().triangularView<Eigen::Lower>().solve(canonical.p);
    return State(qm, pm);
}

}  // namespace phes
