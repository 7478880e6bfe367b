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

#include "phes/fields.hpp"

#include <cmath>
#include <limits>

namespace phes {
namespace {

double step_first(double x) {
    static const double root3 = std::cbrt(std::numeric_limits<double>::epsilon());
    return std::max(1.0, std::abs(x)) * root3;
}

double step_second(double x) {
    static const double root4 =
        std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));
    return std::max(1.0, std::abs(x)) * root4;
}

template <typename F>
auto eval_at(const F& f, const Vec& x, Index i, double offset) {
    try {
        return f(x);
    } catch (const std::exception& e) {
        throw NumericError("evaluator failed inside finite-difference stencil at "
                           "coordinate " + std::to_string(i) + ", offset " +
                           format_g17(offset) + ": " + e.what());
    }
}

}  // namespace

Vec fd_gradient(const ScalarFn& f, const Vec& x) {
    Vec g(x.size());
    Vec xp = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double h = step_first(x(i));
        xp(i) = x(i) + h;
        const double fp = eval_at(f, xp, i, h);
        xp(i) = x(i) - h;
        const double fm = eval_at(f, xp, i, -h);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

Mat fd_jacobian(const VectorFn& f, const Vec& x) {
    Mat jac;
    Vec xp = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double h = step_first(x(i));
        xp(i) = x(i) + h;
        const Vec fp = eval_at(f, xp, i, h);
        xp(i) = x(i) - h;
        const Vec fm = eval_at(f, xp, i, -h);
        xp(i) = x(i);
        if (i == 0) jac.resize(fp.size(), x.size());
        jac.col(i) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

Mat fd_hessian(const ScalarFn& f, const Vec& x) {
    const Index n = x.size();
    Mat hess(n, n);
    const double f0 = eval_at(f, x, -1, 0.0);
    Vec xs = x;
    for (Index i = 0; i < n; ++i) {
        const double hi = step_second(x(i));
        xs(i) = x(i) + hi;
        const double fp = eval_at(f, xs, i, hi);
        xs(i) = x(i) - hi;
        const double fm = eval_at(f, xs, i, -hi);
        xs(i) = x(i);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (Index j = i + 1; j < n; ++j) {
            const double hj = step_second(x(j));
            double acc = 0.0;
            for (int si : {1, -1}) {
                for (int sj : {1, -1}) {
                    xs(i) = x(i) + si * hi;
                    xs(j) = x(j) + sj * hj;
                    acc += si * sj * eval_at(f, xs, i, si * hi);
                }
            }
            xs(i) = x(i);
            xs(j) = x(j);
            hess(i, j) = hess(j, i) = acc / (4.0 * hi * hj);
        }
    }
    return hess;
}

Mat fd_hessian_from_gradient(const VectorFn& grad, const Vec& x) {
    return sym_part(fd_jacobian(grad, x));
}

Mat fd_matrix_partial(const MatrixFn& f, const Vec& x, Index i) {
    const double h = step_first(x(i));
    Vec xp = x;
    xp(i) = x(i) + h;
    const Mat fp = eval_at(f, xp, i, h);
    xp(i) = x(i) - h;
    const Mat fm = eval_at(f, xp, i, -h);
    return (fp - fm) / (2.0 * h);
}

ScalarField::ScalarField(ScalarFn value, VectorFn gradient, MatrixFn hessian)
    : value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)) {}

double ScalarField::value(const Vec& q) const { return value_(q); }

Vec ScalarField::gradient(const Vec& q) const {
    if (gradient_) return gradient_(q);
    return fd_gradient(value_, q);
}

Mat ScalarField::hessian(const Vec& q) const {
    if (hessian_) return hessian_(q);
    if (gradient_) return fd_hessian_from_gradient(gradient_, q);
    return fd_hessian(value_, q);
}

void check_matrix_property(const Mat& m, MatrixProperty property) {
    constexpr double kTol = 1e-10;
    switch (property) {
        case MatrixProperty::kNone:
            return;
        case MatrixProperty::kSkewSymmetric:
            if ((m + m.transpose()).cwiseAbs().maxCoeff() > kTol * (1.0 + m.norm())) {
                throw NumericError("matrix declared skew-symmetric is not");
            }
            return;
        case MatrixProperty::kSymmetric:
        case MatrixProperty::kPositiveSemiDefinite:
        case MatrixProperty::kPositiveDefinite:
            break;
    }
    if (symmetry_residual(m) > kTol) {
        throw NumericError("matrix declared symmetric has residual " +
                           format_g17(symmetry_residual(m)));
    }
    if (property == MatrixProperty::kSymmetric) return;
    const double lmin = min_eigenvalue(sym_part(m));
    const double scale = kTol * (1.0 + m.cwiseAbs().maxCoeff());
    if (property == MatrixProperty::kPositiveDefinite && !(lmin > 0.0)) {
        throw NumericError("matrix declared positive definite has eigenvalue " +
                           format_g17(lmin));
    }
    if (property == MatrixProperty::kPositiveSemiDefinite && lmin < -scale) {
        throw NumericError("matrix declared positive semi-definite has eigenvalue " +
                           format_g17(lmin));
    }
}

MatrixField::MatrixField(Fn value, MatrixProperty property, PartialFn partial)
    : value_(std::move(value)), partial_(std::move(partial)), property_(property) {}

MatrixField MatrixField::constant(const Mat& m, MatrixProperty property) {
    const Index n = m.rows();
    return MatrixField([m](const Vec&, const Vec&) { return m; }, property,
                       [n](const Vec&, const Vec&, Index) { return Mat::Zero(n, n).eval(); });
}

MatrixField MatrixField::of_q(MatrixFn value, MatrixProperty property,
                              std::function<Mat(const Vec&, Index)> partial) {
    PartialFn pf;
    if (partial) {
        pf = [partial = std::move(partial)](const Vec& q, const Vec&, Index i) {
            return partial(q, i);
        };
    }
    return MatrixField(
        [value = std::move(value)](const Vec& q, const Vec&) { return value(q); },
        property, std::move(pf));
}

Mat MatrixField::value(const Vec& q, const Vec& p) const {
    Mat m = value_(q, p);
#ifndef NDEBUG
    check_matrix_property(m, property_);
#endif
    return m;
}

Mat MatrixField::value(const Vec& q) const { return value(q, Vec::Zero(q.size())); }

Mat MatrixField::partial(const Vec& q, const Vec& p, Index i) const {
    if (partial_) return partial_(q, p, i);
    return fd_matrix_partial([&](const Vec& qq) { return value_(qq, p); }, q, i);
}

Mat MatrixField::partial(const Vec& q, Index i) const {
    return partial(q, Vec::Zero(q.size()), i);
}

}  // namespace phes
