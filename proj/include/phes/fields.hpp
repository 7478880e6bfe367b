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

#ifndef PHES_FIELDS_HPP
#define PHES_FIELDS_HPP

#include "phes/types.hpp"

#include <functional>

namespace phes {

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;
using MatrixFn = std::function<Mat(const Vec&)>;

// Central differences with step h_i = max(1, |x_i|) * eps^(1/3). A throw from
// the evaluator is rethrown as NumericError naming the stencil point.
Vec fd_gradient(const ScalarFn& f, const Vec& x);
Mat fd_jacobian(const VectorFn& f, const Vec& x);
/// Second differences of values (step eps^(1/4)), symmetrized.
Mat fd_hessian(const ScalarFn& f, const Vec& x);
/// Jacobian of an analytic gradient, symmetrized as (H + H^T)/2.
Mat fd_hessian_from_gradient(const VectorFn& grad, const Vec& x);
/// d/dx_i of a matrix-valued function.
Mat fd_matrix_partial(const MatrixFn& f, const Vec& x, Index i);

/// Scalar function of configuration. Missing derivatives fall back to
/// finite differences.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(ScalarFn value, VectorFn gradient = {},
                         MatrixFn hessian = {});

    double value(const Vec& q) const;
    Vec gradient(const Vec& q) const;
    Mat hessian(const Vec& q) const;

    bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }
    bool has_analytic_hessian() const { return static_cast<bool>(hessian_); }
    explicit operator bool() const { return static_cast<bool>(value_); }

private:
    ScalarFn value_;
    VectorFn gradient_;
    MatrixFn hessian_;
};

enum class MatrixProperty {
    kNone,
    kSymmetric,
    kSkewSymmetric,
    kPositiveSemiDefinite,
    kPositiveDefinite,
};

/// Square-matrix valued function of (q, p). Fields that only depend on q
/// ignore p. Partials are with respect to q.
class MatrixField {
public:
    using Fn = std::function<Mat(const Vec& q, const Vec& p)>;
    using PartialFn = std::function<Mat(const Vec& q, const Vec& p, Index i)>;

    MatrixField() = default;
    MatrixField(Fn value, MatrixProperty property = MatrixProperty::kNone,
                PartialFn partial = {});

    static MatrixField constant(const Mat& m,
                                MatrixProperty property = MatrixProperty::kNone);
    /// Field depending on q only.
    static MatrixField of_q(MatrixFn value,
                            MatrixProperty property = MatrixProperty::kNone,
                            std::function<Mat(const Vec&, Index)> partial = {});

    /// In builds without NDEBUG the declared property is re-checked here.
    Mat value(const Vec& q, const Vec& p) const;
    Mat value(const Vec& q) const;
    Mat partial(const Vec& q, const Vec& p, Index i) const;
    Mat partial(const Vec& q, Index i) const;

    bool has_analytic_partials() const { return static_cast<bool>(partial_); }
    MatrixProperty property() const { return property_; }
    explicit operator bool() const { return static_cast<bool>(value_); }

private:
    Fn value_;
    PartialFn partial_;
    MatrixProperty property_ = MatrixProperty::kNone;
};

/// Throws NumericError if m violates the declared property (1e-10 tolerance).
void check_matrix_property(const Mat& m, MatrixProperty property);

}  // namespace phes

#endif  // PHES_FIELDS_HPP
