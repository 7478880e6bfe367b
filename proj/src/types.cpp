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

#include "phes/types.hpp"

#include <charconv>
#include <cstdio>

namespace phes {

State::State(Vec q_in, Vec p_in) : q(std::move(q_in)), p(std::move(p_in)) {
    if (q.size() != p.size() || q.size() < 1) {
        throw ShapeError("shape error: q and p must have the same dimension n >= 1");
    }
}

Vec State::stacked() const {
    Vec x(q.size() + p.size());
    x << q, p;
    return x;
}

State State::from_stacked(const Vec& x) {
    if (x.size() % 2 != 0) {
        throw ShapeError("shape error: stacked state has odd length");
    }
    const Index n = x.size() / 2;
    return State(x.head(n), x.tail(n));
}

bool State::finite() const { return q.allFinite() && p.allFinite(); }

double spectral_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double min_eigenvalue(const Mat& symmetric) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_eigenvalue(const Mat& symmetric) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Mat sym_part(const Mat& m) { return 0.5 * (m + m.transpose()); }

double symmetry_residual(const Mat& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

void require_same_size(Index a, Index b, const char* what) {
    if (a != b) {
        throw ShapeError(std::string("shape error: ") + what + " (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

std::string format_g17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string format_shortest(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace phes
