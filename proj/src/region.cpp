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

#include "phes/region.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace phes {
namespace {

constexpr std::array<unsigned, 32> kPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
    59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double ipow(int base, Index exp) {
    double r = 1.0;
    for (Index i = 0; i < exp; ++i) r *= base;
    return r;
}

// Tensor grid over a box; axis k spans [-radii(k), radii(k)].
std::vector<Vec> tensor_grid(const Vec& radii, int pts) {
    const Index dims = radii.size();
    const auto total = static_cast<std::size_t>(ipow(pts, dims));
    std::vector<Vec> out;
    out.reserve(total);
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    for (std::size_t c = 0; c < total; ++c) {
        Vec x(dims);
        for (Index k = 0; k < dims; ++k) {
            const double t = -1.0 + 2.0 * idx[static_cast<std::size_t>(k)] / (pts - 1);
            x(k) = t * radii(k);
        }
        out.push_back(std::move(x));
        for (Index k = dims - 1; k >= 0; --k) {
            auto& i = idx[static_cast<std::size_t>(k)];
            if (++i < pts) break;
            i = 0;
        }
    }
    return out;
}

}  // namespace

Vec halton_point(std::uint64_t index, Index dims) {
    if (dims > static_cast<Index>(kPrimes.size())) {
        throw ShapeError("shape error: Halton sequence supports at most 32 dimensions");
    }
    Vec x(dims);
    for (Index k = 0; k < dims; ++k) {
        const unsigned base = kPrimes[static_cast<std::size_t>(k)];
        double f = 1.0;
        double r = 0.0;
        std::uint64_t i = index;
        while (i > 0) {
            f /= base;
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        x(k) = r;
    }
    return x;
}

Region Region::box(Index n, double q_radius, double p_radius) {
    return box(Vec::Zero(n), q_radius, p_radius);
}

Region Region::box(const Vec& center, double q_radius, double p_radius) {
    Region r;
    r.center = center;
    r.q_radii = Vec::Constant(center.size(), q_radius);
    r.p_radii = Vec::Constant(center.size(), p_radius);
    return r;
}

void Region::validate() const {
    require_same_size(center.size(), q_radii.size(), "region center vs q radii");
    require_same_size(q_radii.size(), p_radii.size(), "region q radii vs p radii");
    if (q_radii.size() < 1) throw ShapeError("shape error: empty region");
    if (!(q_radii.array() > 0.0).all() || !(p_radii.array() > 0.0).all() ||
        !q_radii.allFinite() || !p_radii.allFinite()) {
        throw Error("region radii must be strictly positive and finite");
    }
    if (grid_points_per_axis < 3) throw Error("grid_points_per_axis must be >= 3");
    if (extra_samples < 0) throw Error("extra_samples must be non-negative");
}

int Region::points_per_axis(Index dims) const {
    int pts = grid_points_per_axis;
    // Odd counts keep the center on the grid.
    while (pts > 3 && ipow(pts, dims) > max_samples) pts -= (pts % 2 == 1) ? 2 : 1;
    return pts;
}

std::vector<State> Region::phase_samples() const {
    validate();
    const Index n = dof();
    Vec radii(2 * n);
    radii << q_radii, p_radii;
    const int pts = points_per_axis(2 * n);
    std::vector<State> out;
    for (const Vec& x : tensor_grid(radii, pts)) {
        out.emplace_back(center + x.head(n), x.tail(n));
    }
    for (int k = 0; k < extra_samples; ++k) {
        const Vec u = halton_point(seed + static_cast<std::uint64_t>(k) + 1, 2 * n);
        const Vec x = ((2.0 * u.array() - 1.0) * radii.array()).matrix();
        out.emplace_back(center + x.head(n), x.tail(n));
    }
    return out;
}

std::vector<Vec> Region::configuration_samples() const {
    validate();
    const Index n = dof();
    std::vector<Vec> out;
    for (const Vec& x : tensor_grid(q_radii, points_per_axis(n))) out.push_back(center + x);
    for (int k = 0; k < extra_samples; ++k) {
        const Vec u = halton_point(seed + static_cast<std::uint64_t>(k) + 1, n);
        out.push_back(center + ((2.0 * u.array() - 1.0) * q_radii.array()).matrix());
    }
    return out;
}

bool Region::contains(const State& s, double slack) const {
    if (s.dof() != dof()) return false;
    const Vec dq = (s.q - center).cwiseAbs();
    const Vec dp = s.p.cwiseAbs();
    return (dq.array() <= q_radii.array() * (1.0 + slack)).all() &&
           (dp.array() <= p_radii.array() * (1.0 + slack)).all();
}

Region Region::scaled(double factor) const {
    Region r = *this;
    r.q_radii *= factor;
    r.p_radii *= factor;
    return r;
}

std::string Region::describe() const {
    std::ostringstream os;
    const Index n = dof();
    os << "sampled box |q - center| <= (";
    for (Index i = 0; i < n; ++i) os << (i ? ", " : "") << q_radii(i);
    os << "), |p| <= (";
    for (Index i = 0; i < n; ++i) os << (i ? ", " : "") << p_radii(i);
    os << "); grid " << points_per_axis(2 * n) << "^" << 2 * n << " + " << extra_samples
       << " Halton points (seed " << seed << ")";
    return os.str();
}

}  // namespace phes
