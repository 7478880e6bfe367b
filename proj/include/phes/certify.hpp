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

#ifndef PHES_CERTIFY_HPP
#define PHES_CERTIFY_HPP

#include "phes/mechanical.hpp"
#include "phes/plvcc.hpp"
#include "phes/region.hpp"

#include <string>
#include <vector>

namespace phes {

/// Weighting matrix of the cross term of the Lyapunov candidate.
enum class PhiChoice {
    kATranspose,  // Phi = A^T
    kAInverse,    // Phi = A^-1
};

const char* to_string(PhiChoice choice);
PhiChoice phi_choice_from_string(const std::string& text);

Mat phi_matrix(const Mat& a, PhiChoice choice);
/// d/dt Phi along the flow given Adot.
Mat phi_rate(const Mat& a, const Mat& a_dot, PhiChoice choice);
/// Adot = sum_i dA/dq_i * (A p)_i
Mat interconnection_rate(const CanonicalPoint& pt, const Vec& p);
/// A Phi + Phi^T A^T > 0
bool phi_condition_holds(const Mat& a, PhiChoice choice);

/// S = H + eps p^T Phi(q) grad U(q)
double lyapunov_value(const CanonicalPHSystem& sys, const State& s, double epsilon,
                      PhiChoice choice);

/// Upsilon = Q0 + eps Q1 with
///
///   Q0 = [0, 0; 0, D],  Q1 = [A Phi, 0; (J + D) Phi - Phidot, -Phi hess(U) A],
///
/// so that Sdot = -grad(H)^T Upsilon grad(H). Both parts are kept so that a
/// search over eps reuses one evaluation per sample.
struct UpsilonParts {
    Mat q0_sym;
    Mat q1_sym;
    Mat at(double epsilon) const { return q0_sym + epsilon * q1_sym; }
};
UpsilonParts upsilon_parts(const CanonicalPoint& pt, const Vec& p, PhiChoice choice);
UpsilonParts upsilon_parts(const CanonicalPHSystem& sys, const State& s, PhiChoice choice);

/// Non-symmetrized Upsilon.
Mat upsilon(const CanonicalPHSystem& sys, const State& s, double epsilon, PhiChoice choice);
Mat upsilon_sym(const CanonicalPHSystem& sys, const State& s, double epsilon,
                PhiChoice choice);

/// -grad(H)^T Upsilon_sym grad(H)
double lyapunov_rate(const CanonicalPHSystem& sys, const State& s, double epsilon,
                     PhiChoice choice);

/// Blocks of a symmetric 2n x 2n matrix [X, Y; Y^T, Z].
struct SchurBlocks {
    Mat x;
    Mat y;
    Mat z;
};
SchurBlocks schur_blocks(const Mat& upsilon_sym);

struct SchurResult {
    bool positive_definite = false;
    double margin = 0.0;  // min(lambda_min(X), lambda_min(Z - Y^T X^-1 Y)) - delta
    double block_min = 0.0;
    double complement_min = 0.0;
};
/// PD test via X > delta I and Z - Y^T X^-1 Y > delta I. A margin within
/// delta of zero counts as not positive definite.
SchurResult schur_pd_check(const Mat& upsilon_sym, double delta);
/// 1e-9 * |trace| / dimension
double default_schur_slack(const Mat& upsilon_sym);

struct ConvexityBounds {
    double beta_min = 0.0;
    double beta_max = 0.0;
};
/// beta_min = min(1, min lambda_min(hess U)), beta_max = max(1, max lambda_max(hess U))
/// over configuration samples; the 1 is the identity kinetic block. Throws
/// InfeasibleError("potential not strongly convex at q = ...") on a non-convex sample.
ConvexityBounds convexity_bounds(const CanonicalPHSystem& sys, const Region& region);

AssumptionReport validate_assumptions(const CanonicalPHSystem& sys, const Region& region);

struct EpsilonSearch {
    double epsilon_star = 0.0;
    double k1_limit = 0.0;  // beta_min / (||Phi||_max beta_max^2)
    ConvexityBounds bounds;
    double norm_a_max = 0.0;
    double norm_phi_max = 0.0;
    std::size_t samples = 0;
    int iterations = 0;
};

/// Largest eps (1e-4 relative) such that Upsilon_sym passes schur_pd_check at
/// every region sample and k1 > 0. Throws InfeasibleError naming the worst
/// sample if nothing down to 1e-12 works.
EpsilonSearch max_feasible_epsilon(const CanonicalPHSystem& sys, const Region& region,
                                   PhiChoice choice);

/// Sampled exponential-stability certificate. All extrema are taken over the
/// region samples; nothing is interval-verified.
struct Certificate {
    PhiChoice phi_choice = PhiChoice::kATranspose;
    double epsilon = 0.0;
    double epsilon_star = 0.0;
    double beta_min = 0.0;
    double beta_max = 0.0;
    double norm_a_max = 0.0;
    double norm_phi_max = 0.0;
    double mu = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double rate_paper = 0.0;  // beta_max mu / (1 + eps ||A|| beta_max)
    double rate_sound = 0.0;  // mu beta_min^2 / (2 k2)
    Region region;
    std::size_t samples = 0;
    double margin = 0.0;
    bool global_flag = false;
    /// Sample with the smallest Schur margin at epsilon (not serialized).
    State worst_sample;
};

/// eps = eps_star / 2, then mu, k1, k2 and both rates on the same samples.
/// global_flag is recorded as given (radial unboundedness is the caller's claim).
Certificate make_certificate(const CanonicalPHSystem& sys, const Region& region,
                             PhiChoice choice, bool global_flag = false);

enum class RateKind { kPaper, kSound };
double certificate_rate(const Certificate& cert, RateKind kind);
/// sqrt(k2/k1) ||x0|| exp(-rate t)
double envelope(const Certificate& cert, double x0_norm, double t,
                RateKind kind = RateKind::kSound);

/// Flat `key = value` text, 17 significant digits. Leading `#` lines are
/// comments.
std::string to_text(const Certificate& cert,
                    const std::vector<std::string>& comments = {});
Certificate parse_certificate(const std::string& text);

}  // namespace phes

#endif  // PHES_CERTIFY_HPP
