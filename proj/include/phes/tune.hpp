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

#ifndef PHES_TUNE_HPP
#define PHES_TUNE_HPP

#include "phes/certify.hpp"
#include "phes/pidpbc.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phes {

/// max{1, lambda_max(G K_I G^T)}
double beta_max_of_gains(const GainSet& gains);

struct TuningEntry {
    std::string label;
    GainSet gains;
    bool certified = false;
    std::string reason;  // why certification failed; empty otherwise

    double beta_max = 0.0;         // beta_max_of_gains
    double sampled_beta_max = 0.0; // from the certificate's Hessian samples
    double norm_a_max = 0.0;
    double norm_td_inv_max = 0.0;  // max ||T_d^-T|| over configuration samples
    double mu = 0.0;
    double epsilon = 0.0;
    double rate_paper = 0.0;
    double rate_sound = 0.0;

    std::optional<Certificate> certificate;
    /// X, Y, Z of Upsilon_sym at the certificate's worst sample.
    std::optional<SchurBlocks> blocks;
};

struct TuningReport {
    std::vector<TuningEntry> entries;  // input order
    /// Certified labels by rate_paper (descending, ties by label, then input
    /// order), followed by the uncertified ones in input order.
    std::vector<std::string> ordering;
    std::vector<std::size_t> ranking;  // entry indices matching ordering

    const TuningEntry& entry(const std::string& label) const;
};

struct TuningOptions {
    PhiChoice phi = PhiChoice::kATranspose;
    ControlVariant variant = ControlVariant::kStandard;
    /// Relative difference below which two rates count as a tie.
    double tie_tolerance = 1e-9;
};

/// Certifies one gain set; never throws for infeasibility, which is
/// recorded in the entry instead.
TuningEntry evaluate_gains(const MechanicalSystem& sys, const GainSet& gains,
                           const Region& region, const TuningOptions& opts = {});

/// region is in canonical coordinates (centered at zero).
TuningReport predict_ordering(const MechanicalSystem& sys,
                              const std::vector<GainSet>& gain_sets, const Region& region,
                              const TuningOptions& opts = {});

/// Diagonal gain grid; every combination kp x ki x kd is a candidate, with
/// kp varying slowest.
struct GainGrid {
    std::vector<Vec> kp;
    std::vector<Vec> ki;
    std::vector<Vec> kd;
    Vec q_star;

    std::vector<GainSet> candidates() const;
};

struct GridResult {
    GainSet best;
    bool reached_target = false;
    TuningReport report;
};

/// First candidate (grid order) with rate_paper >= target_rate when
/// target_rate > 0, otherwise the rate_paper argmax (first wins ties).
/// Throws InfeasibleError("no certifiable gains on grid").
GridResult grid_search(const MechanicalSystem& sys, const GainGrid& grid,
                       const Region& region, double target_rate = 0.0,
                       const TuningOptions& opts = {});

/// Header label,beta_max,normA,mu,epsilon,rate_paper,rate_sound,certified,
/// rows in ranking order.
void write_tuning_csv(const TuningReport& report, std::ostream& out);

}  // namespace phes

#endif  // PHES_TUNE_HPP
