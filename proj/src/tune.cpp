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

#include "phes/tune.hpp"

#include "phes/plvcc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace phes {
namespace {

std::string diag_text(const Vec& v) {
    std::ostringstream os;
    for (Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << format_shortest(v(i));
    return os.str();
}

double max_td_inv_norm(const ClosedLoopSystem& cl, const Region& region) {
    double out = 0.0;
    for (const Vec& q : region.configuration_samples()) {
        // ||T^-T||^2 = lambda_max(M_d)
        const Vec qm = q - region.center + cl.q_star();
        out = std::max(out, std::sqrt(max_eigenvalue(sym_part(cl.inertia_d(qm)))));
    }
    return out;
}

}  // namespace

double beta_max_of_gains(const GainSet& gains) {
    if (gains.ki.size() == 0) return 1.0;
    return std::max(1.0, max_eigenvalue(sym_part(gains.ki)));
}

const TuningEntry& TuningReport::entry(const std::string& label) const {
    for (const auto& e : entries) {
        if (e.label == label) return e;
    }
    throw Error("no gain set labelled '" + label + "' in report");
}

TuningEntry evaluate_gains(const MechanicalSystem& sys, const GainSet& gains,
                           const Region& region, const TuningOptions& opts) {
    TuningEntry e;
    e.label = gains.label;
    e.gains = gains;
    e.beta_max = beta_max_of_gains(gains);
    try {
        const ClosedLoopSystem cl = build_closed_loop(sys, gains, opts.variant);
        e.norm_td_inv_max = max_td_inv_norm(cl, region);
        const CanonicalPHSystem cs = to_canonical(cl);
        Certificate cert = make_certificate(cs, region, opts.phi);
        e.certified = true;
        e.sampled_beta_max = cert.beta_max;
        e.norm_a_max = cert.norm_a_max;
        e.mu = cert.mu;
        e.epsilon = cert.epsilon;
        e.rate_paper = cert.rate_paper;
        e.rate_sound = cert.rate_sound;
        e.blocks = schur_blocks(upsilon_parts(cs, cert.worst_sample, opts.phi).at(cert.epsilon));
        e.certificate = std::move(cert);
    } catch (const InfeasibleError& ex) {
        e.reason = ex.what();
    } catch (const NumericError& ex) {
        e.reason = ex.what();
    }
    return e;
}

TuningReport predict_ordering(const MechanicalSystem& sys,
                              const std::vector<GainSet>& gain_sets, const Region& region,
                              const TuningOptions& opts) {
    TuningReport rep;
    for (const GainSet& g : gain_sets) rep.entries.push_back(evaluate_gains(sys, g, region, opts));

    std::vector<std::size_t> ranked;
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        if (rep.entries[i].certified) ranked.push_back(i);
    }
    const double tol = opts.tie_tolerance;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        const double ra = rep.entries[a].rate_paper;
        const double rb = rep.entries[b].rate_paper;
        if (std::abs(ra - rb) > tol * std::max(std::abs(ra), std::abs(rb))) return ra > rb;
        return rep.entries[a].label < rep.entries[b].label;
    });
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        if (!rep.entries[i].certified) ranked.push_back(i);
    }
    rep.ranking = ranked;
    for (std::size_t i : ranked) rep.ordering.push_back(rep.entries[i].label);
    return rep;
}

std::vector<GainSet> GainGrid::candidates() const {
    if (kp.empty() || ki.empty() || kd.empty()) throw Error("gain grid has an empty axis");
    std::vector<GainSet> out;
    for (const Vec& p : kp) {
        for (const Vec& i : ki) {
            for (const Vec& d : kd) {
                const std::string label =
                    "kp=" + diag_text(p) + ";ki=" + diag_text(i) + ";kd=" + diag_text(d);
                out.push_back(GainSet::diagonal(label, p, i, d, q_star));
            }
        }
    }
    return out;
}

GridResult grid_search(const MechanicalSystem& sys, const GainGrid& grid, const Region& region,
                       double target_rate, const TuningOptions& opts) {
    GridResult res;
    res.report = predict_ordering(sys, grid.candidates(), region, opts);
    const TuningEntry* best = nullptr;
    for (const auto& e : res.report.entries) {
        if (!e.certified) continue;
        if (target_rate > 0.0 && e.rate_paper >= target_rate) {
            best = &e;
            res.reached_target = true;
            break;
        }
        if (!best || e.rate_paper > best->rate_paper) best = &e;
    }
    if (!best) throw InfeasibleError("no certifiable gains on grid");
    res.best = best->gains;
    return res;
}

void write_tuning_csv(const TuningReport& report, std::ostream& out) {
    out << "label,beta_max,normA,mu,epsilon,rate_paper,rate_sound,certified\n";
    for (std::size_t i : report.ranking) {
        const TuningEntry& e = report.entries.at(i);
        out << e.label << ',' << format_g17(e.beta_max) << ',' << format_g17(e.norm_a_max) << ','
            << format_g17(e.mu) << ',' << format_g17(e.epsilon) << ','
            << format_g17(e.rate_paper) << ',' << format_g17(e.rate_sound) << ','
            << (e.certified ? "true" : "false") << '\n';
    }
}

}  // namespace phes
