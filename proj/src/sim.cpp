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

#include "phes/sim.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace phes {
namespace {

void check_stage(const Vec& k, double t) {
    if (!k.allFinite()) throw NumericError("integration blow-up at t = " + format_g17(t));
}

}  // namespace

Vec rk4_step(const StateField& f, const Vec& x, double h, double t) {
    if (!(h > 0.0)) throw Error("step must be positive");
    const Vec k1 = f(x);
    check_stage(k1, t);
    const Vec k2 = f(x + 0.5 * h * k1);
    check_stage(k2, t);
    const Vec k3 = f(x + 0.5 * h * k2);
    check_stage(k3, t);
    const Vec k4 = f(x + h * k3);
    check_stage(k4, t);
    Vec next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_stage(next, t + h);
    return next;
}

Trajectory integrate(const StateField& f, const State& s0, const SimOptions& opts,
                     const Observers& obs) {
    if (!(opts.horizon > 0.0)) throw Error("horizon must be positive");
    if (!(opts.step > 0.0)) throw Error("step must be positive");
    if (opts.record_every < 1) throw Error("record_every must be >= 1");
    const auto steps = static_cast<std::size_t>(std::llround(opts.horizon / opts.step));
    if (steps < 1) throw Error("horizon shorter than one step");

    Trajectory traj;
    const std::size_t rows = steps / opts.record_every + 1;
    traj.times.reserve(rows);
    traj.states.reserve(rows);
    auto record = [&](double t, const State& s) {
        traj.times.push_back(t);
        traj.states.push_back(s);
        if (obs.energy) traj.energies.push_back(obs.energy(s));
        if (obs.norm) traj.norms.push_back(obs.norm(s));
        if (obs.lyapunov) traj.lyapunov.push_back(obs.lyapunov(s));
        if (obs.control) traj.controls.push_back(obs.control(s));
    };

    Vec x = s0.stacked();
    record(0.0, s0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k - 1) * opts.step;
        x = rk4_step(f, x, opts.step, t);
        if (k % opts.record_every == 0) {
            record(static_cast<double>(k) * opts.step, State::from_stacked(x));
        }
    }
    return traj;
}

Trajectory simulate(const ClosedLoopSystem& cl, const State& s0, Representation rep,
                    const SimOptions& opts) {
    require_same_size(s0.dof(), cl.dof(), "initial state vs system dimension");
    const CanonicalPHSystem cs = to_canonical(cl);
    const Certificate* cert = opts.certificate;
    Observers obs;
    StateField f;
    State start = s0;
    Trajectory traj;

    if (rep == Representation::kCanonical) {
        start = map_state(cl, s0);
        f = [cs](const Vec& x) { return cs.vector_field(State::from_stacked(x)); };
        const double offset = cs.energy_offset();
        obs.energy = [cs, offset](const State& s) { return cs.hamiltonian(s) + offset; };
        obs.norm = [](const State& s) { return s.stacked().norm(); };
        if (cert) {
            obs.lyapunov = [cs, cert](const State& s) {
                return lyapunov_value(cs, s, cert->epsilon, cert->phi_choice);
            };
        }
    } else {
        if (rep == Representation::kClosedLoop) {
            f = [cl](const Vec& x) { return cl.vector_field(State::from_stacked(x)); };
        } else {
            f = [cl](const Vec& x) {
                const State s = State::from_stacked(x);
                const Vec u = control_signal(cl.base(), cl.gains(), s, std::nullopt,
                                             cl.variant());
                const auto [dq, dp] = eval_open_loop(cl.base(), s, u);
                Vec out(x.size());
                out << dq, dp;
                return out;
            };
        }
        obs.control = [cl](const State& s) {
            return control_signal(cl.base(), cl.gains(), s, std::nullopt, cl.variant());
        };
        obs.energy = [cl](const State& s) { return cl.hamiltonian(s); };
        obs.norm = [cl](const State& s) { return map_state(cl, s).stacked().norm(); };
        if (cert) {
            obs.lyapunov = [cl, cs, cert](const State& s) {
                return lyapunov_value(cs, map_state(cl, s), cert->epsilon, cert->phi_choice);
            };
        }
    }
    traj = integrate(f, start, opts, obs);
    traj.coordinates =
        rep == Representation::kCanonical ? Coordinates::kCanonical : Coordinates::kOriginal;
    traj.canonical_initial = map_state(cl, s0);
    return traj;
}

Trajectory simulate(const CanonicalPHSystem& sys, const State& s0, const SimOptions& opts) {
    require_same_size(s0.dof(), sys.dof(), "initial state vs system dimension");
    Observers obs;
    const double offset = sys.energy_offset();
    obs.energy = [sys, offset](const State& s) { return sys.hamiltonian(s) + offset; };
    obs.norm = [](const State& s) { return s.stacked().norm(); };
    if (const Certificate* cert = opts.certificate) {
        obs.lyapunov = [sys, cert](const State& s) {
            return lyapunov_value(sys, s, cert->epsilon, cert->phi_choice);
        };
    }
    Trajectory traj = integrate(
        [sys](const Vec& x) { return sys.vector_field(State::from_stacked(x)); }, s0, opts, obs);
    traj.coordinates = Coordinates::kCanonical;
    traj.canonical_initial = s0;
    return traj;
}

std::vector<State> to_original(const ClosedLoopSystem& cl, const Trajectory& canonical) {
    if (canonical.coordinates != Coordinates::kCanonical) {
        throw Error("trajectory is not in canonical coordinates");
    }
    std::vector<State> out;
    out.reserve(canonical.size());
    for (const State& s : canonical.states) out.push_back(inverse_map_state(cl, s));
    return out;
}

EnergyAudit energy_audit(const Trajectory& traj) {
    EnergyAudit a;
    if (traj.energies.empty()) throw Error("trajectory has no energy record");
    a.tolerance = 1e-8 * (1.0 + std::abs(traj.energies.front()));
    a.max_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < traj.energies.size(); ++k) {
        const double inc = traj.energies[k] - traj.energies[k - 1];
        if (inc > a.max_increase) {
            a.max_increase = inc;
            a.worst_index = k;
            a.worst_time = traj.times[k];
        }
    }
    if (traj.energies.size() < 2) a.max_increase = 0.0;
    a.passed = a.max_increase <= a.tolerance;
    return a;
}

DecayFit empirical_decay_rate(const std::vector<double>& times,
                              const std::vector<double>& norms) {
    if (times.size() != norms.size() || times.size() < 3) {
        throw Error("decay fit needs at least three samples");
    }
    if (!(norms.back() < norms.front())) {
        throw Error("trajectory not converging (final norm >= initial norm)");
    }
    const double t_end = times.back();
    const double lo = 0.2 * t_end;
    const double hi = 0.9 * t_end;

    std::vector<std::size_t> window;
    std::vector<std::size_t> peaks;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < lo || times[k] > hi || !(norms[k] > 0.0)) continue;
        window.push_back(k);
        if (k > 0 && k + 1 < times.size() && norms[k] > norms[k - 1] &&
            norms[k] >= norms[k + 1]) {
            peaks.push_back(k);
        }
    }
    DecayFit fit;
    fit.used_peaks = peaks.size() >= 3;
    const std::vector<std::size_t>& use = fit.used_peaks ? peaks : window;
    if (use.size() < 2) throw Error("decay fit window holds fewer than two samples");
    fit.points = use.size();

    double mt = 0.0;
    double my = 0.0;
    for (std::size_t k : use) {
        mt += times[k];
        my += std::log(norms[k]);
    }
    mt /= static_cast<double>(use.size());
    my /= static_cast<double>(use.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k : use) {
        const double dt = times[k] - mt;
        sxy += dt * (std::log(norms[k]) - my);
        sxx += dt * dt;
    }
    fit.rate = -sxy / sxx;
    return fit;
}

DecayFit empirical_decay_rate(const Trajectory& traj) {
    return empirical_decay_rate(traj.times, traj.norms);
}

bool verify_envelope(const Trajectory& traj, const Certificate& cert) {
    if (!traj.canonical_initial || traj.norms.empty()) {
        throw Error("envelope not applicable: trajectory has no canonical record");
    }
    if (!cert.region.contains(*traj.canonical_initial)) {
        throw Error("envelope not applicable: initial state outside certified region");
    }
    const double x0 = traj.norms.front();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.norms[k] > envelope(cert, x0, traj.times[k], RateKind::kSound) * (1.0 + 1e-6)) {
            return false;
        }
    }
    return true;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
    const Index n = traj.dof();
    out << "t";
    for (Index i = 1; i <= n; ++i) out << ",q" << i;
    for (Index i = 1; i <= n; ++i) out << ",p" << i;
    out << ",Hd,S,normx\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const State& s = traj.states[k];
        out << format_g17(traj.times[k]);
        for (Index i = 0; i < n; ++i) out << ',' << format_g17(s.q(i));
        for (Index i = 0; i < n; ++i) out << ',' << format_g17(s.p(i));
        out << ',' << format_g17(k < traj.energies.size() ? traj.energies[k] : nan);
        out << ',' << format_g17(k < traj.lyapunov.size() ? traj.lyapunov[k] : nan);
        out << ',' << format_g17(k < traj.norms.size() ? traj.norms[k] : nan);
        out << '\n';
    }
}

}  // namespace phes
