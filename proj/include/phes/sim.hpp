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

#ifndef PHES_SIM_HPP
#define PHES_SIM_HPP

#include "phes/certify.hpp"
#include "phes/pidpbc.hpp"
#include "phes/plvcc.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace phes {

using StateField = std::function<Vec(const Vec& x)>;

/// Classical four-stage Runge-Kutta step. Throws NumericError
/// "integration blow-up at t = ..." on a non-finite stage.
Vec rk4_step(const StateField& f, const Vec& x, double h, double t = 0.0);

enum class Coordinates { kOriginal, kCanonical };

struct Trajectory {
    Coordinates coordinates = Coordinates::kOriginal;
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> energies;   // H_d (canonical runs include the energy offset)
    std::vector<double> lyapunov;   // S, empty without a certificate
    std::vector<double> norms;      // ||col(q, p)|| in canonical coordinates
    std::vector<Vec> controls;      // original-coordinate runs only
    std::optional<State> canonical_initial;

    std::size_t size() const { return times.size(); }
    Index dof() const { return states.empty() ? 0 : states.front().dof(); }
};

/// What gets recorded alongside the state. Any member may be empty.
struct Observers {
    std::function<double(const State&)> energy;
    std::function<double(const State&)> norm;
    std::function<double(const State&)> lyapunov;
    std::function<Vec(const State&)> control;
};

struct SimOptions {
    double horizon = 20.0;
    double step = 1e-4;
    std::size_t record_every = 1;
    /// When set, S is recorded using its epsilon and Phi choice.
    const Certificate* certificate = nullptr;
};

Trajectory integrate(const StateField& f, const State& s0, const SimOptions& opts,
                     const Observers& obs);

enum class Representation {
    kOpenLoop,    // mechanical model driven by control_signal
    kClosedLoop,  // F_d grad H_d
    kCanonical,   // transformed system, states in canonical coordinates
};

/// s0 is always given in original coordinates.
Trajectory simulate(const ClosedLoopSystem& cl, const State& s0, Representation rep,
                    const SimOptions& opts = {});
/// Standalone canonical system; s0 in its own coordinates.
Trajectory simulate(const CanonicalPHSystem& sys, const State& s0, const SimOptions& opts = {});

/// Map every state of a canonical-coordinate trajectory back to original coordinates.
std::vector<State> to_original(const ClosedLoopSystem& cl, const Trajectory& canonical);

struct EnergyAudit {
    bool passed = false;
    double max_increase = 0.0;
    double tolerance = 0.0;  // 1e-8 (1 + |H_d(0)|)
    std::size_t worst_index = 0;
    double worst_time = 0.0;
};
EnergyAudit energy_audit(const Trajectory& traj);

struct DecayFit {
    double rate = 0.0;
    bool used_peaks = false;  // false: fell back to every sample in the window
    std::size_t points = 0;
};
/// Least-squares slope of log||x|| over [0.2 T, 0.9 T] using envelope peaks.
/// Throws Error when the trajectory does not decrease.
DecayFit empirical_decay_rate(const std::vector<double>& times,
                              const std::vector<double>& norms);
DecayFit empirical_decay_rate(const Trajectory& traj);

/// ||x(t_i)|| <= envelope(rate_sound, t_i) (1 + 1e-6) at every sample. Throws
/// Error("envelope not applicable") if x(0) is outside the certified region.
bool verify_envelope(const Trajectory& traj, const Certificate& cert);

/// Header t,q1..qn,p1..pn,Hd,S,normx; 17 significant digits; LF endings.
void write_csv(const Trajectory& traj, std::ostream& out);

}  // namespace phes

#endif  // PHES_SIM_HPP
