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

#include "phes/phes.h"

#include "phes/certify.hpp"
#include "phes/config.hpp"
#include "phes/models.hpp"
#include "phes/pera.hpp"
#include "phes/plvcc.hpp"
#include "phes/sim.hpp"
#include "phes/tune.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>

using namespace phes;

struct phes_problem {
    RunConfig config;
    std::string comments;
};

struct phes_certificate {
    Certificate cert;
    std::string text;
};

struct phes_trajectory {
    Trajectory traj;
    std::vector<State> original;
    Vec q_star;
};

struct phes_tuning_report {
    TuningReport report;
    std::string best;
    bool has_best = false;
    std::string csv;
};

namespace {

thread_local std::string g_last_error;

phes_status fail(phes_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename F>
phes_status guard(F&& f) {
    try {
        g_last_error.clear();
        f();
        return PHES_OK;
    } catch (const ParseError& e) {
        return fail(PHES_ERR_PARSE, e.what());
    } catch (const InfeasibleError& e) {
        return fail(PHES_ERR_INFEASIBLE, e.what());
    } catch (const NumericError& e) {
        return fail(PHES_ERR_NUMERIC, e.what());
    } catch (const IoError& e) {
        return fail(PHES_ERR_IO, e.what());
    } catch (const Error& e) {
        return fail(PHES_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PHES_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PHES_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PHES_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (!p) throw Error(std::string("null argument: ") + what);
}

std::string join_comments(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + '\n';
    return s;
}

void write_file(const char* path, const std::string& text) {
    require(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(std::string("cannot write '") + path + "'");
    f << text;
    if (!f) throw IoError(std::string("write failed for '") + path + "'");
}

Vec to_vec(const double* values, size_t count) {
    require(values, "values");
    if (count == 0) throw Error("empty vector");
    return Vec::Map(values, static_cast<Index>(count));
}

GainGrid default_grid(const Problem& pr) {
    const Index m = pr.sys.actuated();
    GainGrid g;
    for (double kp : {0.5, 1.0, 2.0}) g.kp.push_back(Vec::Constant(m, kp));
    for (double ki : {2.0, 8.0}) g.ki.push_back(Vec::Constant(m, ki));
    g.kd.push_back(Vec::Zero(m));
    g.q_star = pr.gains.q_star;
    return g;
}

phes_tuning_report* wrap_report(TuningReport rep) {
    auto* out = new phes_tuning_report{std::move(rep), {}, false, {}};
    std::ostringstream os;
    write_tuning_csv(out->report, os);
    out->csv = os.str();
    return out;
}

}  // namespace

extern "C" {

const char* phes_last_error(void) { return g_last_error.c_str(); }

const char* phes_version(void) { return "0.1.0"; }

const char* phes_status_name(phes_status status) {
    switch (status) {
        case PHES_OK: return "ok";
        case PHES_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PHES_ERR_PARSE: return "parse error";
        case PHES_ERR_INFEASIBLE: return "infeasible";
        case PHES_ERR_NUMERIC: return "numeric error";
        case PHES_ERR_IO: return "i/o error";
        case PHES_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

phes_status phes_problem_create_builtin(const char* model, phes_problem** out) {
    return guard([&] {
        require(model, "model");
        require(out, "out");
        RunConfig cfg;
        cfg.model = model;
        if (cfg.model != "pera") {
            bool known = false;
            for (const auto& n : builtin_model_names()) known = known || n == cfg.model;
            if (!known) make_builtin(cfg.model);  // throws with the list of names
        }
        *out = new phes_problem{std::move(cfg), {}};
    });
}

phes_status phes_problem_create_from_config(const char* path, phes_problem** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new phes_problem{load_config(path), {}};
    });
}

phes_status phes_problem_create_from_config_text(const char* text, phes_problem** out) {
    return guard([&] {
        require(text, "text");
        require(out, "out");
        *out = new phes_problem{parse_config(text), {}};
    });
}

void phes_problem_destroy(phes_problem* problem) { delete problem; }

phes_status phes_problem_set_scenario(phes_problem* problem, const char* name) {
    return guard([&] {
        require(problem, "problem");
        require(name, "name");
        pera_scenario(name);  // validates the name
        problem->config.scenario = name;
    });
}

phes_status phes_problem_set_vector(phes_problem* problem, const char* which,
                                    const double* values, size_t count) {
    return guard([&] {
        require(problem, "problem");
        require(which, "which");
        const std::string w = which;
        const Vec v = to_vec(values, count);
        RunConfig& c = problem->config;
        if (w == "kp") {
            c.kp = v;
        } else if (w == "ki") {
            c.ki = v;
        } else if (w == "kd") {
            c.kd = v;
        } else if (w == "q_star") {
            c.q_star = v;
        } else if (w == "q0") {
            c.q0 = v;
        } else if (w == "p0") {
            c.p0 = v;
        } else {
            throw Error("unknown vector '" + w + "' (expected kp|ki|kd|q_star|q0|p0)");
        }
    });
}

phes_status phes_problem_set_region(phes_problem* problem, double q_radius, double p_radius) {
    return guard([&] {
        require(problem, "problem");
        if (!(q_radius > 0.0) || !(p_radius > 0.0)) throw Error("region radii must be positive");
        problem->config.q_radius = q_radius;
        problem->config.p_radius = p_radius;
    });
}

phes_status phes_problem_set_seed(phes_problem* problem, uint64_t seed) {
    return guard([&] {
        require(problem, "problem");
        problem->config.seed = seed;
    });
}

phes_status phes_problem_set_extra_samples(phes_problem* problem, int count) {
    return guard([&] {
        require(problem, "problem");
        if (count < 0) throw Error("extra_samples must be non-negative");
        problem->config.extra_samples = count;
    });
}

phes_status phes_problem_set_phi(phes_problem* problem, const char* phi) {
    return guard([&] {
        require(problem, "problem");
        require(phi, "phi");
        problem->config.phi = phi_choice_from_string(phi);
    });
}

phes_status phes_problem_set_integrator(phes_problem* problem, double step, double horizon,
                                        size_t record_every) {
    return guard([&] {
        require(problem, "problem");
        if (!(horizon > 0.0)) throw Error("horizon must be positive");
        if (!(step > 0.0)) throw Error("step must be positive");
        if (record_every < 1) throw Error("record_every must be >= 1");
        problem->config.step = step;
        problem->config.horizon = horizon;
        problem->config.record_every = record_every;
    });
}

phes_status phes_problem_set_global(phes_problem* problem, int global_flag) {
    return guard([&] {
        require(problem, "problem");
        problem->config.global = global_flag != 0;
    });
}

phes_status phes_problem_set_canonical(phes_problem* problem, int canonical) {
    return guard([&] {
        require(problem, "problem");
        problem->config.canonical = canonical != 0;
    });
}

phes_status phes_problem_dof(const phes_problem* problem, size_t* dof) {
    return guard([&] {
        require(problem, "problem");
        require(dof, "dof");
        *dof = static_cast<size_t>(resolve(problem->config).sys.dof());
    });
}

phes_status phes_problem_model(const phes_problem* problem, const char** name) {
    return guard([&] {
        require(problem, "problem");
        require(name, "name");
        *name = problem->config.model.c_str();
    });
}

phes_status phes_problem_output_dir(const phes_problem* problem, const char** dir) {
    return guard([&] {
        require(problem, "problem");
        require(dir, "dir");
        *dir = problem->config.out_dir.c_str();
    });
}

phes_status phes_problem_canonical(const phes_problem* problem, int* canonical) {
    return guard([&] {
        require(problem, "problem");
        require(canonical, "canonical");
        *canonical = problem->config.canonical ? 1 : 0;
    });
}

phes_status phes_problem_comments(phes_problem* problem, const char** text) {
    return guard([&] {
        require(problem, "problem");
        require(text, "text");
        problem->comments = join_comments(resolve(problem->config).comments);
        *text = problem->comments.c_str();
    });
}

phes_status phes_certify(phes_problem* problem, phes_certificate** out) {
    return guard([&] {
        require(problem, "problem");
        require(out, "out");
        const Problem pr = resolve(problem->config);
        const ClosedLoopSystem cl = build_closed_loop(pr.sys, pr.gains);
        const CanonicalPHSystem cs = to_canonical(cl);
        Certificate cert = make_certificate(cs, pr.region, pr.phi, pr.global);
        std::string text = to_text(cert, pr.comments);
        *out = new phes_certificate{std::move(cert), std::move(text)};
    });
}

void phes_certificate_destroy(phes_certificate* cert) { delete cert; }

phes_status phes_certificate_get(const phes_certificate* cert, const char* key, double* value) {
    return guard([&] {
        require(cert, "cert");
        require(key, "key");
        require(value, "value");
        const Certificate& c = cert->cert;
        const std::map<std::string, double> fields = {
            {"epsilon", c.epsilon},       {"epsilon_star", c.epsilon_star},
            {"beta_min", c.beta_min},     {"beta_max", c.beta_max},
            {"norm_A_max", c.norm_a_max}, {"mu", c.mu},
            {"k1", c.k1},                 {"k2", c.k2},
            {"rate_paper", c.rate_paper}, {"rate_sound", c.rate_sound},
            {"margin", c.margin},         {"samples", static_cast<double>(c.samples)},
        };
        const auto it = fields.find(key);
        if (it == fields.end()) throw Error(std::string("unknown certificate key '") + key + "'");
        *value = it->second;
    });
}

phes_status phes_certificate_text(const phes_certificate* cert, const char** text) {
    return guard([&] {
        require(cert, "cert");
        require(text, "text");
        *text = cert->text.c_str();
    });
}

phes_status phes_certificate_write(const phes_certificate* cert, const char* path) {
    return guard([&] {
        require(cert, "cert");
        write_file(path, cert->text);
    });
}

phes_status phes_simulate(phes_problem* problem, int canonical, phes_trajectory** out) {
    return guard([&] {
        require(problem, "problem");
        require(out, "out");
        const Problem pr = resolve(problem->config);
        const ClosedLoopSystem cl = build_closed_loop(pr.sys, pr.gains);
        auto t = std::make_unique<phes_trajectory>();
        t->q_star = cl.q_star();
        if (canonical) {
            t->traj = simulate(cl, pr.initial, Representation::kCanonical, pr.sim);
            t->original = to_original(cl, t->traj);
        } else {
            t->traj = simulate(cl, pr.initial, Representation::kClosedLoop, pr.sim);
            t->original = t->traj.states;
        }
        *out = t.release();
    });
}

void phes_trajectory_destroy(phes_trajectory* traj) { delete traj; }

phes_status phes_trajectory_size(const phes_trajectory* traj, size_t* rows) {
    return guard([&] {
        require(traj, "traj");
        require(rows, "rows");
        *rows = traj->traj.size();
    });
}

phes_status phes_trajectory_write_csv(const phes_trajectory* traj, const char* path) {
    return guard([&] {
        require(traj, "traj");
        std::ostringstream os;
        write_csv(traj->traj, os);
        write_file(path, os.str());
    });
}

phes_status phes_trajectory_decay_rate(const phes_trajectory* traj, double* rate) {
    return guard([&] {
        require(traj, "traj");
        require(rate, "rate");
        *rate = empirical_decay_rate(traj->traj).rate;
    });
}

phes_status phes_trajectory_final_error(const phes_trajectory* traj, double* error) {
    return guard([&] {
        require(traj, "traj");
        require(error, "error");
        if (traj->original.empty()) throw Error("empty trajectory");
        *error = (traj->original.back().q - traj->q_star).norm();
    });
}

phes_status phes_trajectory_state(const phes_trajectory* traj, size_t row, double* q,
                                  double* p) {
    return guard([&] {
        require(traj, "traj");
        require(q, "q");
        require(p, "p");
        if (row >= traj->original.size()) throw Error("row out of range");
        const State& s = traj->original[row];
        Vec::Map(q, s.dof()) = s.q;
        Vec::Map(p, s.dof()) = s.p;
    });
}

phes_status phes_trajectory_energy_audit(const phes_trajectory* traj, int* passed,
                                         double* max_increase) {
    return guard([&] {
        require(traj, "traj");
        require(passed, "passed");
        const EnergyAudit a = energy_audit(traj->traj);
        *passed = a.passed ? 1 : 0;
        if (max_increase) *max_increase = a.max_increase;
    });
}

phes_status phes_tune_sets(phes_problem* problem, const char* const* names, size_t count,
                           phes_tuning_report** out) {
    return guard([&] {
        require(problem, "problem");
        require(names, "names");
        require(out, "out");
        if (count == 0) throw Error("no gain sets given");
        const Problem pr = resolve(problem->config);
        if (!pr.pera) throw Error("named gain sets are only defined for model pera");
        std::vector<GainSet> sets;
        for (size_t i = 0; i < count; ++i) {
            require(names[i], "name");
            sets.push_back(pera_scenario(names[i], *pr.pera).gains);
        }
        TuningOptions opts;
        opts.phi = pr.phi;
        *out = wrap_report(predict_ordering(pr.sys, sets, pr.region, opts));
    });
}

phes_status phes_tune_grid(phes_problem* problem, const char* grid, double target_rate,
                           phes_tuning_report** out) {
    return guard([&] {
        require(problem, "problem");
        require(grid, "grid");
        require(out, "out");
        if (std::string(grid) != "default") {
            throw Error(std::string("unknown grid '") + grid + "' (available: default)");
        }
        const Problem pr = resolve(problem->config);
        TuningOptions opts;
        opts.phi = pr.phi;
        const GainGrid g = default_grid(pr);
        GridResult res = grid_search(pr.sys, g, pr.region, target_rate, opts);
        phes_tuning_report* r = wrap_report(std::move(res.report));
        r->best = res.best.label;
        r->has_best = true;
        *out = r;
    });
}

void phes_tuning_report_destroy(phes_tuning_report* report) { delete report; }

phes_status phes_tuning_report_size(const phes_tuning_report* report, size_t* count) {
    return guard([&] {
        require(report, "report");
        require(count, "count");
        *count = report->report.ordering.size();
    });
}

phes_status phes_tuning_report_label(const phes_tuning_report* report, size_t index,
                                     const char** label) {
    return guard([&] {
        require(report, "report");
        require(label, "label");
        if (index >= report->report.ordering.size()) throw Error("index out of range");
        *label = report->report.ordering[index].c_str();
    });
}

phes_status phes_tuning_report_best(const phes_tuning_report* report, const char** label) {
    return guard([&] {
        require(report, "report");
        require(label, "label");
        if (!report->has_best) throw Error("report has no grid winner");
        *label = report->best.c_str();
    });
}

phes_status phes_tuning_report_csv(const phes_tuning_report* report, const char** text) {
    return guard([&] {
        require(report, "report");
        require(text, "text");
        *text = report->csv.c_str();
    });
}

phes_status phes_tuning_report_write_csv(const phes_tuning_report* report, const char* path) {
    return guard([&] {
        require(report, "report");
        write_file(path, report->csv);
    });
}

}  // extern "C"
