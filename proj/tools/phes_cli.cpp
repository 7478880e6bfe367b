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

// Command-line front end. Exit codes: 0 success, 2 infeasible, 1 error.

#include "phes/phes.h"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

// Decay rates are fitted on a short run; afterwards the norm sits at the
// floating-point floor and the log-slope is meaningless.
constexpr double kFitHorizon = 1.5;

struct Failure {
    int code;
    std::string message;
};

void check(phes_status s) {
    if (s == PHES_OK) return;
    throw Failure{s == PHES_ERR_INFEASIBLE ? kExitInfeasible : kExitError,
                  std::string(phes_status_name(s)) + ": " + phes_last_error()};
}

template <typename T, void (*D)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { D(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Problem = Handle<phes_problem, phes_problem_destroy>;
using Cert = Handle<phes_certificate, phes_certificate_destroy>;
using Traj = Handle<phes_trajectory, phes_trajectory_destroy>;
using Report = Handle<phes_tuning_report, phes_tuning_report_destroy>;

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw Failure{kExitError, std::string("malformed number in ") + flag + ": '" + item + "'"};
        }
    }
    if (out.empty()) throw Failure{kExitError, std::string("empty list for ") + flag};
    return out;
}

struct Options {
    std::string config;
    std::string model = "pera";
    std::string gains;
    std::string kp, ki, kd;
    std::optional<double> qr, pr;
    std::optional<double> horizon, step;
    std::optional<std::size_t> record_every;
    std::string phi;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> extra_samples;
    bool global = false;
    bool canonical = false;
    std::string sets;
    std::string grid;
    double target = 0.0;
    std::string demo;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "Config file ([section] key = value)");
    sub->add_option("--model", o.model, "Builtin model: pera | msd1 | pendulum | linear");
    sub->add_option("--gains", o.gains, "PERA gain scenario: s1 | s2 | s3");
    sub->add_option("--kp", o.kp, "Diagonal K_P (comma list, one value broadcasts)");
    sub->add_option("--ki", o.ki, "Diagonal K_I");
    sub->add_option("--kd", o.kd, "Diagonal K_D");
    sub->add_option("--qr", o.qr, "Region radius in q");
    sub->add_option("--pr", o.pr, "Region radius in p");
    sub->add_option("--horizon", o.horizon, "Simulation horizon [s]");
    sub->add_option("--h", o.step, "RK4 step [s]");
    sub->add_option("--record-every", o.record_every, "Keep every k-th integration step");
    sub->add_option("--phi", o.phi, "Cross-term weighting: at | ainv");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed of the Halton refinement points");
    sub->add_option("--extra-samples", o.extra_samples, "Halton points added to the grid");
    sub->add_flag("--global", o.global, "Record the certificate as global");
}

void set_vec(phes_problem* p, const char* which, const std::string& text, const char* flag) {
    if (text.empty()) return;
    const auto v = parse_list(text, flag);
    check(phes_problem_set_vector(p, which, v.data(), v.size()));
}

// Builds the problem from --config (if any) and applies flag overrides.
void make_problem(const Options& o, Problem& prob) {
    if (!o.config.empty()) {
        check(phes_problem_create_from_config(o.config.c_str(), prob.out()));
    } else {
        check(phes_problem_create_builtin(o.model.c_str(), prob.out()));
    }
    phes_problem* p = prob.get();
    if (!o.gains.empty()) check(phes_problem_set_scenario(p, o.gains.c_str()));
    set_vec(p, "kp", o.kp, "--kp");
    set_vec(p, "ki", o.ki, "--ki");
    set_vec(p, "kd", o.kd, "--kd");
    if (o.qr || o.pr) {
        check(phes_problem_set_region(p, o.qr.value_or(0.3), o.pr.value_or(0.5)));
    }
    if (o.horizon || o.step || o.record_every) {
        check(phes_problem_set_integrator(p, o.step.value_or(1e-4), o.horizon.value_or(20.0),
                                          o.record_every.value_or(10)));
    }
    if (!o.phi.empty()) check(phes_problem_set_phi(p, o.phi.c_str()));
    if (o.seed) check(phes_problem_set_seed(p, *o.seed));
    if (o.extra_samples) check(phes_problem_set_extra_samples(p, *o.extra_samples));
    if (o.global) check(phes_problem_set_global(p, 1));
    if (o.canonical) check(phes_problem_set_canonical(p, 1));
}

fs::path output_dir(const Options& o, phes_problem* p) {
    std::string dir = o.out;
    if (dir.empty()) {
        const char* d = nullptr;
        check(phes_problem_output_dir(p, &d));
        dir = d;
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Failure{kExitError, "cannot create output directory '" + dir + "'"};
    return fs::path(dir);
}

void write_manifest(const fs::path& dir, phes_problem* p, const std::string& extra = {}) {
    const char* text = nullptr;
    check(phes_problem_comments(p, &text));
    std::ofstream f(dir / "manifest.txt", std::ios::binary);
    if (!f) throw Failure{kExitError, "cannot write " + (dir / "manifest.txt").string()};
    f << text << extra;
}

double cert_value(const Cert& c, const char* key) {
    double v = 0.0;
    check(phes_certificate_get(c.get(), key, &v));
    return v;
}

int run_certify(const Options& o) {
    Problem prob;
    make_problem(o, prob);
    const fs::path dir = output_dir(o, prob.get());
    Cert cert;
    check(phes_certify(prob.get(), cert.out()));
    const fs::path file = dir / "certificate.txt";
    check(phes_certificate_write(cert.get(), file.c_str()));
    std::printf("certified: rate_paper = %.17g, rate_sound = %.17g\n",
                cert_value(cert, "rate_paper"), cert_value(cert, "rate_sound"));
    std::printf("certificate written to %s\n", file.c_str());
    return kExitOk;
}

int run_simulate(const Options& o) {
    Problem prob;
    make_problem(o, prob);
    int canonical = 0;
    check(phes_problem_canonical(prob.get(), &canonical));
    const fs::path dir = output_dir(o, prob.get());
    Traj traj;
    check(phes_simulate(prob.get(), canonical, traj.out()));
    const fs::path file = dir / (canonical ? "trajectory_canonical.csv" : "trajectory.csv");
    check(phes_trajectory_write_csv(traj.get(), file.c_str()));
    write_manifest(dir, prob.get());
    double err = 0.0;
    check(phes_trajectory_final_error(traj.get(), &err));
    int passed = 0;
    double inc = 0.0;
    check(phes_trajectory_energy_audit(traj.get(), &passed, &inc));
    std::printf("final ||q - q_star|| = %.6g\n", err);
    std::printf("energy audit: %s (max increase %.3g)\n", passed ? "pass" : "FAIL", inc);
    std::printf("trajectory written to %s\n", file.c_str());
    return kExitOk;
}

void print_report(const Report& rep) {
    size_t n = 0;
    check(phes_tuning_report_size(rep.get(), &n));
    std::printf("ordering:");
    for (size_t i = 0; i < n; ++i) {
        const char* label = nullptr;
        check(phes_tuning_report_label(rep.get(), i, &label));
        std::printf("%s %s", i ? "," : "", label);
    }
    std::printf("\n");
}

int run_tune(const Options& o) {
    Problem prob;
    make_problem(o, prob);
    const fs::path dir = output_dir(o, prob.get());
    Report rep;
    if (!o.grid.empty()) {
        check(phes_tune_grid(prob.get(), o.grid.c_str(), o.target, rep.out()));
        const char* best = nullptr;
        check(phes_tuning_report_best(rep.get(), &best));
        std::printf("best: %s\n", best);
    } else {
        std::vector<std::string> names;
        std::stringstream ss(o.sets.empty() ? std::string("s1,s2,s3") : o.sets);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
        std::vector<const char*> ptrs;
        for (const auto& s : names) ptrs.push_back(s.c_str());
        check(phes_tune_sets(prob.get(), ptrs.data(), ptrs.size(), rep.out()));
    }
    const fs::path file = dir / "tuning.csv";
    check(phes_tuning_report_write_csv(rep.get(), file.c_str()));
    write_manifest(dir, prob.get());
    print_report(rep);
    std::printf("report written to %s\n", file.c_str());

    // Nothing certified: well-formed but infeasible.
    const char* csv = nullptr;
    check(phes_tuning_report_csv(rep.get(), &csv));
    if (std::string(csv).find(",true\n") == std::string::npos) {
        std::fprintf(stderr, "no gain set certifies on the region\n");
        return kExitInfeasible;
    }
    return kExitOk;
}

const std::map<std::string, std::pair<std::string, std::string>>& demos() {
    static const std::map<std::string, std::pair<std::string, std::string>> d = {
        {"pera-fig2a", {"s1", "s2"}},
        {"pera-fig2b", {"s1", "s3"}},
    };
    return d;
}

int run_demo(const Options& o) {
    const auto it = demos().find(o.demo);
    if (it == demos().end()) {
        std::string list;
        for (const auto& [name, _] : demos()) list += (list.empty() ? "" : ", ") + name;
        throw Failure{kExitError, "unknown demo '" + o.demo + "' (available: " + list + ")"};
    }
    const fs::path dir = fs::path(o.out.empty() ? "." : o.out) / o.demo;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Failure{kExitError, "cannot create output directory '" + dir.string() + "'"};

    std::ostringstream rates;
    rates << "label,empirical_rate,beta_max,rate_paper,rate_sound\n";
    std::map<std::string, double> empirical;
    std::string manifest;
    for (const std::string& name : {it->second.first, it->second.second}) {
        Options so = o;
        so.model = "pera";
        so.gains = name;
        Problem prob;
        make_problem(so, prob);
        const char* comments = nullptr;
        check(phes_problem_comments(prob.get(), &comments));
        manifest += comments;

        Cert cert;
        check(phes_certify(prob.get(), cert.out()));
        check(phes_certificate_write(cert.get(), (dir / (name + "_certificate.txt")).c_str()));

        check(phes_problem_set_integrator(prob.get(), o.step.value_or(1e-4),
                                          o.horizon.value_or(20.0), 100));
        Traj full;
        check(phes_simulate(prob.get(), 0, full.out()));
        check(phes_trajectory_write_csv(full.get(), (dir / (name + ".csv")).c_str()));

        check(phes_problem_set_integrator(prob.get(), o.step.value_or(1e-4), kFitHorizon, 10));
        Traj fit;
        check(phes_simulate(prob.get(), 0, fit.out()));
        double rate = 0.0;
        check(phes_trajectory_decay_rate(fit.get(), &rate));
        empirical[name] = rate;

        char line[256];
        std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g\n", name.c_str(), rate,
                      cert_value(cert, "beta_max"), cert_value(cert, "rate_paper"),
                      cert_value(cert, "rate_sound"));
        rates << line;
        std::printf("%s: empirical decay rate %.6g, rate_paper %.6g, rate_sound %.6g\n",
                    name.c_str(), rate, cert_value(cert, "rate_paper"),
                    cert_value(cert, "rate_sound"));
    }
    std::ofstream(dir / "rates.csv", std::ios::binary) << rates.str();
    std::ofstream(dir / "manifest.txt", std::ios::binary)
        << manifest << "decay fit horizon " << kFitHorizon << " s\n";

    const std::string& a = it->second.first;
    const std::string& b = it->second.second;
    std::printf("%s faster than %s: %s\n", a.c_str(), b.c_str(),
                empirical[a] > empirical[b] ? "yes" : "no");
    std::printf("bundle written to %s\n", dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Port-Hamiltonian PID passivity-based control: certify, simulate, tune"};
    app.require_subcommand(1);
    // --h is the step size, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");
    Options o;

    auto* certify = app.add_subcommand("certify", "Certify exponential stability on a region");
    add_common(certify, o);

    auto* simulate = app.add_subcommand("simulate", "Simulate the closed loop to CSV");
    add_common(simulate, o);
    simulate->add_flag("--canonical", o.canonical, "Integrate in canonical coordinates");

    auto* tune = app.add_subcommand("tune", "Rank gain sets or search a gain grid");
    add_common(tune, o);
    tune->add_option("--sets", o.sets, "Comma-separated PERA scenarios (default s1,s2,s3)");
    tune->add_option("--grid", o.grid, "Gain grid to search: default");
    tune->add_option("--target", o.target, "Stop at the first candidate reaching this rate");

    auto* demo = app.add_subcommand("demo", "Reproduce a comparison bundle");
    demo->add_option("name", o.demo, "pera-fig2a | pera-fig2b")->required();
    demo->add_option("--out", o.out, "Output directory");
    demo->add_option("--h", o.step, "RK4 step [s]");
    demo->add_option("--horizon", o.horizon, "Horizon of the CSV runs [s]");
    demo->add_option("--seed", o.seed, "Seed of the Halton refinement points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitError;
    }

    try {
        if (*certify) return run_certify(o);
        if (*simulate) return run_simulate(o);
        if (*tune) return run_tune(o);
        if (*demo) return run_demo(o);
    } catch (const Failure& f) {
        std::fprintf(stderr, "error: %s\n", f.message.c_str());
        return f.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
