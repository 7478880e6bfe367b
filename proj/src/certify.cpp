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

#include "phes/certify.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace phes {
namespace {

std::string vec_text(const Vec& v) {
    std::string out;
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_g17(v(i));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + s + "'", line, 1);
    }
    if (trim(s.substr(used)).size() != 0) {
        throw ParseError("trailing characters after number '" + s + "'", line, 1);
    }
    return v;
}

Vec parse_vec(const std::string& s, int line) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(parse_double(trim(item), line));
    Vec v(static_cast<Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Index>(i)) = vals[i];
    return v;
}

struct Pass {
    bool feasible = false;
    std::size_t worst = 0;
    double worst_margin = 0.0;
};

}  // namespace

const char* to_string(PhiChoice choice) {
    return choice == PhiChoice::kATranspose ? "A_transpose" : "A_inverse";
}

PhiChoice phi_choice_from_string(const std::string& text) {
    if (text == "A_transpose" || text == "at") return PhiChoice::kATranspose;
    if (text == "A_inverse" || text == "ainv") return PhiChoice::kAInverse;
    throw Error("unknown phi choice '" + text + "' (expected at|ainv)");
}

Mat phi_matrix(const Mat& a, PhiChoice choice) {
    if (choice == PhiChoice::kATranspose) return a.transpose();
    return checked_inverse(a, "Phi = A^-1 undefined at q");
}

Mat phi_rate(const Mat& a, const Mat& a_dot, PhiChoice choice) {
    if (choice == PhiChoice::kATranspose) return a_dot.transpose();
    const Mat ainv = checked_inverse(a, "Phi = A^-1 undefined at q");
    return -ainv * a_dot * ainv;
}

Mat interconnection_rate(const CanonicalPoint& pt, const Vec& p) {
    const Vec qdot = pt.a * p;
    Mat a_dot = Mat::Zero(pt.a.rows(), pt.a.cols());
    for (std::size_t i = 0; i < pt.a_partials.size(); ++i) {
        a_dot += pt.a_partials[i] * qdot(static_cast<Index>(i));
    }
    return a_dot;
}

bool phi_condition_holds(const Mat& a, PhiChoice choice) {
    const Mat ap = a * phi_matrix(a, choice);
    return min_eigenvalue(sym_part(ap + ap.transpose())) > 0.0;
}

double lyapunov_value(const CanonicalPHSystem& sys, const State& s, double epsilon,
                      PhiChoice choice) {
    const double h = sys.hamiltonian(s);
    if (epsilon == 0.0) return h;
    const Mat a = sys.interconnection_field().value(s.q, s.p);
    return h + epsilon * s.p.dot(phi_matrix(a, choice) * sys.potential().gradient(s.q));
}

UpsilonParts upsilon_parts(const CanonicalPoint& pt, const Vec& p, PhiChoice choice) {
    const Index n = pt.a.rows();
    const Mat phi = phi_matrix(pt.a, choice);
    const Mat phi_dot = phi_rate(pt.a, interconnection_rate(pt, p), choice);
    Mat q0 = Mat::Zero(2 * n, 2 * n);
    q0.bottomRightCorner(n, n) = pt.d;
    Mat q1 = Mat::Zero(2 * n, 2 * n);
    q1.topLeftCorner(n, n) = pt.a * phi;
    q1.bottomLeftCorner(n, n) = (pt.j + pt.d) * phi - phi_dot;
    q1.bottomRightCorner(n, n) = -phi * pt.hess_u * pt.a;
    return {sym_part(q0), sym_part(q1)};
}

UpsilonParts upsilon_parts(const CanonicalPHSystem& sys, const State& s, PhiChoice choice) {
    return upsilon_parts(sys.point(s.q, s.p, true), s.p, choice);
}

Mat upsilon(const CanonicalPHSystem& sys, const State& s, double epsilon, PhiChoice choice) {
    const Index n = sys.dof();
    const CanonicalPoint pt = sys.point(s.q, s.p, true);
    const Mat phi = phi_matrix(pt.a, choice);
    const Mat phi_dot = phi_rate(pt.a, interconnection_rate(pt, s.p), choice);
    Mat u = Mat::Zero(2 * n, 2 * n);
    u.topLeftCorner(n, n) = epsilon * pt.a * phi;
    u.bottomLeftCorner(n, n) = epsilon * ((pt.j + pt.d) * phi - phi_dot);
    u.bottomRightCorner(n, n) = pt.d - epsilon * phi * pt.hess_u * pt.a;
    return u;
}

Mat upsilon_sym(const CanonicalPHSystem& sys, const State& s, double epsilon,
                PhiChoice choice) {
    return upsilon_parts(sys, s, choice).at(epsilon);
}

double lyapunov_rate(const CanonicalPHSystem& sys, const State& s, double epsilon,
                     PhiChoice choice) {
    Vec grad(2 * sys.dof());
    grad << sys.potential().gradient(s.q), s.p;
    return -grad.dot(upsilon_sym(sys, s, epsilon, choice) * grad);
}

SchurBlocks schur_blocks(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0) {
        throw ShapeError("shape error: Schur blocks need a square matrix of even size");
    }
    const Index n = m.rows() / 2;
    return {m.topLeftCorner(n, n), m.topRightCorner(n, n), m.bottomRightCorner(n, n)};
}

SchurResult schur_pd_check(const Mat& upsilon_sym, double delta) {
    const SchurBlocks b = schur_blocks(upsilon_sym);
    SchurResult r;
    r.block_min = min_eigenvalue(sym_part(b.x));
    if (!(r.block_min > delta)) {
        r.complement_min = -std::numeric_limits<double>::infinity();
        r.margin = r.block_min - delta;
        return r;
    }
    const Eigen::LLT<Mat> llt(sym_part(b.x));
    const Mat complement = b.z - b.y.transpose() * llt.solve(b.y);
    r.complement_min = min_eigenvalue(sym_part(complement));
    r.margin = std::min(r.block_min, r.complement_min) - delta;
    r.positive_definite = r.margin > 0.0;
    return r;
}

double default_schur_slack(const Mat& upsilon_sym) {
    return 1e-9 * std::abs(upsilon_sym.trace()) / static_cast<double>(upsilon_sym.rows());
}

ConvexityBounds convexity_bounds(const CanonicalPHSystem& sys, const Region& region) {
    ConvexityBounds b{1.0, 1.0};
    for (const Vec& q : region.configuration_samples()) {
        Eigen::SelfAdjointEigenSolver<Mat> es(sym_part(sys.potential().hessian(q)),
                                              Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues()(0);
        const double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
        if (!(lmin > 0.0)) {
            throw InfeasibleError("potential not strongly convex at q = (" + vec_text(q) +
                                  "): hessian eigenvalue " + format_g17(lmin));
        }
        b.beta_min = std::min(b.beta_min, lmin);
        b.beta_max = std::max(b.beta_max, lmax);
    }
    return b;
}

AssumptionReport validate_assumptions(const CanonicalPHSystem& sys, const Region& region) {
    return validate_assumptions(sys.potential(), sys.interconnection_field(),
                                sys.dissipation_field(), region);
}

namespace {

struct SampleCache {
    std::vector<UpsilonParts> parts;
    std::vector<State> states;
    ConvexityBounds bounds;
    double norm_a_max = 0.0;
    double norm_phi_max = 0.0;
};

SampleCache build_cache(const CanonicalPHSystem& sys, const Region& region, PhiChoice choice) {
    SampleCache c;
    c.bounds = convexity_bounds(sys, region);
    for (const Vec& q : region.configuration_samples()) {
        const Vec q_local = q - region.center;
        const Mat a = sys.interconnection_field().value(q_local, Vec::Zero(q.size()));
        if (!phi_condition_holds(a, choice)) {
            throw InfeasibleError("condition A Phi + Phi^T A^T > 0 fails at q = (" +
                                  vec_text(q_local) + ")");
        }
        c.norm_a_max = std::max(c.norm_a_max, spectral_norm(a));
        c.norm_phi_max = std::max(c.norm_phi_max, spectral_norm(phi_matrix(a, choice)));
    }
    c.states = region.phase_samples();
    c.parts.reserve(c.states.size());
    for (State& s : c.states) {
        s.q -= region.center;
        c.parts.push_back(upsilon_parts(sys, s, choice));
    }
    return c;
}

Pass check_all(const SampleCache& c, double epsilon, std::size_t& hint) {
    Pass p;
    p.feasible = true;
    p.worst_margin = std::numeric_limits<double>::infinity();
    const std::size_t count = c.parts.size();
    // The last failing sample is tried first; a failing epsilon usually fails there again.
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = (hint + k) % count;
        const Mat u = c.parts[idx].at(epsilon);
        const SchurResult r = schur_pd_check(u, default_schur_slack(u));
        if (r.margin < p.worst_margin) {
            p.worst_margin = r.margin;
            p.worst = idx;
        }
        if (!r.positive_definite) {
            p.feasible = false;
            hint = idx;
            return p;
        }
    }
    return p;
}

EpsilonSearch search_epsilon(const SampleCache& c) {
    EpsilonSearch out;
    out.bounds = c.bounds;
    out.norm_a_max = c.norm_a_max;
    out.norm_phi_max = c.norm_phi_max;
    out.samples = c.states.size();
    out.k1_limit = c.bounds.beta_min / (c.norm_phi_max * c.bounds.beta_max * c.bounds.beta_max);

    std::size_t hint = 0;
    // k1 > 0 is strict, so the limit itself is infeasible.
    auto feasible = [&](double eps, Pass* last) {
        ++out.iterations;
        if (!(eps < out.k1_limit)) return false;
        const Pass p = check_all(c, eps, hint);
        if (last) *last = p;
        return p.feasible;
    };

    double hi = out.k1_limit;
    double lo = hi;
    Pass last;
    bool found = false;
    while (lo >= 1e-12) {
        lo *= 0.5;
        if (feasible(lo, &last)) {
            found = true;
            break;
        }
        hi = lo;
    }
    if (!found) {
        const State& w = c.states[last.worst];
        throw InfeasibleError("certificate infeasible on region; worst sample q = (" +
                              vec_text(w.q) + "), p = (" + vec_text(w.p) +
                              "), margin " + format_g17(last.worst_margin));
    }
    while (hi - lo > 1e-4 * lo) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid, nullptr)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.epsilon_star = lo;
    return out;
}

}  // namespace

EpsilonSearch max_feasible_epsilon(const CanonicalPHSystem& sys, const Region& region,
                                   PhiChoice choice) {
    return search_epsilon(build_cache(sys, region, choice));
}

Certificate make_certificate(const CanonicalPHSystem& sys, const Region& region,
                             PhiChoice choice, bool global_flag) {
    const AssumptionReport report = validate_assumptions(sys, region);
    if (!report.passed()) throw InfeasibleError("assumptions fail: " + report.failure);

    const SampleCache c = build_cache(sys, region, choice);
    const EpsilonSearch search = search_epsilon(c);

    Certificate cert;
    cert.phi_choice = choice;
    cert.epsilon_star = search.epsilon_star;
    cert.epsilon = 0.5 * search.epsilon_star;
    cert.beta_min = search.bounds.beta_min;
    cert.beta_max = search.bounds.beta_max;
    cert.norm_a_max = search.norm_a_max;
    cert.norm_phi_max = search.norm_phi_max;
    cert.region = region;
    cert.samples = search.samples;
    cert.global_flag = global_flag;

    cert.mu = std::numeric_limits<double>::infinity();
    cert.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.parts.size(); ++k) {
        const Mat u = c.parts[k].at(cert.epsilon);
        cert.mu = std::min(cert.mu, min_eigenvalue(u));
        const double m = schur_pd_check(u, default_schur_slack(u)).margin;
        if (m < cert.margin) {
            cert.margin = m;
            cert.worst_sample = c.states[k];
        }
    }
    const double bm2 = cert.beta_max * cert.beta_max;
    const double cross = cert.epsilon * cert.norm_phi_max * bm2;
    cert.k1 = 0.5 * (cert.beta_min - cross);
    cert.k2 = 0.5 * (cert.beta_max + cross);
    cert.rate_paper =
        cert.beta_max * cert.mu / (1.0 + cert.epsilon * cert.norm_a_max * cert.beta_max);
    cert.rate_sound = cert.mu * cert.beta_min * cert.beta_min / (2.0 * cert.k2);
    if (!(cert.mu > 0.0) || !(cert.k1 > 0.0)) {
        throw InfeasibleError("certificate degenerate at half the feasibility boundary");
    }
    return cert;
}

double certificate_rate(const Certificate& cert, RateKind kind) {
    return kind == RateKind::kPaper ? cert.rate_paper : cert.rate_sound;
}

double envelope(const Certificate& cert, double x0_norm, double t, RateKind kind) {
    if (t < 0.0) throw Error("time must be non-negative");
    return std::sqrt(cert.k2 / cert.k1) * x0_norm * std::exp(-certificate_rate(cert, kind) * t);
}

std::string to_text(const Certificate& cert, const std::vector<std::string>& comments) {
    std::ostringstream os;
    for (const std::string& c : comments) os << "# " << c << '\n';
    os << "# sampled certificate: extrema over " << cert.samples
       << " region samples, no interval guarantee\n"
       << "# rate_paper = beta_max mu / (1 + epsilon norm_A_max beta_max)\n"
       << "# rate_sound = mu beta_min^2 / (2 k2), the rate used for envelope bounds\n";
    os << "phi_choice = " << to_string(cert.phi_choice) << '\n'
       << "epsilon = " << format_g17(cert.epsilon) << '\n'
       << "beta_min = " << format_g17(cert.beta_min) << '\n'
       << "beta_max = " << format_g17(cert.beta_max) << '\n'
       << "norm_A_max = " << format_g17(cert.norm_a_max) << '\n'
       << "mu = " << format_g17(cert.mu) << '\n'
       << "k1 = " << format_g17(cert.k1) << '\n'
       << "k2 = " << format_g17(cert.k2) << '\n'
       << "rate_paper = " << format_g17(cert.rate_paper) << '\n'
       << "rate_sound = " << format_g17(cert.rate_sound) << '\n'
       << "q_radii = " << vec_text(cert.region.q_radii) << '\n'
       << "p_radii = " << vec_text(cert.region.p_radii) << '\n'
       << "samples = " << cert.samples << '\n'
       << "margin = " << format_g17(cert.margin) << '\n'
       << "global_flag = " << (cert.global_flag ? "true" : "false") << '\n';
    return os.str();
}

Certificate parse_certificate(const std::string& text) {
    static const std::vector<std::string> kKeys = {
        "phi_choice", "epsilon", "beta_min", "beta_max",  "norm_A_max",
        "mu",         "k1",      "k2",       "rate_paper", "rate_sound",
        "q_radii",    "p_radii", "samples",  "margin",     "global_flag"};
    std::map<std::string, std::pair<std::string, int>> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno, 1);
        const std::string key = trim(t.substr(0, eq));
        bool known = false;
        for (const auto& k : kKeys) known = known || k == key;
        if (!known) throw ParseError("unknown certificate key '" + key + "'", lineno, 1);
        kv[key] = {trim(t.substr(eq + 1)), lineno};
    }
    for (const auto& k : kKeys) {
        if (!kv.count(k)) throw ParseError("missing certificate key '" + k + "'", lineno, 1);
    }
    auto num = [&](const std::string& k) { return parse_double(kv[k].first, kv[k].second); };
    Certificate c;
    c.phi_choice = phi_choice_from_string(kv["phi_choice"].first);
    c.epsilon = num("epsilon");
    c.beta_min = num("beta_min");
    c.beta_max = num("beta_max");
    c.norm_a_max = num("norm_A_max");
    c.mu = num("mu");
    c.k1 = num("k1");
    c.k2 = num("k2");
    c.rate_paper = num("rate_paper");
    c.rate_sound = num("rate_sound");
    c.region.q_radii = parse_vec(kv["q_radii"].first, kv["q_radii"].second);
    c.region.p_radii = parse_vec(kv["p_radii"].first, kv["p_radii"].second);
    c.region.center = Vec::Zero(c.region.q_radii.size());
    c.samples = static_cast<std::size_t>(num("samples"));
    c.margin = num("margin");
    const std::string g = kv["global_flag"].first;
    if (g != "true" && g != "false") {
        throw ParseError("global_flag must be true or false", kv["global_flag"].second, 1);
    }
    c.global_flag = g == "true";
    return c;
}

}  // namespace phes
