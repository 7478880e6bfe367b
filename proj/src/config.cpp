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

#include "phes/config.hpp"

#include "phes/expr.hpp"
#include "phes/models.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace phes {
namespace {

struct Entry {
    std::string value;
    int line = 0;
    int column = 0;  // of the value
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model",
         {"name", "i1", "i2", "i3", "m2", "dc2", "g", "damping", "dof", "actuated", "inertia",
          "potential", "q0", "p0"}},
        {"gains", {"scenario", "kp", "ki", "kd", "q_star"}},
        {"region", {"q_radius", "p_radius", "grid", "extra_samples", "seed"}},
        {"integrator", {"step", "horizon", "record_every"}},
        {"output", {"dir", "phi", "global", "canonical"}},
    };
    return keys;
}

std::size_t first_non_space(const std::string& s, std::size_t from = 0) {
    const auto p = s.find_first_not_of(" \t\r", from);
    return p == std::string::npos ? s.size() : p;
}

std::string rstrip(const std::string& s) {
    const auto e = s.find_last_not_of(" \t\r");
    return e == std::string::npos ? std::string() : s.substr(0, e + 1);
}

double to_double(const std::string& text, int line, int column) {
    const std::string t = rstrip(text.substr(first_non_space(text)));
    if (t.empty()) throw ParseError("expected a number", line, column);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("malformed number '" + t + "'", line, column);
    }
    return v;
}

long long to_integer(const Entry& e) {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("malformed integer '" + e.value + "'", e.line, e.column);
    }
    return v;
}

bool to_bool(const Entry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ParseError("expected true or false", e.line, e.column);
}

double positive(const Entry& e, const char* what) {
    const double v = to_double(e.value, e.line, e.column);
    if (!(v > 0.0)) throw ParseError(std::string(what) + " must be positive", e.line, e.column);
    return v;
}

Vec vector_of(const Entry& e) { return parse_vector(e.value, 0, e.line, e.column); }

// Splits on `sep`, keeping the column of each piece.
std::vector<std::pair<std::string, int>> split(const std::string& s, char sep, int column) {
    std::vector<std::pair<std::string, int>> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = s.find(sep, start);
        std::string piece = s.substr(start, p == std::string::npos ? std::string::npos : p - start);
        // Report the column of the first non-blank character.
        const std::size_t lead = std::min(piece.find_first_not_of(" \t"), piece.size());
        out.emplace_back(piece.substr(lead), column + static_cast<int>(start + lead));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return out;
}

std::vector<std::vector<Expression>> parse_matrix(const std::string& text, Index n, int line,
                                                  int column, const char* what) {
    std::vector<std::vector<Expression>> rows;
    for (const auto& [row, rc] : split(text, ';', column)) {
        std::vector<Expression> r;
        for (const auto& [cell, cc] : split(row, ',', rc)) {
            r.push_back(Expression::parse(cell, n, line, cc));
        }
        if (static_cast<Index>(r.size()) != n) {
            throw ParseError(std::string(what) + " row must have " + std::to_string(n) +
                                 " entries",
                             line, rc);
        }
        rows.push_back(std::move(r));
    }
    if (static_cast<Index>(rows.size()) != n) {
        throw ParseError(std::string(what) + " must have " + std::to_string(n) + " rows", line,
                         column);
    }
    return rows;
}

MatrixField::Fn matrix_fn(std::vector<std::vector<Expression>> cells) {
    return [cells = std::move(cells)](const Vec& q, const Vec&) {
        const Index n = static_cast<Index>(cells.size());
        Mat m(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                m(i, j) = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](q);
            }
        }
        return m;
    };
}

MechanicalSystem custom_model(Index dof, Index actuated, const Entry& inertia,
                              const Entry& potential, const Entry* damping) {
    if (dof < 1 || actuated < 1 || actuated > dof) {
        throw ParseError("need 1 <= actuated <= dof", inertia.line, 1);
    }
    MatrixField m(matrix_fn(parse_matrix(inertia.value, dof, inertia.line, inertia.column,
                                         "inertia")),
                  MatrixProperty::kPositiveDefinite);
    const Vec zero = Vec::Zero(dof);
    const Mat m0 = m.value(zero, zero);
    if (symmetry_residual(m0) > 1e-12 || !(min_eigenvalue(sym_part(m0)) > 0.0)) {
        throw ParseError("inertia must be symmetric positive definite at q = 0", inertia.line,
                         inertia.column);
    }
    const Expression u = Expression::parse(potential.value, dof, potential.line,
                                           potential.column);
    MatrixField d;
    if (damping) {
        d = MatrixField(matrix_fn(parse_matrix(damping->value, dof, damping->line,
                                               damping->column, "damping")),
                        MatrixProperty::kPositiveSemiDefinite);
    }
    return MechanicalSystem(dof, actuated, std::move(m), ScalarField([u](const Vec& q) {
                                return u(q);
                            }),
                            std::move(d));
}

Vec broadcast(const Vec& v, Index size, const char* what) {
    if (v.size() == size) return v;
    if (v.size() == 1) return Vec::Constant(size, v(0));
    throw Error(std::string(what) + " has " + std::to_string(v.size()) + " entries, expected " +
                std::to_string(size));
}

std::string vec_line(const Vec& v) {
    std::string s;
    for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_shortest(v(i));
    return s;
}

}  // namespace

Vec parse_vector(const std::string& text, Index size, int line, int column) {
    std::vector<double> vals;
    for (const auto& [piece, col] : split(text, ',', column)) {
        vals.push_back(to_double(piece, line, col));
    }
    Vec v = Vec::Map(vals.data(), static_cast<Index>(vals.size()));
    if (size > 0) {
        if (v.size() == 1) return Vec::Constant(size, v(0));
        if (v.size() != size) {
            throw ParseError("expected " + std::to_string(size) + " values", line, column);
        }
    }
    return v;
}

void RunConfig::validate() const {
    if (!(q_radius > 0.0) || !(p_radius > 0.0)) throw Error("region radii must be positive");
    if (!(step > 0.0)) throw Error("step must be positive");
    if (!(horizon > 0.0)) throw Error("horizon must be positive");
    if (record_every < 1) throw Error("record_every must be >= 1");
    if (grid_points < 3) throw Error("grid must be >= 3");
    if (extra_samples < 0) throw Error("extra_samples must be non-negative");
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = rstrip(hash == std::string::npos ? raw : raw.substr(0, hash));
        const std::size_t b = first_non_space(line);
        if (b >= line.size()) continue;
        const int col = static_cast<int>(b) + 1;
        if (line[b] == '[') {
            const auto close = line.find(']', b);
            if (close == std::string::npos || first_non_space(line, close + 1) < line.size()) {
                throw ParseError("malformed section header", lineno, col);
            }
            current = line.substr(b + 1, close - b - 1);
            if (!known_keys().count(current)) {
                throw ParseError("unknown section '" + current + "'", lineno, col + 1);
            }
            continue;
        }
        const auto eq = line.find('=', b);
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno, col);
        const std::string key = rstrip(line.substr(b, eq - b));
        if (current.empty()) throw ParseError("key outside of any section", lineno, col);
        if (!known_keys().at(current).count(key)) {
            throw ParseError("unknown key '" + key + "' in section [" + current + "]", lineno,
                             col);
        }
        const std::size_t vb = first_non_space(line, eq + 1);
        Entry e{line.substr(vb), lineno, static_cast<int>(vb) + 1};
        if (e.value.empty()) throw ParseError("empty value for '" + key + "'", lineno, e.column);
        if (!sections[current].emplace(key, e).second) {
            throw ParseError("duplicate key '" + key + "'", lineno, col);
        }
    }

    RunConfig cfg;
    auto get = [&](const char* sec, const char* key) -> const Entry* {
        const auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };

    if (const Entry* e = get("model", "name")) cfg.model = e->value;
    const bool is_pera = cfg.model == "pera";
    const bool is_custom = cfg.model == "custom";
    for (const char* k : {"i1", "i2", "i3", "m2", "dc2", "g"}) {
        const Entry* e = get("model", k);
        if (!e) continue;
        if (!is_pera) throw ParseError(std::string(k) + " only applies to model pera", e->line, 1);
        const double v = positive(*e, k);
        const std::string key = k;
        if (key == "i1") cfg.pera.i1 = v;
        if (key == "i2") cfg.pera.i2 = v;
        if (key == "i3") cfg.pera.i3 = v;
        if (key == "m2") cfg.pera.m2 = v;
        if (key == "dc2") cfg.pera.dc2 = v;
        if (key == "g") cfg.pera.g = v;
    }
    for (const char* k : {"dof", "actuated", "inertia", "potential"}) {
        const Entry* e = get("model", k);
        if (e && !is_custom) {
            throw ParseError(std::string(k) + " only applies to model custom", e->line, 1);
        }
        if (!e && is_custom) throw ParseError(std::string("custom model needs ") + k, lineno, 1);
    }
    const Entry* damping = get("model", "damping");
    if (is_custom) {
        const Index dof = static_cast<Index>(to_integer(*get("model", "dof")));
        const Index act = static_cast<Index>(to_integer(*get("model", "actuated")));
        cfg.custom = custom_model(dof, act, *get("model", "inertia"), *get("model", "potential"),
                                  damping);
    } else if (damping) {
        if (!is_pera) throw ParseError("damping only applies to pera or custom", damping->line, 1);
        cfg.pera.damping = parse_vector(damping->value, 3, damping->line, damping->column);
    }
    if (const Entry* e = get("model", "q0")) cfg.q0 = vector_of(*e);
    if (const Entry* e = get("model", "p0")) cfg.p0 = vector_of(*e);

    if (const Entry* e = get("gains", "scenario")) cfg.scenario = e->value;
    if (const Entry* e = get("gains", "kp")) cfg.kp = vector_of(*e);
    if (const Entry* e = get("gains", "ki")) cfg.ki = vector_of(*e);
    if (const Entry* e = get("gains", "kd")) cfg.kd = vector_of(*e);
    if (const Entry* e = get("gains", "q_star")) cfg.q_star = vector_of(*e);

    if (const Entry* e = get("region", "q_radius")) cfg.q_radius = positive(*e, "q_radius");
    if (const Entry* e = get("region", "p_radius")) cfg.p_radius = positive(*e, "p_radius");
    if (const Entry* e = get("region", "grid")) {
        cfg.grid_points = static_cast<int>(to_integer(*e));
        if (cfg.grid_points < 3) throw ParseError("grid must be >= 3", e->line, e->column);
    }
    if (const Entry* e = get("region", "extra_samples")) {
        cfg.extra_samples = static_cast<int>(to_integer(*e));
        if (cfg.extra_samples < 0) {
            throw ParseError("extra_samples must be non-negative", e->line, e->column);
        }
    }
    if (const Entry* e = get("region", "seed")) {
        const long long s = to_integer(*e);
        if (s < 0) throw ParseError("seed must be non-negative", e->line, e->column);
        cfg.seed = static_cast<std::uint64_t>(s);
    }

    if (const Entry* e = get("integrator", "step")) cfg.step = positive(*e, "step");
    if (const Entry* e = get("integrator", "horizon")) cfg.horizon = positive(*e, "horizon");
    if (const Entry* e = get("integrator", "record_every")) {
        const long long r = to_integer(*e);
        if (r < 1) throw ParseError("record_every must be >= 1", e->line, e->column);
        cfg.record_every = static_cast<std::size_t>(r);
    }

    if (const Entry* e = get("output", "dir")) cfg.out_dir = e->value;
    if (const Entry* e = get("output", "phi")) {
        try {
            cfg.phi = phi_choice_from_string(e->value);
        } catch (const Error& ex) {
            throw ParseError(ex.what(), e->line, e->column);
        }
    }
    if (const Entry* e = get("output", "global")) cfg.global = to_bool(*e);
    if (const Entry* e = get("output", "canonical")) cfg.canonical = to_bool(*e);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

MechanicalSystem make_custom_model(Index dof, Index actuated, const std::string& inertia,
                                   const std::string& potential, const std::string& damping) {
    const Entry in{inertia, 1, 1};
    const Entry pot{potential, 1, 1};
    const Entry dm{damping, 1, 1};
    return custom_model(dof, actuated, in, pot, damping.empty() ? nullptr : &dm);
}

Problem resolve(const RunConfig& cfg) {
    cfg.validate();
    Problem pr;
    pr.model = cfg.model;
    Vec kp;
    Vec ki;
    Vec kd;
    Vec q_star;
    Vec q0;
    std::string label = "custom";

    if (cfg.model == "pera") {
        pr.sys = build_pera(cfg.pera);
        pr.pera = cfg.pera;
        const PeraScenario sc =
            pera_scenario(cfg.scenario.empty() ? "s1" : cfg.scenario, cfg.pera);
        kp = sc.gains.kp.diagonal();
        ki = sc.gains.ki.diagonal();
        kd = sc.gains.kd.diagonal();
        q_star = sc.gains.q_star;
        q0 = sc.initial.q;
        label = sc.gains.label;
        pr.comments.push_back(cfg.pera.describe());
    } else {
        if (!cfg.scenario.empty()) {
            throw Error("gain scenarios are only defined for model pera");
        }
        if (cfg.model == "custom") {
            if (!cfg.custom) throw Error("custom model has no definition");
            pr.sys = *cfg.custom;
        } else {
            pr.sys = make_builtin(cfg.model);
        }
        const Index n = pr.sys.dof();
        const Index m = pr.sys.actuated();
        kp = Vec::Constant(m, 1.0);
        ki = Vec::Constant(m, cfg.model == "msd1" ? 2.0 : 1.0);
        kd = Vec::Zero(m);
        q_star = Vec::Zero(n);
        q0 = cfg.model == "custom" ? Vec::Zero(n)
             : cfg.model == "pendulum" ? Vec::Constant(n, 0.5)
                                       : Vec::Constant(n, 1.0);
        pr.comments.push_back("model " + cfg.model);
    }
    const Index n = pr.sys.dof();
    const Index m = pr.sys.actuated();
    if (cfg.kp || cfg.ki || cfg.kd) label = "inline";
    if (cfg.kp) kp = broadcast(*cfg.kp, m, "kp");
    if (cfg.ki) ki = broadcast(*cfg.ki, m, "ki");
    if (cfg.kd) kd = broadcast(*cfg.kd, m, "kd");
    if (cfg.q_star) q_star = broadcast(*cfg.q_star, n, "q_star");
    if (cfg.q0) q0 = broadcast(*cfg.q0, n, "q0");
    const Vec p0 = cfg.p0 ? broadcast(*cfg.p0, n, "p0") : Vec(Vec::Zero(n));

    pr.gains = GainSet::diagonal(label, kp, ki, kd, q_star);
    pr.gains.validate(n, m);
    pr.initial = State(q0, p0);
    pr.region = Region::box(n, cfg.q_radius, cfg.p_radius);
    pr.region.grid_points_per_axis = cfg.grid_points;
    pr.region.extra_samples = cfg.extra_samples;
    pr.region.seed = cfg.seed;
    pr.sim.step = cfg.step;
    pr.sim.horizon = cfg.horizon;
    pr.sim.record_every = cfg.record_every;
    pr.phi = cfg.phi;
    pr.global = cfg.global;
    pr.canonical = cfg.canonical;

    pr.comments.push_back("gains " + label + ": kp = (" + vec_line(kp) + "), ki = (" +
                          vec_line(ki) + "), kd = (" + vec_line(kd) + "), q_star = (" +
                          vec_line(q_star) + ")");
    pr.comments.push_back("initial state q0 = (" + vec_line(q0) + "), p0 = (" + vec_line(p0) +
                          ")");
    pr.comments.push_back("region " + pr.region.describe());
    pr.comments.push_back("seed " + std::to_string(cfg.seed));
    return pr;
}

}  // namespace phes
