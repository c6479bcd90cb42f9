// Copyright 2026 The adabs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommand implementations for the adabs command-line tool. Each command
// reads a JSON config, runs one experiment, and writes CSV/JSON files into
// an output directory. Outputs are pure functions of (config, seed).

#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adabs/adabs.hpp"
#include "json.hpp"

namespace adabs::cli {

using json = nlohmann::json;

/// Invalid configuration; `path` is a JSON pointer to the offending field.
struct ConfigError : std::runtime_error {
    std::string path;
    ConfigError(std::string p, const std::string &msg) : std::runtime_error(p + ": " + msg), path(std::move(p)) {}
};

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3 };

// ------------------------------------------------------------------ config

/// Read-only view of a JSON object that remembers where it sits in the
/// document, so every diagnostic can name the field.
class Node {
  public:
    Node(const json &j, std::string path) : j_(&j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(where(), "expected an object");
    }

    const std::string &path() const { return path_; }
    std::string field(const std::string &key) const { return path_ + "/" + key; }
    bool has(const std::string &key) const { return j_->contains(key); }

    /// Rejects keys outside `allowed`.
    void allow(std::initializer_list<const char *> allowed) const {
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j_->begin(); it != j_->end(); ++it) {
            if (!ok.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
        }
    }

    Node child(const std::string &key) const { return Node(get(key), field(key)); }

    double number(const std::string &key) const {
        const json &v = get(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key), "expected a finite number");
        return x;
    }
    double number_or(const std::string &key, double fallback) const { return has(key) ? number(key) : fallback; }

    long long integer(const std::string &key) const {
        const json &v = get(key);
        if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
        return v.get<long long>();
    }
    long long integer_or(const std::string &key, long long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::uint64_t unsigned_or(const std::string &key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const json &v = get(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(field(key), "expected a non-negative integer");
        }
        return static_cast<std::uint64_t>(v.get<long long>());
    }

    std::string string(const std::string &key) const {
        const json &v = get(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string &key) const {
        const json &v = get(key);
        if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                throw ConfigError(field(key) + "/" + std::to_string(i), "expected a finite number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string &key) const {
        const json &v = get(key);
        if (!v.is_array()) throw ConfigError(field(key), "expected an array of integers");
        std::vector<int> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer()) {
                throw ConfigError(field(key) + "/" + std::to_string(i), "expected an integer");
            }
            out.push_back(v[i].get<int>());
        }
        return out;
    }

  private:
    std::string where() const { return path_.empty() ? "/" : path_; }

    const json &get(const std::string &key) const {
        if (!j_->contains(key)) throw ConfigError(field(key), "missing required field");
        return (*j_)[key];
    }

    const json *j_;
    std::string path_;
};

inline void require(bool ok, const std::string &path, const std::string &msg) {
    if (!ok) throw ConfigError(path, msg);
}

inline json load_config(const std::string &file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("/", "cannot open config file '" + file + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
}

inline AbsorberParams parse_absorber(const Node &root) {
    AbsorberParams p;
    if (!root.has("absorber")) return p;
    const Node a = root.child("absorber");
    a.allow({"gamma", "cutoff", "quad_tol", "root_tol"});
    p.gamma = a.number_or("gamma", p.gamma);
    require(p.gamma > 0.0, a.field("gamma"), "must be > 0");
    const long long cutoff = a.integer_or("cutoff", p.cutoff);
    require(cutoff >= 1 && cutoff <= 400, a.field("cutoff"), "must lie in [1, 400]");
    p.cutoff = static_cast<int>(cutoff);
    p.quad_tol = a.number_or("quad_tol", p.quad_tol);
    require(p.quad_tol > 0.0 && p.quad_tol < 1.0, a.field("quad_tol"), "must lie in (0, 1)");
    p.root_tol = a.number_or("root_tol", p.root_tol);
    require(p.root_tol > 0.0 && p.root_tol < 1.0, a.field("root_tol"), "must lie in (0, 1)");
    return p;
}

/// Input state descriptor:
///   {"type": "coherent", "magnitude": r, "phase": phi}
///   {"type": "number", "n": n}
///   {"type": "pmf", "probs": [p_0, p_1, ...]}
///   {"type": "two_point", "p0": p0, "n": N}
struct StateInput {
    std::string type;
    Complex alpha = 0.0;
    FockDensityMatrix rho;
};

inline StateInput parse_state(const Node &root, const AbsorberParams &params) {
    const Node s = root.child("state");
    StateInput spec;
    spec.type = s.string("type");
    const int cutoff = params.cutoff;
    if (spec.type == "coherent") {
        s.allow({"type", "magnitude", "phase"});
        const double r = s.number("magnitude");
        require(r >= 0.0, s.field("magnitude"), "must be >= 0");
        spec.alpha = std::polar(r, s.number_or("phase", 0.0));
        spec.rho = coherent_state(spec.alpha, cutoff);
    } else if (spec.type == "number") {
        s.allow({"type", "n"});
        const long long n = s.integer("n");
        require(n >= 0 && n <= cutoff, s.field("n"), "must lie in [0, cutoff=" + std::to_string(cutoff) + "]");
        spec.rho = number_state(static_cast<int>(n), cutoff);
    } else if (spec.type == "pmf") {
        s.allow({"type", "probs"});
        PhotonNumberDistribution p;
        p.probs = s.numbers("probs");
        require(!p.probs.empty(), s.field("probs"), "must be non-empty");
        require(static_cast<int>(p.probs.size()) <= cutoff + 1, s.field("probs"),
                "has more entries than cutoff + 1 = " + std::to_string(cutoff + 1));
        try {
            p.validate();
        } catch (const DomainError &e) {
            throw ConfigError(s.field("probs"), e.what());
        }
        p.probs.resize(static_cast<std::size_t>(cutoff) + 1, 0.0);
        spec.rho = diagonal_state(p);
    } else if (spec.type == "two_point") {
        s.allow({"type", "p0", "n"});
        const double p0 = s.number("p0");
        require(p0 >= 0.0 && p0 <= 1.0, s.field("p0"), "must lie in [0, 1]");
        const long long n = s.integer("n");
        require(n >= 1 && n <= cutoff, s.field("n"), "must lie in [1, cutoff=" + std::to_string(cutoff) + "]");
        PhotonNumberDistribution p;
        p.probs.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
        p.probs[0] = p0;
        p.probs[static_cast<std::size_t>(n)] += 1.0 - p0;
        spec.rho = diagonal_state(p);
    } else {
        throw ConfigError(s.field("type"), "unknown state type '" + spec.type +
                                               "' (expected coherent, number, pmf or two_point)");
    }
    return spec;
}

/// Either "times": [...] or "time_grid": {"t_min", "t_max", "points"}.
inline std::vector<double> parse_times(const Node &root, bool allow_zero, std::vector<double> fallback = {}) {
    std::vector<double> t;
    if (root.has("times")) {
        require(!root.has("time_grid"), root.field("time_grid"), "give either times or time_grid, not both");
        t = root.numbers("times");
        for (std::size_t i = 0; i < t.size(); ++i) {
            require(allow_zero ? t[i] >= 0.0 : t[i] > 0.0, root.field("times") + "/" + std::to_string(i),
                    allow_zero ? "must be >= 0" : "must be > 0");
        }
    } else if (root.has("time_grid")) {
        const Node g = root.child("time_grid");
        g.allow({"t_min", "t_max", "points"});
        const double lo = g.number_or("t_min", 0.0);
        const double hi = g.number("t_max");
        const long long n = g.integer("points");
        require(allow_zero ? lo >= 0.0 : lo > 0.0, g.field("t_min"), allow_zero ? "must be >= 0" : "must be > 0");
        require(hi >= lo, g.field("t_max"), "must be >= t_min");
        require(n >= 1 && n <= 100000, g.field("points"), "must lie in [1, 100000]");
        for (long long i = 0; i < n; ++i) t.push_back(n == 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    } else {
        t = std::move(fallback);
    }
    require(!t.empty(), root.field("times"), "need at least one time");
    return t;
}

// ------------------------------------------------------------------ output

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class OutputDir {
  public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw ConfigError("--out", "cannot create directory '" + dir_.string() + "': " + ec.message());
    }

    void write(const std::string &name, const std::string &content) const {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw ConfigError("--out", "cannot write '" + path.string() + "'");
    }

    void write_json(const std::string &name, const json &j) const { write(name, j.dump(2) + "\n"); }

  private:
    std::filesystem::path dir_;
};

inline std::string pn_header(int cutoff) {
    std::string h;
    for (int n = 0; n <= cutoff; ++n) h += ",p_" + std::to_string(n) + " [1]";
    return h;
}

inline std::string pn_row(const FockDensityMatrix &rho) {
    std::string r;
    for (int n = 0; n < rho.dim(); ++n) r += "," + num(rho.population(n));
    return r;
}

/// Row-major interleaved (re, im) pairs with the dimension.
inline json matrix_json(const FockDensityMatrix &rho) {
    json elems = json::array();
    for (int i = 0; i < rho.dim(); ++i) {
        for (int j = 0; j < rho.dim(); ++j) {
            elems.push_back(rho(i, j).real());
            elems.push_back(rho(i, j).imag());
        }
    }
    return {{"dim", rho.dim()}, {"tail_mass_bound", rho.tail_mass_bound()}, {"elements", std::move(elems)}};
}

inline json pmf_json(const FockDensityMatrix &rho) {
    json a = json::array();
    for (int n = 0; n < rho.dim(); ++n) a.push_back(rho.population(n));
    return a;
}

/// Pearson test with adjacent categories pooled until each expectation
/// reaches `min_expected`.
inline json chi_square_report(const std::vector<std::uint64_t> &observed, const std::vector<double> &probs,
                              double min_expected = 5.0) {
    double n = 0.0;
    for (auto o : observed) n += static_cast<double>(o);
    std::vector<double> obs, expct;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += static_cast<double>(observed[i]);
        acc_e += n * probs[i];
        if (acc_e >= min_expected) {
            obs.push_back(acc_o);
            expct.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_o > 0.0 || acc_e > 0.0) {
        if (expct.empty()) {
            obs.push_back(acc_o);
            expct.push_back(acc_e);
        } else {
            obs.back() += acc_o;
            expct.back() += acc_e;
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (expct[i] > 0.0) stat += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
    }
    const int dof = static_cast<int>(obs.size()) - 1;
    double p = 1.0;
    if (dof >= 1) p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
    return {{"statistic", stat}, {"dof", dof}, {"p_value", p}, {"categories", obs.size()}};
}

// ---------------------------------------------------------------- commands

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

inline std::uint64_t resolve_seed(const Node &root, const RunOptions &opt) {
    return opt.seed ? *opt.seed : root.unsigned_or("seed", 1);
}

/// p_n(t) over a time grid and the final density matrix.
inline void cmd_evolve(const json &cfg, const RunOptions &opt) {
    const Node root(cfg, "");
    root.allow({"absorber", "state", "times", "time_grid", "seed"});
    const AbsorberParams params = parse_absorber(root);
    const StateInput state = parse_state(root, params);
    const std::vector<double> times = parse_times(root, true);
    const OutputDir out(opt.out_dir);

    std::string csv = "t [time],gamma_t [1]" + pn_header(params.cutoff) + "\n";
    FockDensityMatrix last;
    for (double t : times) {
        last = unconditional_adaptive_state(state.rho, params, t);
        csv += num(t) + "," + num(params.gamma * t) + pn_row(last) + "\n";
    }
    out.write("evolve_pn.csv", csv);
    json final = matrix_json(last);
    final["t"] = times.back();
    final["gamma"] = params.gamma;
    out.write_json("final_state.json", final);
}

/// Monte Carlo trajectories with histogram and consistency statistics.
inline void cmd_trajectories(const json &cfg, const RunOptions &opt) {
    const Node root(cfg, "");
    root.allow({"absorber", "state", "t", "n_traj", "bins", "blocks", "seed"});
    const AbsorberParams params = parse_absorber(root);
    const StateInput state = parse_state(root, params);
    const double t = root.number("t");
    require(t > 0.0, root.field("t"), "must be > 0");
    const std::uint64_t n_traj = root.unsigned_or("n_traj", 100000);
    require(n_traj >= 1, root.field("n_traj"), "must be >= 1");
    EnsembleOptions eo;
    eo.bins = static_cast<int>(root.integer_or("bins", eo.bins));
    require(eo.bins >= 1 && eo.bins <= 100000, root.field("bins"), "must lie in [1, 100000]");
    eo.blocks = static_cast<int>(root.integer_or("blocks", eo.blocks));
    require(eo.blocks >= 2 && eo.blocks <= 10000, root.field("blocks"), "must lie in [2, 10000]");
    const std::uint64_t seed = resolve_seed(root, opt);
    const OutputDir out(opt.out_dir);

    const EnsembleResult r = run_trajectories(state.rho, params, t, n_traj, seed, eo);
    const auto &h = r.jump_time_histogram;

    std::vector<double> probs;
    std::string csv = "bin_lo [time],bin_hi [time],count [1],expected [1]\n";
    for (int b = 0; b < h.bins(); ++b) {
        const double lo = h.edges[static_cast<std::size_t>(b)], hi = h.edges[static_cast<std::size_t>(b) + 1];
        const double p = survival_probability(state.rho, params.gamma, lo) - survival_probability(state.rho, params.gamma, hi);
        probs.push_back(p);
        csv += num(lo) + "," + num(hi) + "," + std::to_string(h.counts[static_cast<std::size_t>(b)]) + "," +
               num(p * static_cast<double>(n_traj)) + "\n";
    }
    out.write("jump_histogram.csv", csv);

    const double s = survival_probability(state.rho, params.gamma, t);
    probs.push_back(s);
    std::vector<std::uint64_t> counts = h.counts;
    counts.push_back(r.no_jump_count);
    const double sigma = std::sqrt(s * (1.0 - s) / static_cast<double>(n_traj));
    const FockDensityMatrix reference = unconditional_adaptive_state(state.rho, params, t);

    json summary = {
        {"n_traj", r.n_traj},
        {"seed", r.seed},
        {"t", t},
        {"gamma", params.gamma},
        {"no_jump_count", r.no_jump_count},
        {"no_jump_fraction", r.no_jump_fraction},
        {"no_jump_expected", s},
        {"no_jump_sigma", sigma},
        {"no_jump_z", sigma > 0.0 ? (r.no_jump_fraction - s) / sigma : 0.0},
        {"chi_square", chi_square_report(counts, probs)},
        {"jackknife_error", r.jackknife_error},
        {"trace_distance_to_quadrature", trace_distance(r.mean_state, reference)},
        {"mean_state_pmf", pmf_json(r.mean_state)},
    };
    out.write_json("trajectories_summary.json", summary);
}

/// Radial P-function of an adaptively absorbed coherent state.
inline void cmd_pfunction(const json &cfg, const RunOptions &opt) {
    const Node root(cfg, "");
    root.allow({"absorber", "state", "t", "points", "seed"});
    const AbsorberParams params = parse_absorber(root);
    const Node st = root.child("state");
    require(st.string("type") == "coherent", st.field("type"), "pfunction needs a coherent input");
    const StateInput state = parse_state(root, params);
    require(std::abs(state.alpha) > 0.0, st.field("magnitude"), "must be > 0 (alpha = 0 has no support)");
    const double t = root.number("t");
    require(t >= 0.0, root.field("t"), "must be >= 0");
    const long long points = root.integer_or("points", 200);
    require(points >= 1 && points <= 1000000, root.field("points"), "must lie in [1, 1000000]");
    const OutputDir out(opt.out_dir);

    const analytic::PFunctionRadial pf = analytic::coherent_p_function(state.alpha, params.gamma, t);
    std::string csv = "kind,|beta| [1],value [1]\n";
    csv += "peak," + num(pf.peak_location()) + "," + num(pf.delta_weight) + "\n";
    const double lo = pf.support_lo(), hi = pf.support_hi();
    if (hi > lo) {
        for (long long i = 0; i < points; ++i) {
            const double b = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
            csv += "density," + num(b) + "," + num(pf.continuous_density(b)) + "\n";
        }
    }
    out.write("pfunction.csv", csv);

    double integral = 0.0;
    if (hi > lo) {
        quad::Options qo;
        qo.rel_tol = params.quad_tol;
        integral = quad::integrate([&](double b) { return pf.continuous_density(b) * b; }, lo, hi, qo).value;
    }
    json summary = {
        {"alpha_magnitude", pf.alpha_mag},
        {"phase", pf.phase},
        {"gamma_t", pf.gamma_t},
        {"peak_location", pf.peak_location()},
        {"peak_weight", pf.delta_weight},
        {"support", {lo, hi}},
        {"continuous_mass_closed_form", pf.continuous_mass()},
        {"continuous_mass_quadrature", integral},
        {"normalization", pf.delta_weight + integral},
    };
    out.write_json("pfunction_summary.json", summary);
}

/// Posterior photon-number curves given a first detection at t_a.
inline void cmd_posterior(const json &cfg, const RunOptions &opt) {
    const Node root(cfg, "");
    root.allow({"gamma", "n_list", "times", "time_grid", "n_max", "prior", "seed"});
    const double gamma = root.number_or("gamma", 1.0);
    require(gamma > 0.0, root.field("gamma"), "must be > 0");
    const std::vector<int> n_list = root.has("n_list") ? root.integers("n_list") : std::vector<int>{1, 2, 5};
    require(!n_list.empty(), root.field("n_list"), "must be non-empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        require(n_list[i] >= 0, root.field("n_list") + "/" + std::to_string(i), "must be >= 0");
    }
    std::vector<double> fallback;
    for (int i = 1; i <= 60; ++i) fallback.push_back(0.05 * i / gamma);
    const std::vector<double> times = parse_times(root, false, fallback);
    const long long n_max = root.integer_or("n_max", 200);
    require(n_max >= 1 && n_max <= 100000, root.field("n_max"), "must lie in [1, 100000]");

    std::optional<PhotonNumberDistribution> prior;
    if (root.has("prior")) {
        prior.emplace();
        prior->probs = root.numbers("prior");
        try {
            prior->validate();
        } catch (const DomainError &e) {
            throw ConfigError(root.field("prior"), e.what());
        }
        bool photons = false;
        for (std::size_t n = 1; n < prior->probs.size(); ++n) photons = photons || prior->probs[n] > 0.0;
        require(photons, root.field("prior"), "must give weight to some n >= 1");
    }
    const OutputDir out(opt.out_dir);

    std::string csv = "t_a [time],gamma_t_a [1],n [1],p [1]\n";
    std::string norm = "t_a [time],gamma_t_a [1],sum_p [1],tail_mass [1],total [1]\n";
    for (double t : times) {
        const PosteriorDistribution post = prior ? posterior_general(*prior, t, gamma)
                                                 : posterior_flat_prior(t, gamma, static_cast<int>(n_max));
        if (prior) {
            for (int n : n_list) csv += num(t) + "," + num(gamma * t) + "," + std::to_string(n) + "," + num(post.at(n)) + "\n";
        } else {
            for (const auto &row : posterior_table(gamma, n_list, {t})) {
                csv += num(t) + "," + num(gamma * t) + "," + std::to_string(row.n) + "," + num(row.p) + "\n";
            }
        }
        norm += num(t) + "," + num(gamma * t) + "," + num(post.total()) + "," + num(post.tail_mass) + "," +
                num(post.total() + post.tail_mass) + "\n";
    }
    out.write("posterior.csv", csv);
    out.write("posterior_normalization.csv", norm);
}

inline CascadeConfig parse_cascade(const Node &c) {
    c.allow({"reflectivity", "n_splitters", "detector_efficiency", "internal_loss", "feedback_latency_steps"});
    CascadeConfig cfg;
    cfg.reflectivity = c.number("reflectivity");
    require(cfg.reflectivity >= 0.0 && cfg.reflectivity < 1.0, c.field("reflectivity"), "must lie in [0, 1)");
    const long long m = c.integer("n_splitters");
    require(m >= 1 && m <= 1000000, c.field("n_splitters"), "must lie in [1, 1000000]");
    cfg.n_splitters = static_cast<int>(m);
    cfg.detector_efficiency = c.number_or("detector_efficiency", 1.0);
    require(cfg.detector_efficiency >= 0.0 && cfg.detector_efficiency <= 1.0, c.field("detector_efficiency"),
            "must lie in [0, 1]");
    cfg.internal_loss = c.number_or("internal_loss", 0.0);
    require(cfg.internal_loss >= 0.0 && cfg.internal_loss < 1.0, c.field("internal_loss"), "must lie in [0, 1)");
    const long long lat = c.integer_or("feedback_latency_steps", 0);
    require(lat >= 0 && lat <= 1000000, c.field("feedback_latency_steps"), "must lie in [0, 1000000]");
    cfg.feedback_latency_steps = static_cast<int>(lat);
    try {
        cfg.validate();
    } catch (const DomainError &e) {
        throw ConfigError(c.path(), e.what());
    }
    return cfg;
}

/// Beam-splitter cascade: outcome enumeration, optional convergence table
/// and optional sampled ensemble.
inline void cmd_cascade(const json &cfg, const RunOptions &opt) {
    const Node root(cfg, "");
    root.allow({"absorber", "state", "cascade", "convergence", "sampled", "seed"});
    const AbsorberParams params = parse_absorber(root);
    const StateInput state = parse_state(root, params);
    const CascadeConfig cc = parse_cascade(root.child("cascade"));

    std::optional<double> conv_t;
    std::vector<int> counts;
    if (root.has("convergence")) {
        const Node c = root.child("convergence");
        c.allow({"t", "splitter_counts"});
        conv_t = c.number("t");
        require(*conv_t > 0.0, c.field("t"), "must be > 0");
        counts = c.has("splitter_counts") ? c.integers("splitter_counts") : std::vector<int>{1, 2, 4, 8, 16, 32, 64};
        require(!counts.empty(), c.field("splitter_counts"), "must be non-empty");
        for (std::size_t i = 0; i < counts.size(); ++i) {
            require(counts[i] >= 1 && counts[i] <= 100000, c.field("splitter_counts") + "/" + std::to_string(i),
                    "must lie in [1, 100000]");
        }
    }
    std::uint64_t n_sampled = 0;
    if (root.has("sampled")) {
        const Node s = root.child("sampled");
        s.allow({"n_traj"});
        n_sampled = s.unsigned_or("n_traj", 10000);
        require(n_sampled >= 1, s.field("n_traj"), "must be >= 1");
    }
    const std::uint64_t seed = resolve_seed(root, opt);
    const OutputDir out(opt.out_dir);

    const CascadeEnumeration e = run_cascade_enumerated(state.rho, cc);
    std::string csv = "click_index [1],probability [1]" + pn_header(params.cutoff) + "\n";
    double total = 0.0;
    for (const auto &o : e.outcomes) {
        csv += (o.click_index ? std::to_string(*o.click_index) : std::string("none")) + "," + num(o.probability) +
               pn_row(o.final_state) + "\n";
        total += o.probability;
    }
    out.write("cascade_outcomes.csv", csv);

    json summary = {
        {"probability_total", total},
        {"outcomes", e.outcomes.size()},
        {"average_pmf", pmf_json(e.average_state)},
        {"mean_photon_loss", moments(state.rho).mean - moments(e.average_state).mean},
    };

    if (conv_t) {
        std::string conv = "splitters [1],reflectivity [1],trace_distance [1]\n";
        for (const auto &row : continuum_convergence(state.rho, params, *conv_t, counts)) {
            conv += std::to_string(row.splitters) + "," + num(row.reflectivity) + "," + num(row.trace_distance) + "\n";
        }
        out.write("cascade_convergence.csv", conv);
    }
    if (n_sampled > 0) {
        const EnsembleResult r = run_cascade_sampled(state.rho, cc, n_sampled, seed);
        json clicks = json::array();
        for (auto c : r.jump_time_histogram.counts) clicks.push_back(c);
        summary["sampled"] = {
            {"n_traj", r.n_traj},
            {"seed", r.seed},
            {"click_counts", std::move(clicks)},
            {"no_click_count", r.no_jump_count},
            {"jackknife_error", r.jackknife_error},
            {"trace_distance_to_enumeration", trace_distance(r.mean_state, e.average_state)},
            {"mean_photon_loss", moments(state.rho).mean - moments(r.mean_state).mean},
        };
    }
    out.write_json("cascade_summary.json", summary);
}

}  // namespace adabs::cli
