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

// Acceptance gate: runs each acceptance criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adabs/adabs.hpp"
#include "test_util.hpp"

using namespace adabs;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

/// Tracks the worst observed value of one quantity against its tolerance.
struct Worst {
    const char *label;
    double tol;
    double value = 0.0;

    void see(double x) { value = std::max(value, x); }
    bool ok() const { return value <= tol; }
    std::string str() const {
        char b[128];
        std::snprintf(b, sizeof b, "%s %.3g (tol %.3g)", label, value, tol);
        return b;
    }
};

AbsorberParams params_with(double gamma, int cutoff) {
    AbsorberParams p;
    p.gamma = gamma;
    p.cutoff = cutoff;
    return p;
}

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// 1 -------------------------------------------------------- number states
Verdict number_state_law() {
    Worst w{"max trace distance", 1e-10};
    for (int n : {1, 2, 5}) {
        for (double gt : {0.1, 1.0, 5.0}) {
            const auto q = unconditional_adaptive_state(number_state(n, n), params_with(1.0, n), gt);
            w.see(trace_distance(q, analytic::number_unconditional(n, 1.0, gt)));
        }
    }
    return {w.ok(), w.str()};
}

// 2 ---------------------------------------------------- distribution shift
Verdict distribution_shift() {
    Worst diag{"max |p_n - shift|", 1e-6};
    Worst mom{"max moment gap", 1e-9};
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = test_oracles::random_pmf(rng, 12);
        const auto rho = unconditional_adaptive_state(diagonal_state(p), params_with(1.0, 12), 20.0);
        const auto shifted = analytic::asymptotic_distribution(p);
        for (int n = 0; n <= 12; ++n) diag.see(std::abs(rho.population(n) - shifted.at(n)));
        const Moments f = analytic::asymptotic_moments(p);
        const Moments d = moments(shifted);
        mom.see(std::abs(f.mean - d.mean));
        mom.see(std::abs(f.variance - d.variance));
        mom.see(std::abs(f.normally_ordered_variance - d.normally_ordered_variance));
    }
    return {diag.ok() && mom.ok(), diag.str() + "; " + mom.str()};
}

// 3 ------------------------------------------------------- coherent suite
Verdict coherent_suite() {
    Worst fid{"max infidelity", 1e-10};
    Worst dens{"max density gap", 1e-9};
    Worst norm{"max |P norm - 1|", 1e-9};
    Worst mix{"max mixture distance", 1e-4};
    const int cutoff = 40;
    for (double a : {0.5, 1.0, 2.0}) {
        const Complex alpha = std::polar(a, 0.35);
        const auto rho = coherent_state(alpha, cutoff);
        const auto prm = params_with(1.0, cutoff);
        for (double t1 : {0.0, 0.3, 1.0, 3.0}) {
            const Branch b = conditional_state(rho, prm, t1);
            fid.see(1.0 - fidelity_with_pure(b.state.normalized(), coherent_amplitudes(alpha * std::exp(-t1), cutoff)));
            dens.see(std::abs(jump_time_density(rho, prm, t1) - analytic::coherent_jump_density(alpha, 1.0, t1)));
        }
        for (double gt : {0.1, 1.0, 3.0}) {
            const auto pf = analytic::coherent_p_function(alpha, 1.0, gt);
            quad::Options qo;
            qo.rel_tol = 1e-13;
            const double integral =
                quad::integrate([&](double x) { return pf.continuous_density(x) * x; }, pf.support_lo(), pf.support_hi(), qo)
                    .value;
            norm.see(std::abs(pf.delta_weight + integral - 1.0));
            mix.see(trace_distance(analytic::p_function_mixture(pf, cutoff),
                                   unconditional_adaptive_state(rho, prm, gt)));
        }
    }
    return {fid.ok() && dens.ok() && norm.ok() && mix.ok(),
            fid.str() + "; " + dens.str() + "; " + norm.str() + "; " + mix.str()};
}

// 4 ------------------------------------------- Monte Carlo vs deterministic
Verdict monte_carlo() {
    struct Case {
        const char *name;
        FockDensityMatrix rho;
        std::function<double(double)> survival;  // closed-form no-detection probability
    };
    auto number_survival = [](std::vector<std::pair<int, double>> weights) {
        return [weights](double t) {
            double s = 0.0;
            for (auto [n, p] : weights) s += p * std::exp(-2.0 * n * t);
            return s;
        };
    };
    const std::vector<Case> cases = {
        {"coherent", coherent_state(1.0, 20), [](double t) { return analytic::coherent_no_jump_probability(1.0, 1.0, t); }},
        {"|2>", number_state(2, 2), number_survival({{2, 1.0}})},
        {"two-point", diagonal_state(test_oracles::two_point_pmf(0.4, 3)), number_survival({{0, 0.4}, {3, 0.6}})},
    };
    const double t = 2.0;
    bool pass = true;
    std::string detail;
    for (const auto &c : cases) {
        const auto prm = params_with(1.0, c.rho.cutoff());
        const EnsembleResult r = run_trajectories(c.rho, prm, t, 100000, 4242);
        const double dist = trace_distance(r.mean_state, unconditional_adaptive_state(c.rho, prm, t));
        const auto &h = r.jump_time_histogram;
        std::vector<double> probs;
        for (int b = 0; b < h.bins(); ++b) {
            probs.push_back(c.survival(h.edges[static_cast<std::size_t>(b)]) -
                            c.survival(h.edges[static_cast<std::size_t>(b) + 1]));
        }
        probs.push_back(c.survival(t));
        std::vector<std::uint64_t> counts = h.counts;
        counts.push_back(r.no_jump_count);
        const auto chi = test_oracles::chi_square_test(counts, probs);
        const bool ok = dist <= 3.0 * r.jackknife_error && chi.p_value > 0.01;
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : "; ") + c.name +
                  fmt(": dist %.3g <= 3x%.3g, chi2 p %.3g", dist, r.jackknife_error, chi.p_value);
    }
    return {pass, detail};
}

// 5 ------------------------------------------------------ sub-Poissonian
Verdict sub_poissonian() {
    const auto w = analytic::sub_poissonian_window(0.4);
    const auto p = test_oracles::two_point_pmf(0.4, 3);
    const double in_formula = w.input_nov(3);
    const double out_formula = w.output_nov(3);
    const double in_moments = moments(p).normally_ordered_variance;
    const double out_moments = moments(analytic::asymptotic_distribution(p)).normally_ordered_variance;
    const double err = std::max({std::abs(in_formula - 0.36), std::abs(in_moments - 0.36),
                                 std::abs(out_formula + 0.24), std::abs(out_moments + 0.24)});
    const bool in_window = w.window && w.window->first <= 3 && 3 <= w.window->second;
    return {err <= 1e-12 && in_window,
            fmt("input %.15g/%.15g, output ", in_formula, in_moments) + fmt("%.15g/%.15g, max error %.3g", out_formula, out_moments, err)};
}

// 6 ------------------------------------------------------------ posterior
Verdict posterior() {
    Worst norm{"max |sum + tail - 1|", 1e-9};
    for (double gt : {0.05, 0.2, std::log(2.0), 2.0}) {
        const auto post = posterior_flat_prior(gt, 1.0, 200);
        norm.see(std::abs(post.total() + post.tail_mass - 1.0));
    }
    Worst spot{"max spot error", 1e-12};
    const auto q = posterior_flat_prior(std::log(2.0), 1.0, 50);
    spot.see(std::abs(q.at(1) - 9.0 / 16.0));
    spot.see(std::abs(q.at(2) - 9.0 / 32.0));
    spot.see(std::abs(q.at(3) - 27.0 / 256.0));

    PhotonNumberDistribution prior;
    prior.probs = {0.0, 0.2, 0.2, 0.2, 0.2, 0.2};
    const auto exact = posterior_general(prior, 0.5, 1.0);
    auto err = [&](double dt) {
        const auto s = sequential_povm_posterior(prior, 0.5, 1.0, dt);
        double m = 0.0;
        for (int n = 0; n <= 5; ++n) m = std::max(m, std::abs(s.at(n) - exact.at(n)));
        return m;
    };
    const double e2 = err(1e-2), e3 = err(1e-3);
    const double ratio = e2 / e3;
    const bool first_order = std::abs(ratio / 10.0 - 1.0) <= 0.2;
    return {norm.ok() && spot.ok() && first_order,
            norm.str() + "; " + spot.str() + fmt("; POVM error ratio %.4g (10 +- 20%%)", ratio)};
}

// 7 -------------------------------------------------------------- cascade
Verdict cascade() {
    const auto rows = continuum_convergence(number_state(2, 2), params_with(1.0, 2), 1.0, {8, 64});
    const bool scaling = rows[1].trace_distance <= 0.25 * rows[0].trace_distance;

    Worst total{"max |sum p - 1|", 1e-12};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u;
    for (int trial = 0; trial < 50; ++trial) {
        CascadeConfig cfg;
        cfg.reflectivity = 0.5 * u(rng);
        cfg.n_splitters = 1 + static_cast<int>(64 * u(rng));
        cfg.detector_efficiency = u(rng);
        cfg.internal_loss = 0.2 * u(rng);
        cfg.feedback_latency_steps = static_cast<int>(5 * u(rng));
        const auto rho = trial % 2 ? diagonal_state(test_oracles::random_pmf(rng, 6)) : coherent_state(1.2, 25);
        double s = 0.0;
        for (const auto &o : run_cascade_enumerated(rho, cfg).outcomes) s += o.probability;
        total.see(std::abs(s - 1.0));
    }
    return {scaling && total.ok(),
            fmt("error M=8 %.4g, M=64 %.4g (ratio %.3g >= 4); ", rows[0].trace_distance, rows[1].trace_distance,
                rows[0].trace_distance / rows[1].trace_distance) +
                total.str()};
}

// 8 ---------------------------------------------------------- non-Markov
Verdict nonmarkov() {
    Worst w{"max derivative residual", 1e-6};
    const std::vector<FockDensityMatrix> inputs = {coherent_state(1.0, 25), number_state(2, 2),
                                                   diagonal_state(test_oracles::two_point_pmf(0.4, 3))};
    for (const auto &rho : inputs) {
        for (double t : {0.5, 1.0, 2.0}) w.see(nonmarkov_derivative_check(rho, params_with(1.0, rho.cutoff()), t, 1e-4));
    }
    return {w.ok(), w.str()};
}

// 9 --------------------------------------------------------- determinism
std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism() {
    const fs::path dir = fs::temp_directory_path() / ("adabs_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    struct Run {
        const char *command;
        const char *config;
    };
    const std::vector<Run> runs = {
        {"trajectories",
         R"({"state": {"type": "coherent", "magnitude": 1.0}, "absorber": {"cutoff": 20}, "t": 2.0, "n_traj": 50000})"},
        {"cascade",
         R"({"absorber": {"cutoff": 3}, "state": {"type": "two_point", "p0": 0.4, "n": 3},
             "cascade": {"reflectivity": 0.05, "n_splitters": 40, "detector_efficiency": 0.7},
             "sampled": {"n_traj": 20000}})"},
        {"evolve", R"({"state": {"type": "coherent", "magnitude": 1.0}, "time_grid": {"t_max": 2.0, "points": 5}})"},
    };
    std::size_t files = 0;
    for (const auto &run : runs) {
        const fs::path cfg = dir / (std::string(run.command) + ".json");
        std::ofstream(cfg) << run.config;
        for (const char *threads : {"1", "4"}) {
            for (int repeat = 0; repeat < 2; ++repeat) {
                const fs::path out = dir / run.command / (std::string(threads) + "_" + std::to_string(repeat));
                const std::string line = std::string("ADABS_THREADS=") + threads + " '" ADABS_CLI_PATH "' " + run.command +
                                         " --config '" + cfg.string() + "' --seed 31337 --out '" + out.string() +
                                         "' > /dev/null 2>&1";
                const int status = std::system(line.c_str());
                if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                    return {false, std::string(run.command) + " exited abnormally"};
                }
            }
        }
        const fs::path ref = dir / run.command / "1_0";
        for (const auto &entry : fs::directory_iterator(ref)) {
            const std::string want = slurp(entry.path());
            for (const char *other : {"1_1", "4_0", "4_1"}) {
                if (slurp(dir / run.command / other / entry.path().filename()) != want) {
                    return {false, std::string(run.command) + "/" + entry.path().filename().string() + " differs (" +
                                       other + ")"};
                }
            }
            ++files;
        }
    }
    fs::remove_all(dir);
    return {files > 0, std::to_string(files) + " output files byte-identical across ADABS_THREADS=1,4 and repeats"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria = {
        {"number-state law", number_state_law},
        {"distribution shift", distribution_shift},
        {"coherent-state suite", coherent_suite},
        {"Monte Carlo vs deterministic", monte_carlo},
        {"sub-Poissonian flip", sub_poissonian},
        {"posterior", posterior},
        {"cascade convergence", cascade},
        {"non-Markovian derivative identity", nonmarkov},
        {"determinism across thread counts", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("[%s] %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
                criteria.size());
    return failed;
}
