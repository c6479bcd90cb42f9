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

// inference.hpp — the first detection time as a weak photon-number
// measurement: per-step click/no-click POVM and Bayesian posteriors p(n|t_a).

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "adabs/fock.hpp"

namespace adabs {

/// Infinitesimal click / no-click measurement over one step dt:
/// pi_1 = 2 dt Gamma a^dagger a, pi_0 = 1 - pi_1.
struct PovmPair {
    Matrix pi_1;
    Matrix pi_0;
    double dt = 0.0;

    /// Tr[pi rho] for each outcome.
    double click_probability(const FockDensityMatrix &rho) const { return (pi_1 * rho.elements()).trace().real(); }
    double no_click_probability(const FockDensityMatrix &rho) const {
        return (pi_0 * rho.elements()).trace().real();
    }
};

inline PovmPair povm_elements(const AbsorberParams &params, double dt) {
    if (!(dt > 0.0)) throw DomainError("povm_elements: dt must be > 0");
    const double max_dt = 1.0 / (2.0 * params.gamma * params.cutoff);
    if (!(dt < max_dt)) {
        throw DomainError("povm_elements: pi_0 is not positive for dt=" + std::to_string(dt) +
                          "; need dt < " + std::to_string(max_dt));
    }
    const int d = params.cutoff + 1;
    PovmPair p;
    p.dt = dt;
    p.pi_1 = Matrix::Zero(d, d);
    for (int n = 0; n < d; ++n) p.pi_1(n, n) = 2.0 * dt * params.gamma * n;
    p.pi_0 = Matrix::Identity(d, d) - p.pi_1;
    return p;
}

/// p(n | t_a) for n = 0..n_max (probs[0] = 0, since a detection certifies a
/// photon) and a bound on the mass above n_max.
struct PosteriorDistribution {
    double t_a = 0.0;
    double gamma = 1.0;
    std::vector<double> probs;
    double tail_mass = 0.0;

    int n_max() const { return static_cast<int>(probs.size()) - 1; }
    double at(int n) const {
        return (n >= 0 && n <= n_max()) ? probs[static_cast<std::size_t>(n)] : 0.0;
    }
    double total() const {
        double s = 0.0;
        for (double p : probs) s += p;
        return s;
    }
};

/// Likelihood of a first detection at t_a for |n>: 2 Gamma n e^{-2 Gamma n t_a}.
inline double detection_likelihood(int n, double gamma, double t_a) {
    return 2.0 * gamma * n * std::exp(-2.0 * gamma * n * t_a);
}

/// Flat prior over n >= 0:
///   p(n|t_a) = n e^{-2 Gamma (n+1) t_a} (e^{2 Gamma t_a} - 1)^2 = n x^{n-1} (1-x)^2,
/// x = e^{-2 Gamma t_a}. The mass above n_max is x^{n_max} (1 + n_max (1 - x)).
inline PosteriorDistribution posterior_flat_prior(double t_a, double gamma, int n_max) {
    if (!(t_a > 0.0)) {
        throw DomainError("posterior_flat_prior: t_a must be > 0 (at t_a = 0 the flat-prior posterior is improper)");
    }
    if (n_max < 1) throw DomainError("posterior_flat_prior: n_max must be >= 1");
    const double x = std::exp(-2.0 * gamma * t_a);
    const double one_minus_x = -std::expm1(-2.0 * gamma * t_a);
    PosteriorDistribution post;
    post.t_a = t_a;
    post.gamma = gamma;
    post.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        post.probs[static_cast<std::size_t>(n)] = n * std::pow(x, n - 1) * one_minus_x * one_minus_x;
    }
    post.tail_mass = std::pow(x, n_max) * (1.0 + n_max * one_minus_x);
    return post;
}

/// Bayes update of an arbitrary prior with the first-detection likelihood.
/// When the prior carries a tail bound b, the unseen evidence is at most
/// b * sup_{n > N} L(n); that bound is reported as the posterior tail and the
/// represented probabilities share the remaining mass.
inline PosteriorDistribution posterior_general(const PhotonNumberDistribution &prior, double t_a, double gamma) {
    if (!(t_a >= 0.0)) throw DomainError("posterior_general: t_a must be >= 0");
    const int n_max = prior.cutoff();
    PosteriorDistribution post;
    post.t_a = t_a;
    post.gamma = gamma;
    post.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    double evidence = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double w = prior.at(n) * detection_likelihood(n, gamma, t_a);
        post.probs[static_cast<std::size_t>(n)] = w;
        evidence += w;
    }
    double unseen = 0.0;
    if (prior.tail_mass_bound > 0.0) {
        // n e^{-2 Gamma n t} peaks at n = 1 / (2 Gamma t).
        const double peak = t_a > 0.0 ? 1.0 / (2.0 * gamma * t_a) : INFINITY;
        const double n_first = n_max + 1.0;
        const double sup = n_first >= peak ? 2.0 * gamma * n_first * std::exp(-2.0 * gamma * n_first * t_a)
                                           : 2.0 * gamma * peak * std::exp(-1.0);
        unseen = prior.tail_mass_bound * sup;
    }
    if (!(evidence > 0.0)) {
        throw DomainError("posterior_general: prior gives zero probability to a detection (all mass at n = 0)");
    }
    post.tail_mass = unseen / (evidence + unseen);
    const double scale = (1.0 - post.tail_mass) / evidence;
    for (auto &p : post.probs) p *= scale;
    return post;
}

/// Posterior mode; ties go to the smaller n.
inline int map_estimate(const PosteriorDistribution &post) {
    int best = 0;
    double best_p = -1.0;
    for (int n = 0; n <= post.n_max(); ++n) {
        if (post.at(n) > best_p) {
            best_p = post.at(n);
            best = n;
        }
    }
    return best;
}

/// Discrete-time Bayes filter: k = round(t_a / dt) no-click updates with pi_0
/// followed by one click with pi_1, applied to a diagonal prior.
inline PosteriorDistribution sequential_povm_posterior(const PhotonNumberDistribution &prior, double t_a, double gamma,
                                                       double dt) {
    AbsorberParams params;
    params.gamma = gamma;
    params.cutoff = std::max(1, prior.cutoff());
    const PovmPair povm = povm_elements(params, dt);
    const long steps = std::lround(t_a / dt);
    std::vector<double> w(static_cast<std::size_t>(params.cutoff) + 1, 0.0);
    for (int n = 0; n <= prior.cutoff(); ++n) w[static_cast<std::size_t>(n)] = prior.at(n);
    for (long k = 0; k < steps; ++k) {
        double s = 0.0;
        for (std::size_t n = 0; n < w.size(); ++n) {
            w[n] *= povm.pi_0(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real();
            s += w[n];
        }
        for (auto &v : w) v /= s;
    }
    double s = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        w[n] *= povm.pi_1(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real();
        s += w[n];
    }
    if (!(s > 0.0)) throw DomainError("sequential_povm_posterior: click has zero probability");
    PosteriorDistribution post;
    post.t_a = static_cast<double>(steps) * dt;
    post.gamma = gamma;
    post.probs.resize(w.size());
    for (std::size_t n = 0; n < w.size(); ++n) post.probs[n] = w[n] / s;
    return post;
}

struct PosteriorRow {
    double t_a;
    int n;
    double p;
};

/// Pointwise flat-prior posterior curves p(n|t_a) for n in n_list over t_grid.
inline std::vector<PosteriorRow> posterior_table(double gamma, const std::vector<int> &n_list,
                                               const std::vector<double> &t_grid) {
    if (n_list.empty()) throw DomainError("posterior_table: n_list must be non-empty");
    std::vector<PosteriorRow> rows;
    rows.reserve(n_list.size() * t_grid.size());
    for (double t : t_grid) {
        if (!(t > 0.0)) throw DomainError("posterior_table: t_a values must be > 0");
        const double x = std::exp(-2.0 * gamma * t);
        const double omx = -std::expm1(-2.0 * gamma * t);
        for (int n : n_list) {
            if (n < 0) throw DomainError("posterior_table: n must be >= 0");
            rows.push_back({t, n, n * std::pow(x, n - 1) * omx * omx});
        }
    }
    return rows;
}

}  // namespace adabs
