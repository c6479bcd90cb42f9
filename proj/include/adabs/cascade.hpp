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

// cascade.hpp — discrete model of adaptive absorption: the mode passes a
// chain of weak beam splitters, each reflected arm watched by a click
// detector, and a click removes the remaining splitters after a fixed
// latency.
//
// One splitter of reflectivity R maps the mode through the Kraus family
//     B_k |n> = sqrt(C(n,k) R^k (1-R)^{n-k}) |n-k>,
// k being the number of reflected photons. With detector efficiency eta_d a
// k-photon reflection goes unnoticed with probability (1 - eta_d)^k.

#pragma once

#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adabs/adaptive.hpp"
#include "adabs/dynamics.hpp"
#include "adabs/ensemble.hpp"

namespace adabs {

struct CascadeConfig {
    double reflectivity = 0.0;         ///< R per splitter, [0, 1)
    int n_splitters = 1;
    double detector_efficiency = 1.0;  ///< eta_d, [0, 1]
    double internal_loss = 0.0;        ///< unmonitored loss per pass, [0, 1)
    int feedback_latency_steps = 0;    ///< splitters passed between a click and switch-off

    void validate() const {
        if (!(reflectivity >= 0.0 && reflectivity < 1.0)) {
            throw DomainError("CascadeConfig: reflectivity must lie in [0, 1)");
        }
        if (n_splitters < 1) throw DomainError("CascadeConfig: n_splitters must be >= 1");
        if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0)) {
            throw DomainError("CascadeConfig: detector_efficiency must lie in [0, 1]");
        }
        if (!(internal_loss >= 0.0 && internal_loss < 1.0)) {
            throw DomainError("CascadeConfig: internal_loss must lie in [0, 1)");
        }
        if (feedback_latency_steps < 0) throw DomainError("CascadeConfig: feedback_latency_steps must be >= 0");
        if (!(std::pow(1.0 - reflectivity, n_splitters) > 0.0)) {
            throw DomainError("CascadeConfig: total transmissivity underflows to zero");
        }
    }
};

struct CascadeOutcome {
    std::optional<int> click_index;  ///< first detected click, none if the chain stays silent
    FockDensityMatrix final_state;
    double probability = 0.0;
};

struct CascadeEnumeration {
    std::vector<CascadeOutcome> outcomes;
    FockDensityMatrix average_state;
};

struct SplitterBranches {
    Branch no_click;
    Branch click;
};

namespace detail {

/// amp(k, n) = sqrt(C(n,k) R^k (1-R)^{n-k}) for the splitter Kraus family.
inline Eigen::MatrixXd splitter_amplitudes(int dim, double reflectivity) {
    Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(dim, dim);
    const double t = 1.0 - reflectivity;
    for (int n = 0; n < dim; ++n) {
        for (int k = 0; k <= n; ++k) {
            amp(k, n) = std::sqrt(boost::math::binomial_coefficient<double>(static_cast<unsigned>(n),
                                                                            static_cast<unsigned>(k)) *
                                  std::pow(reflectivity, k) * std::pow(t, n - k));
        }
    }
    return amp;
}

/// Unnormalized (no_click, click) after one splitter.
inline std::pair<Matrix, Matrix> split(const Matrix &rho, const Eigen::MatrixXd &amp, double eta_d) {
    const Eigen::Index d = rho.rows();
    Matrix quiet = Matrix::Zero(d, d);
    Matrix click = Matrix::Zero(d, d);
    double missed = 1.0;  // (1 - eta_d)^k
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index j = 0; j + k < d; ++j) {
            for (Eigen::Index i = 0; i + k < d; ++i) {
                const Complex term = amp(k, i + k) * amp(k, j + k) * rho(i + k, j + k);
                quiet(i, j) += missed * term;
                click(i, j) += (1.0 - missed) * term;
            }
        }
        missed *= 1.0 - eta_d;
    }
    return {std::move(quiet), std::move(click)};
}

/// Propagation after a click: `steps` further splitters whose outcomes are
/// ignored, each followed by the internal loss.
inline Matrix latency_passes(Matrix rho, int steps, const LossChannel &splitter, const LossChannel &internal) {
    for (int s = 0; s < steps; ++s) rho = internal.apply(splitter.apply(rho));
    return rho;
}

}  // namespace detail

/// One splitter followed by a click/no-click readout of the reflected arm;
/// branch norms are the outcome probabilities.
inline SplitterBranches splitter_step(const FockDensityMatrix &rho, double reflectivity, double eta_d) {
    if (!(reflectivity >= 0.0 && reflectivity < 1.0)) throw DomainError("splitter_step: R must lie in [0, 1)");
    if (!(eta_d >= 0.0 && eta_d <= 1.0)) throw DomainError("splitter_step: eta_d must lie in [0, 1]");
    auto [quiet, click] = detail::split(rho.elements(), detail::splitter_amplitudes(rho.dim(), reflectivity), eta_d);
    return {make_branch(std::move(quiet), rho.tail_mass_bound()), make_branch(std::move(click), rho.tail_mass_bound())};
}

/// Every first-click position plus the silent branch, with exact
/// probabilities, and their average.
inline CascadeEnumeration run_cascade_enumerated(const FockDensityMatrix &rho0, const CascadeConfig &cfg) {
    cfg.validate();
    const int d = rho0.dim();
    const double tail = rho0.tail_mass_bound();
    const Eigen::MatrixXd amp = detail::splitter_amplitudes(d, cfg.reflectivity);
    const LossChannel splitter(1.0 - cfg.reflectivity);
    const LossChannel internal(1.0 - cfg.internal_loss);

    CascadeEnumeration result;
    Matrix average = Matrix::Zero(d, d);
    Matrix quiet = rho0.elements();
    for (int i = 0; i < cfg.n_splitters; ++i) {
        auto [next_quiet, click] = detail::split(quiet, amp, cfg.detector_efficiency);
        quiet = internal.apply(next_quiet);
        click = internal.apply(click);
        const int latency = std::min(cfg.feedback_latency_steps, cfg.n_splitters - 1 - i);
        click = detail::latency_passes(std::move(click), latency, splitter, internal);
        const double p = click.diagonal().real().sum();
        if (p > 0.0) {
            average += click;
            result.outcomes.push_back({i, FockDensityMatrix(click / p, tail / p), p});
        }
    }
    const double p_quiet = quiet.diagonal().real().sum();
    if (p_quiet > 0.0) {
        average += quiet;
        result.outcomes.push_back({std::nullopt, FockDensityMatrix(quiet / p_quiet, tail / p_quiet), p_quiet});
    }
    result.average_state = FockDensityMatrix(std::move(average), tail);
    return result;
}

/// Sampled counterpart of run_cascade_enumerated: each run walks the chain,
/// drawing the click outcome at every splitter from its conditional
/// probability. The histogram has one bin per splitter index.
inline EnsembleResult run_cascade_sampled(const FockDensityMatrix &rho0, const CascadeConfig &cfg,
                                          std::uint64_t n_traj, std::uint64_t seed,
                                          const EnsembleOptions &opt = {}) {
    cfg.validate();
    const int d = rho0.dim();
    const Eigen::MatrixXd amp = detail::splitter_amplitudes(d, cfg.reflectivity);
    const LossChannel splitter(1.0 - cfg.reflectivity);
    const LossChannel internal(1.0 - cfg.internal_loss);
    const Matrix start = rho0.normalized().elements();
    Histogram hist = Histogram::uniform(0.0, cfg.n_splitters, cfg.n_splitters);

    auto simulate = [&](std::uint64_t, std::mt19937_64 &rng) -> std::pair<Matrix, int> {
        Matrix state = start;
        for (int i = 0; i < cfg.n_splitters; ++i) {
            auto [quiet, click] = detail::split(state, amp, cfg.detector_efficiency);
            const double p_click = click.diagonal().real().sum();
            const double p_total = p_click + quiet.diagonal().real().sum();
            const double u = uniform_open_closed(rng);
            if (u * p_total <= p_click) {
                click /= p_click;
                click = internal.apply(click);
                const int latency = std::min(cfg.feedback_latency_steps, cfg.n_splitters - 1 - i);
                click = detail::latency_passes(std::move(click), latency, splitter, internal);
                return {click / click.diagonal().real().sum(), i};
            }
            state = internal.apply(quiet);
            state /= state.diagonal().real().sum();
        }
        return {std::move(state), -1};
    };
    return run_ensemble(n_traj, seed, d, hist, rho0.tail_mass_bound(), opt, simulate);
}

struct ConvergenceRow {
    int splitters = 0;
    double reflectivity = 0.0;
    double trace_distance = 0.0;
};

/// Ideal cascades with per-splitter transmissivity e^{-2 Gamma t / M} against
/// the continuous adaptive map at time t.
inline std::vector<ConvergenceRow> continuum_convergence(const FockDensityMatrix &rho0, const AbsorberParams &params,
                                                         double t, const std::vector<int> &splitter_counts) {
    if (!(t > 0.0)) throw DomainError("continuum_convergence: t must be > 0");
    const FockDensityMatrix target = unconditional_adaptive_state(rho0, params, t);
    std::vector<ConvergenceRow> rows;
    for (int m : splitter_counts) {
        CascadeConfig cfg;
        cfg.n_splitters = m;
        cfg.reflectivity = -std::expm1(-2.0 * params.gamma * t / m);
        const CascadeEnumeration e = run_cascade_enumerated(rho0, cfg);
        rows.push_back({m, cfg.reflectivity, trace_distance(e.average_state, target)});
    }
    return rows;
}

}  // namespace adabs
