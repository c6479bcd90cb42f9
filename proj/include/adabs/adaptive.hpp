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

// adaptive.hpp — adaptive absorption: the absorber is coupled to the mode
// until the first detected photon and switched off immediately afterwards.
//
// Given a detection at t1 the (unnormalized) output is
//     2 Gamma J exp(2 Gamma L t1) rho0,
// frozen for all later times. Averaging over t1 <= t and adding the
// no-detection branch gives the unconditional state
//     rho(t) = exp(2 Gamma L t) rho0 + int_0^t 2 Gamma J exp(2 Gamma L s) rho0 ds.

#pragma once

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>

#include "adabs/dynamics.hpp"
#include "adabs/ensemble.hpp"
#include "adabs/quadrature.hpp"

namespace adabs {

struct TrajectoryRecord {
    std::optional<double> first_jump_time;
    FockDensityMatrix final_state;
    double horizon = 0.0;
};

/// Normalized post-detection state for a detection at t1, with norm equal to
/// the detection-time density at t1.
inline Branch conditional_state(const FockDensityMatrix &rho0, const AbsorberParams &params, double t1) {
    if (!(t1 >= 0.0)) throw DomainError("conditional_state: t1 must be >= 0");
    Matrix branch = 2.0 * params.gamma * apply_jump(apply_no_jump(rho0.elements(), params.gamma, t1));
    Branch b = make_branch(std::move(branch), rho0.tail_mass_bound());
    if (!(b.norm > 0.0)) {
        throw DomainError("conditional_state: input has no photons, detection has zero probability");
    }
    return b;
}

/// Jump-branch integral int_0^t 2 Gamma J exp(2 Gamma L s) rho0 ds by adaptive
/// Gauss-Kronrod quadrature at relative tolerance params.quad_tol.
inline quad::Result<Matrix> detected_branch_integral(const FockDensityMatrix &rho0, const AbsorberParams &params,
                                                     double t) {
    const double g = params.gamma;
    const Matrix &rho = rho0.elements();
    auto integrand = [&](double s) -> Matrix { return 2.0 * g * apply_jump(apply_no_jump(rho, g, s)); };
    quad::Options opt;
    opt.rel_tol = params.quad_tol;
    return quad::integrate(integrand, 0.0, t, opt);
}

/// Unconditional state of the adaptive absorber after time t.
inline FockDensityMatrix unconditional_adaptive_state(const FockDensityMatrix &rho0, const AbsorberParams &params,
                                                      double t) {
    if (!(t >= 0.0)) throw DomainError("unconditional_adaptive_state: t must be >= 0");
    if (t == 0.0) return rho0;
    Matrix out = apply_no_jump(rho0.elements(), params.gamma, t);
    out += detected_branch_integral(rho0, params, t).value;
    return FockDensityMatrix(std::move(out), rho0.tail_mass_bound());
}

/// t -> infinity limit in closed form:
///   rho(m, m') = 2 sqrt((m+1)(m'+1)) / (m+m'+2) rho0(m+1, m'+1),
/// plus rho0(0, 0) on the vacuum element. The diagonal is the one-step shift
/// p_n = p_{n+1} + p_0 delta_{n,0}.
inline FockDensityMatrix asymptotic_state(const FockDensityMatrix &rho0) {
    const Matrix &r = rho0.elements();
    const Eigen::Index d = r.rows();
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j + 1 < d; ++j) {
        for (Eigen::Index i = 0; i + 1 < d; ++i) {
            const double w = 2.0 * std::sqrt(static_cast<double>((i + 1) * (j + 1))) / static_cast<double>(i + j + 2);
            out(i, j) = w * r(i + 1, j + 1);
        }
    }
    out(0, 0) += r(0, 0);
    return FockDensityMatrix(std::move(out), rho0.tail_mass_bound());
}

/// Trace norm of d rho/dt (central difference, `step`) minus
/// 2 Gamma (J + L) exp(2 Gamma L t) rho0.
inline double nonmarkov_derivative_check(const FockDensityMatrix &rho0, const AbsorberParams &params, double t,
                                         double step = 1e-4) {
    if (!(t > 0.0)) throw DomainError("nonmarkov_derivative_check: t must be > 0");
    if (!(step > 0.0 && step < t)) throw DomainError("nonmarkov_derivative_check: need 0 < step < t");
    const Matrix plus = unconditional_adaptive_state(rho0, params, t + step).elements();
    const Matrix minus = unconditional_adaptive_state(rho0, params, t - step).elements();
    const Matrix fd = (plus - minus) / (2.0 * step);
    const Matrix no_detection = apply_no_jump(rho0.elements(), params.gamma, t);
    const Matrix rhs = master_rhs(no_detection, params.gamma);
    const Matrix diff = fd - rhs;
    return trace_norm(0.5 * (diff + diff.adjoint()));
}

// ---------------------------------------------------------------- sampling

/// S(t) = sum_n p_n exp(-2 Gamma n t) / sum_n p_n: probability of no
/// detection by time t.
class SurvivalFunction {
public:
    SurvivalFunction(const FockDensityMatrix &rho0, double gamma) {
        const double tr = rho0.trace();
        if (!(tr > 0.0)) throw DomainError("SurvivalFunction: zero-trace input");
        for (int n = 0; n < rho0.dim(); ++n) {
            const double p = rho0.population(n) / tr;
            if (p != 0.0) {
                probs_.push_back(p);
                rates_.push_back(2.0 * gamma * n);
            }
        }
    }

    double operator()(double t) const {
        double s = 0.0;
        for (std::size_t i = 0; i < probs_.size(); ++i) s += probs_[i] * std::exp(-rates_[i] * t);
        return s;
    }

    /// Time with S(t) = u, u in [S(t_max), 1], bracketed in [0, t_max].
    double invert(double u, double t_max, double tol) const {
        auto f = [&](double t) { return (*this)(t) - u; };
        const double f0 = f(0.0), f1 = f(t_max);
        if (f0 <= 0.0) return 0.0;
        if (f1 >= 0.0) return t_max;
        std::uintmax_t iters = 200;
        auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
        auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, t_max, f0, f1, stop, iters);
        return 0.5 * (lo + hi);
    }

private:
    std::vector<double> probs_;
    std::vector<double> rates_;
};

/// Draws u in (0, 1]; no detection before t_max if u <= S(t_max), otherwise
/// the detection time solving S(t1) = u.
template <class Rng>
std::optional<double> sample_first_jump_time(const SurvivalFunction &survival, double t_max, double root_tol,
                                             Rng &rng) {
    if (!(t_max > 0.0)) throw DomainError("sample_first_jump_time: t_max must be > 0");
    const double u = uniform_open_closed(rng);
    if (u <= survival(t_max)) return std::nullopt;
    return survival.invert(u, t_max, root_tol);
}

template <class Rng>
std::optional<double> sample_first_jump_time(const FockDensityMatrix &rho0, const AbsorberParams &params,
                                             double t_max, Rng &rng) {
    return sample_first_jump_time(SurvivalFunction(rho0, params.gamma), t_max, params.root_tol, rng);
}

/// One realization up to horizon t: a detection at t1 <= t freezes the
/// conditional state, otherwise the normalized no-detection branch remains.
template <class Rng>
TrajectoryRecord run_trajectory(const FockDensityMatrix &rho0, const AbsorberParams &params, double t, Rng &rng) {
    TrajectoryRecord rec;
    rec.horizon = t;
    rec.first_jump_time = sample_first_jump_time(rho0, params, t, rng);
    if (rec.first_jump_time) {
        rec.final_state = conditional_state(rho0, params, *rec.first_jump_time).state;
    } else {
        rec.final_state = no_jump_propagate(rho0, params, t).state;
    }
    return rec;
}

/// Monte Carlo ensemble of adaptive-absorption trajectories up to horizon t.
/// Trajectory i draws from substream(seed, i); the result is bit-identical
/// for equal (rho0, params, t, n_traj, seed, options.bins, options.blocks).
inline EnsembleResult run_trajectories(const FockDensityMatrix &rho0, const AbsorberParams &params, double t,
                                       std::uint64_t n_traj, std::uint64_t seed, const EnsembleOptions &opt = {}) {
    if (!(t > 0.0)) throw DomainError("run_trajectories: horizon t must be > 0");
    const SurvivalFunction survival(rho0, params.gamma);
    const double g = params.gamma;
    const Matrix &rho = rho0.elements();
    const Matrix no_jump = apply_no_jump(rho, g, t);
    const double survive = no_jump.diagonal().real().sum();
    const Matrix no_jump_state = survive > 0.0 ? Matrix(no_jump / survive) : no_jump;
    Histogram hist = Histogram::uniform(0.0, t, opt.bins);

    auto simulate = [&](std::uint64_t, std::mt19937_64 &rng) -> std::pair<Matrix, int> {
        const auto t1 = sample_first_jump_time(survival, t, params.root_tol, rng);
        if (!t1) return {no_jump_state, -1};
        Matrix c = apply_jump(apply_no_jump(rho, g, *t1));
        c /= c.diagonal().real().sum();
        return {std::move(c), hist.locate(*t1)};
    };
    return run_ensemble(n_traj, seed, rho0.dim(), hist, rho0.tail_mass_bound(), opt, simulate);
}

}  // namespace adabs
