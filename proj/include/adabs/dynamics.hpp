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

// dynamics.hpp — absorber superoperators for linear damping of one mode.
//
// With a the annihilation operator the master equation reads
//     d rho / dt = 2 Gamma (J + L) rho,   J rho = a rho a^dagger,
//     L rho = -(a^dagger a rho + rho a^dagger a) / 2,
// and exp(2 Gamma L t) damps element (n, n') by exp(-Gamma (n + n') t).
// Unconditional evolution for time t is the loss channel of transmissivity
// eta = exp(-2 Gamma t), evaluated in closed form from its Kraus operators.

#pragma once

#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <string>

#include "adabs/fock.hpp"

namespace adabs {

// ------------------------------------------------------- raw superoperators

/// J: out(n, n') = sqrt((n+1)(n'+1)) rho(n+1, n'+1); last row and column zero.
inline Matrix apply_jump(const Matrix &rho) {
    const Eigen::Index d = rho.rows();
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j + 1 < d; ++j) {
        for (Eigen::Index i = 0; i + 1 < d; ++i) {
            out(i, j) = std::sqrt(static_cast<double>((i + 1) * (j + 1))) * rho(i + 1, j + 1);
        }
    }
    return out;
}

/// L: out(n, n') = -(n + n') / 2 rho(n, n').
inline Matrix apply_drift(const Matrix &rho) {
    const Eigen::Index d = rho.rows();
    Matrix out(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            out(i, j) = -0.5 * static_cast<double>(i + j) * rho(i, j);
        }
    }
    return out;
}

/// exp(2 gamma L t): out(n, n') = exp(-gamma (n + n') t) rho(n, n').
inline Matrix apply_no_jump(const Matrix &rho, double gamma, double t) {
    const Eigen::Index d = rho.rows();
    Eigen::VectorXd damp(d);
    for (Eigen::Index n = 0; n < d; ++n) damp(n) = std::exp(-gamma * static_cast<double>(n) * t);
    Matrix out(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) out(i, j) = damp(i) * damp(j) * rho(i, j);
    }
    return out;
}

/// Right-hand side of the master equation, 2 gamma (J + L) rho.
inline Matrix master_rhs(const Matrix &rho, double gamma) {
    return 2.0 * gamma * (apply_jump(rho) + apply_drift(rho));
}

// ------------------------------------------------------------ loss channel

/// Linear loss with amplitude transmission sqrt(eta): the beam-splitter
/// picture of damping, with eta = exp(-2 Gamma t) for the absorber.
struct LossChannel {
    double eta = 1.0;

    explicit LossChannel(double transmissivity) : eta(transmissivity) {
        if (!(eta >= 0.0 && eta <= 1.0)) {
            throw DomainError("LossChannel: transmissivity must lie in [0, 1], got " + std::to_string(eta));
        }
    }

    static LossChannel from_damping(double gamma, double t) { return LossChannel(std::exp(-2.0 * gamma * t)); }

    /// Kraus sum over k lost photons:
    /// out(m, m') = sum_k sqrt(C(m+k,k) C(m'+k,k)) eta^{(m+m')/2} (1-eta)^k rho(m+k, m'+k).
    Matrix apply(const Matrix &rho) const {
        const int d = static_cast<int>(rho.rows());
        Matrix out = Matrix::Zero(d, d);
        const double loss = 1.0 - eta;
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < d; ++i) {
                const double keep = std::pow(eta, 0.5 * (i + j));
                if (keep == 0.0) continue;
                Complex acc = 0.0;
                double loss_k = 1.0;
                for (int k = 0; i + k < d && j + k < d; ++k) {
                    const double c = std::sqrt(boost::math::binomial_coefficient<double>(
                                                   static_cast<unsigned>(i + k), static_cast<unsigned>(k)) *
                                               boost::math::binomial_coefficient<double>(
                                                   static_cast<unsigned>(j + k), static_cast<unsigned>(k)));
                    acc += c * loss_k * rho(i + k, j + k);
                    loss_k *= loss;
                    if (loss_k == 0.0) break;
                }
                out(i, j) = keep * acc;
            }
        }
        return out;
    }

    FockDensityMatrix apply(const FockDensityMatrix &rho) const {
        return FockDensityMatrix(apply(rho.elements()), rho.tail_mass_bound());
    }
};

// ---------------------------------------------------------------- branches

/// a rho a^dagger as a branch; norm = Tr(a rho a^dagger) = mean photon number.
inline Branch jump_map(const FockDensityMatrix &rho) {
    return make_branch(apply_jump(rho.elements()), rho.tail_mass_bound());
}

/// exp(2 Gamma L dt) rho as a branch; norm is the probability of no
/// absorption during dt.
inline Branch no_jump_propagate(const FockDensityMatrix &rho, const AbsorberParams &params, double dt) {
    if (!(dt >= 0.0)) throw DomainError("no_jump_propagate: dt must be >= 0");
    return make_branch(apply_no_jump(rho.elements(), params.gamma, dt), rho.tail_mass_bound());
}

/// Unconditional damped state at time t (closed-form loss channel).
inline FockDensityMatrix master_evolve(const FockDensityMatrix &rho, const AbsorberParams &params, double t) {
    if (!(t >= 0.0)) throw DomainError("master_evolve: t must be >= 0");
    if (t == 0.0) return rho;
    return LossChannel::from_damping(params.gamma, t).apply(rho);
}

/// Binomial law for the photons transmitted when |n> meets a beam splitter of
/// transmissivity eta.
inline PhotonNumberDistribution beam_splitter_transmit_distribution(int n, double eta) {
    if (n < 0) throw DomainError("beam_splitter_transmit_distribution: n must be >= 0");
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError("beam_splitter_transmit_distribution: eta must lie in [0, 1]");
    }
    PhotonNumberDistribution p;
    p.probs.resize(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) {
        p.probs[static_cast<std::size_t>(m)] =
            boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(m)) *
            std::pow(eta, m) * std::pow(1.0 - eta, n - m);
    }
    return p;
}

/// Probability that no photon has been absorbed by time t,
/// S(t) = sum_n p_n exp(-2 Gamma n t).
inline double survival_probability(const FockDensityMatrix &rho0, double gamma, double t) {
    double s = 0.0;
    for (int n = 0; n < rho0.dim(); ++n) s += rho0.population(n) * std::exp(-2.0 * gamma * n * t);
    return s;
}

/// Density of the first absorption time, 2 Gamma Tr[J exp(2 Gamma L t1) rho0].
inline double jump_time_density(const FockDensityMatrix &rho0, const AbsorberParams &params, double t1) {
    if (!(t1 >= 0.0)) throw DomainError("jump_time_density: t1 must be >= 0");
    const double g = params.gamma;
    double s = 0.0;
    for (int n = 1; n < rho0.dim(); ++n) s += n * rho0.population(n) * std::exp(-2.0 * g * n * t1);
    return 2.0 * g * s;
}

}  // namespace adabs
