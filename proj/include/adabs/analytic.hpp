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

// analytic.hpp — closed-form results for adaptive absorption of coherent and
// number states, the long-time photon statistics, and the radial
// P-function of an adaptively absorbed coherent state.

#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "adabs/fock.hpp"
#include "adabs/quadrature.hpp"

namespace adabs::analytic {

// ---------------------------------------------------------- coherent input

/// Density of the first detection time for |alpha>:
/// 2 Gamma |alpha|^2 e^{-2 Gamma t1} exp[-|alpha|^2 (1 - e^{-2 Gamma t1})].
inline double coherent_jump_density(Complex alpha, double gamma, double t1) {
    if (!(t1 >= 0.0)) throw DomainError("coherent_jump_density: t1 must be >= 0");
    const double n = std::norm(alpha);
    const double x = std::exp(-2.0 * gamma * t1);
    return 2.0 * gamma * n * x * std::exp(n * std::expm1(-2.0 * gamma * t1));
}

/// exp[-|alpha|^2 (1 - e^{-2 Gamma t})]: no detection up to t.
inline double coherent_no_jump_probability(Complex alpha, double gamma, double t) {
    if (!(t >= 0.0)) throw DomainError("coherent_no_jump_probability: t must be >= 0");
    return std::exp(std::norm(alpha) * std::expm1(-2.0 * gamma * t));
}

/// Radial P-function of the unconditional state of |alpha> after time t.
/// All weight sits at arg(beta) = arg(alpha); with d^2 beta = b db dphi the
/// radial measure is b db. The no-detection branch is a point mass at
/// b = |alpha| e^{-Gamma t}; detections spread 2 exp(b^2 - |alpha|^2) over
/// [|alpha| e^{-Gamma t}, |alpha|).
struct PFunctionRadial {
    double alpha_mag = 0.0;
    double phase = 0.0;
    double gamma_t = 0.0;
    double delta_weight = 1.0;

    double peak_location() const { return alpha_mag * std::exp(-gamma_t); }
    double support_lo() const { return peak_location(); }
    double support_hi() const { return alpha_mag; }

    double continuous_density(double b) const {
        if (b < support_lo() || b >= support_hi()) return 0.0;
        return 2.0 * std::exp(b * b - alpha_mag * alpha_mag);
    }

    /// int continuous_density(b) b db over the support, from the
    /// antiderivative exp(b^2 - |alpha|^2).
    double continuous_mass() const {
        const double lo = support_lo();
        return -std::expm1(lo * lo - alpha_mag * alpha_mag);
    }
};

inline PFunctionRadial coherent_p_function(Complex alpha, double gamma, double t) {
    if (!(t >= 0.0)) throw DomainError("coherent_p_function: t must be >= 0");
    if (std::abs(alpha) == 0.0) throw DomainError("coherent_p_function: alpha = 0 has a degenerate support");
    PFunctionRadial p;
    p.alpha_mag = std::abs(alpha);
    p.phase = std::arg(alpha);
    p.gamma_t = gamma * t;
    p.delta_weight = coherent_no_jump_probability(alpha, gamma, t);
    return p;
}

/// The state sum_beta P(beta) |beta><beta| rebuilt from the radial P-function:
/// the point mass plus a quadrature over the continuous part.
inline FockDensityMatrix p_function_mixture(const PFunctionRadial &p, int cutoff, double rel_tol = 1e-10) {
    const Complex dir = std::polar(1.0, p.phase);
    auto projector = [&](double b) -> Matrix {
        const Eigen::VectorXcd c = coherent_amplitudes(b * dir, cutoff);
        return c * c.adjoint();
    };
    Matrix out = p.delta_weight * projector(p.peak_location());
    if (p.support_hi() > p.support_lo()) {
        quad::Options opt;
        opt.rel_tol = rel_tol;
        auto integrand = [&](double b) -> Matrix { return projector(b) * (p.continuous_density(b) * b); };
        out += quad::integrate(integrand, p.support_lo(), p.support_hi(), opt).value;
    }
    return FockDensityMatrix(std::move(out), poisson_tail(p.alpha_mag * p.alpha_mag, cutoff));
}

// ------------------------------------------------------------ number input

/// 2 Gamma n e^{-2 Gamma n t1}.
inline double number_jump_density(int n, double gamma, double t1) {
    if (n < 0) throw DomainError("number_jump_density: n must be >= 0");
    if (!(t1 >= 0.0)) throw DomainError("number_jump_density: t1 must be >= 0");
    return 2.0 * gamma * n * std::exp(-2.0 * gamma * n * t1);
}

/// e^{-2 n Gamma t}|n><n| + (1 - e^{-2 n Gamma t})|n-1><n-1| in a basis of
/// size cutoff + 1 (cutoff defaults to n). For n = 0 the vacuum is returned.
inline FockDensityMatrix number_unconditional(int n, double gamma, double t, int cutoff = -1) {
    if (n < 0) throw DomainError("number_unconditional: n must be >= 0");
    if (cutoff < 0) cutoff = std::max(n, 1);
    if (cutoff < n) throw DomainError("number_unconditional: cutoff below n");
    Matrix m = Matrix::Zero(cutoff + 1, cutoff + 1);
    if (n == 0) {
        m(0, 0) = 1.0;
    } else {
        const double keep = std::exp(-2.0 * n * gamma * t);
        m(n, n) = keep;
        m(n - 1, n - 1) = -std::expm1(-2.0 * n * gamma * t);
    }
    return FockDensityMatrix(std::move(m));
}

// ------------------------------------------------------- photon statistics

/// p_n(t) = e^{-2 n Gamma t} p_n(0) + (1 - e^{-2 (n+1) Gamma t}) p_{n+1}(0).
/// Level n+1 empties into n at rate 2 Gamma (n+1), which keeps the trace.
inline PhotonNumberDistribution statistics_at_time(const PhotonNumberDistribution &p_in, double gamma, double t) {
    if (!(t >= 0.0)) throw DomainError("statistics_at_time: t must be >= 0");
    PhotonNumberDistribution out;
    out.probs.resize(p_in.probs.size());
    for (int n = 0; n <= p_in.cutoff(); ++n) {
        const double stay = -2.0 * n * gamma * t;
        const double feed = -2.0 * (n + 1) * gamma * t;
        out.probs[static_cast<std::size_t>(n)] = std::exp(stay) * p_in.at(n) - std::expm1(feed) * p_in.at(n + 1);
    }
    out.tail_mass_bound = p_in.tail_mass_bound;
    return out;
}

/// p_n(inf) = p_{n+1}(0) + p_0(0) delta_{n,0}.
inline PhotonNumberDistribution asymptotic_distribution(const PhotonNumberDistribution &p_in) {
    PhotonNumberDistribution out;
    out.probs.resize(p_in.probs.size());
    for (int n = 0; n <= p_in.cutoff(); ++n) out.probs[static_cast<std::size_t>(n)] = p_in.at(n + 1);
    out.probs[0] += p_in.at(0);
    out.tail_mass_bound = p_in.tail_mass_bound;
    return out;
}

/// Long-time moments from the input moments and vacuum probability:
///   mean(inf)   = mean(0) + p0 - 1
///   var(inf)    = var(0) - p0 [mean(0) + mean(inf)]
///   :var:(inf)  = :var:(0) + 1 - p0 [2 mean(0) + p0]
inline Moments asymptotic_moments(const PhotonNumberDistribution &p_in) {
    const Moments m0 = moments(p_in);
    const double p0 = p_in.at(0);
    Moments m;
    m.mean = m0.mean + p0 - 1.0;
    m.variance = m0.variance - p0 * (m0.mean + m.mean);
    m.normally_ordered_variance = m0.normally_ordered_variance + 1.0 - p0 * (2.0 * m0.mean + p0);
    return m;
}

/// Two-point input p0 |0><0| + (1 - p0) |N><N| and the integers N for which
/// it is super-Poissonian on input and sub-Poissonian after adaptive
/// absorption.
struct SubPoissonianWindow {
    double p0 = 0.5;
    /// Inclusive range of N, empty when no integer qualifies.
    std::optional<std::pair<int, int>> window;

    /// N (1 - p0)(N p0 - 1).
    double input_nov(int n) const { return n * (1.0 - p0) * (n * p0 - 1.0); }
    /// (N - 1)(1 - p0)[(N - 1) p0 - 1].
    double output_nov(int n) const { return (n - 1) * (1.0 - p0) * ((n - 1) * p0 - 1.0); }
};

inline SubPoissonianWindow sub_poissonian_window(double p0) {
    if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("sub_poissonian_window: p0 must lie in (0, 1)");
    SubPoissonianWindow w;
    w.p0 = p0;
    // Both conditions hold only for 1/p0 < N < 1/p0 + 1.
    const int lo = std::max(1, static_cast<int>(std::floor(1.0 / p0)) - 1);
    const int hi = static_cast<int>(std::ceil(1.0 / p0)) + 2;
    for (int n = lo; n <= hi; ++n) {
        if (w.input_nov(n) > 0.0 && w.output_nov(n) < 0.0) {
            if (!w.window) {
                w.window = std::make_pair(n, n);
            } else {
                w.window->second = n;
            }
        }
    }
    return w;
}

// ------------------------------------------------ adaptive map, elementwise

/// Unconditional adaptive-absorption state in closed form. The map acts
/// elementwise, so each element is an exponential integral:
///   rho(m, m') = e^{-Gamma (m+m') t} rho0(m, m')
///              + 2 sqrt((m+1)(m'+1)) (1 - e^{-Gamma (m+m'+2) t}) / (m+m'+2) rho0(m+1, m'+1).
inline FockDensityMatrix adaptive_state_closed_form(const FockDensityMatrix &rho0, double gamma, double t) {
    const Matrix &r = rho0.elements();
    const Eigen::Index d = r.rows();
    Matrix out(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            Complex v = std::exp(-gamma * static_cast<double>(i + j) * t) * r(i, j);
            if (i + 1 < d && j + 1 < d) {
                const double k = static_cast<double>(i + j + 2);
                v += 2.0 * std::sqrt(static_cast<double>((i + 1) * (j + 1))) * (-std::expm1(-gamma * k * t)) / k *
                     r(i + 1, j + 1);
            }
            out(i, j) = v;
        }
    }
    return FockDensityMatrix(std::move(out), rho0.tail_mass_bound());
}

}  // namespace adabs::analytic
