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

// fock.hpp — truncated single-mode density matrices, constructors, and
// photon-statistics functionals.

#pragma once

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adabs/errors.hpp"

namespace adabs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Absorber coupling and numerical settings shared by the dynamics and
/// adaptive modules. Times are in the same units as 1/gamma.
struct AbsorberParams {
    double gamma = 1.0;      ///< coupling rate
    int cutoff = 20;         ///< Fock cutoff N_max, basis is |0>..|N_max>
    double quad_tol = 1e-12; ///< relative quadrature tolerance
    double root_tol = 1e-12; ///< absolute jump-time tolerance

    void validate() const {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw DomainError("AbsorberParams: gamma must be positive and finite");
        }
        if (cutoff < 1) {
            throw DomainError("AbsorberParams: cutoff must be >= 1");
        }
        if (!(quad_tol > 0.0 && quad_tol <= 1e-2)) {
            throw DomainError("AbsorberParams: quad_tol must lie in (0, 1e-2]");
        }
        if (!(root_tol > 0.0 && root_tol <= 1e-2)) {
            throw DomainError("AbsorberParams: root_tol must lie in (0, 1e-2]");
        }
    }
};

/// Density matrix of one bosonic mode in the basis |0>..|N_max>.
///
/// The matrix may be unnormalized (a conditional branch) or even zero; the
/// normalized-state invariants are checked by validate_state(). The tail
/// bound is an upper bound on probability that lives above the cutoff.
class FockDensityMatrix {
public:
    FockDensityMatrix() = default;

    explicit FockDensityMatrix(Matrix elements, double tail_mass_bound = 0.0)
        : rho_(std::move(elements)), tail_(tail_mass_bound) {
        if (rho_.rows() != rho_.cols() || rho_.rows() < 1) {
            throw DomainError("FockDensityMatrix: elements must be a non-empty square matrix");
        }
        if (tail_ < 0.0) {
            throw DomainError("FockDensityMatrix: tail_mass_bound must be >= 0");
        }
    }

    static FockDensityMatrix zero(int dim) {
        return FockDensityMatrix(Matrix::Zero(dim, dim));
    }

    int dim() const noexcept { return static_cast<int>(rho_.rows()); }
    int cutoff() const noexcept { return dim() - 1; }
    const Matrix &elements() const noexcept { return rho_; }
    Complex operator()(int n, int m) const { return rho_(n, m); }
    double tail_mass_bound() const noexcept { return tail_; }

    double trace() const { return rho_.diagonal().real().sum(); }
    double population(int n) const { return rho_(n, n).real(); }
    Eigen::VectorXd diagonal() const { return rho_.diagonal().real(); }

    double purity() const { return (rho_ * rho_).trace().real(); }

    FockDensityMatrix normalized() const {
        const double tr = trace();
        if (!(tr > 0.0)) {
            throw DomainError("FockDensityMatrix: cannot normalize a zero-trace matrix");
        }
        return FockDensityMatrix(rho_ / tr, tail_ / tr);
    }

    FockDensityMatrix scaled(double w) const {
        return FockDensityMatrix(rho_ * w, tail_ * std::abs(w));
    }

    FockDensityMatrix with_tail(double tail) const { return FockDensityMatrix(rho_, tail); }

private:
    Matrix rho_ = Matrix::Zero(1, 1);
    double tail_ = 0.0;
};

/// A conditional branch: normalized state plus its probability (or
/// probability density, depending on the producer).
struct Branch {
    FockDensityMatrix state;
    double norm = 0.0;

    /// The branch before normalization, norm * state.
    FockDensityMatrix unnormalized() const { return state.scaled(norm); }
};

/// Wraps an unnormalized matrix into a Branch; a zero matrix gives norm 0
/// and keeps the zero matrix as its state.
inline Branch make_branch(Matrix unnormalized, double tail = 0.0) {
    const double norm = unnormalized.diagonal().real().sum();
    if (norm > 0.0) {
        return {FockDensityMatrix(unnormalized / norm, tail / norm), norm};
    }
    return {FockDensityMatrix(std::move(unnormalized), tail), 0.0};
}

struct PhotonNumberDistribution {
    std::vector<double> probs;
    double tail_mass_bound = 0.0;

    int cutoff() const { return static_cast<int>(probs.size()) - 1; }
    double at(int n) const {
        return (n >= 0 && n < static_cast<int>(probs.size())) ? probs[static_cast<std::size_t>(n)] : 0.0;
    }
    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

    void validate(double tol = 1e-9) const {
        if (probs.empty()) {
            throw DomainError("PhotonNumberDistribution: empty");
        }
        for (double p : probs) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw DomainError("PhotonNumberDistribution: probabilities must be finite and >= 0");
            }
        }
        if (tail_mass_bound < 0.0) {
            throw DomainError("PhotonNumberDistribution: negative tail bound");
        }
        const double s = total() + tail_mass_bound;
        if (std::abs(s - 1.0) > tol) {
            throw DomainError("PhotonNumberDistribution: probabilities plus tail must sum to 1, got " +
                              std::to_string(s));
        }
    }
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double normally_ordered_variance = 0.0;
};

// ------------------------------------------------------------------ states

/// Probability that a Poisson variable of mean `mean` exceeds `cutoff`.
inline double poisson_tail(double mean, int cutoff) {
    if (mean <= 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(cutoff) + 1.0, mean);
}

/// Fock amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..cutoff.
inline Eigen::VectorXcd coherent_amplitudes(Complex alpha, int cutoff) {
    Eigen::VectorXcd c(cutoff + 1);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= cutoff; ++n) {
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    }
    return c;
}

/// |alpha><alpha| truncated at `cutoff`. Amplitudes are not renormalized; the
/// exact Poisson tail is stored instead. Throws TruncationError when that tail
/// exceeds `max_tail`.
inline FockDensityMatrix coherent_state(Complex alpha, int cutoff, double max_tail = 1e-12) {
    if (cutoff < 0) throw DomainError("coherent_state: cutoff must be >= 0");
    const double tail = poisson_tail(std::norm(alpha), cutoff);
    if (tail > max_tail) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "coherent_state: cutoff %d leaves Poisson tail %.3g above tolerance %.3g",
                      cutoff, tail, max_tail);
        throw TruncationError(msg, tail);
    }
    const Eigen::VectorXcd c = coherent_amplitudes(alpha, cutoff);
    return FockDensityMatrix(c * c.adjoint(), tail);
}

inline FockDensityMatrix number_state(int n, int cutoff) {
    if (n < 0 || n > cutoff) {
        throw DomainError("number_state: need 0 <= n <= cutoff, got n=" + std::to_string(n) +
                          " cutoff=" + std::to_string(cutoff));
    }
    Matrix m = Matrix::Zero(cutoff + 1, cutoff + 1);
    m(n, n) = 1.0;
    return FockDensityMatrix(std::move(m));
}

/// Diagonal (phase-averaged) state with the given photon-number distribution.
inline FockDensityMatrix diagonal_state(const PhotonNumberDistribution &p) {
    const int dim = static_cast<int>(p.probs.size());
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = p.probs[static_cast<std::size_t>(n)];
    return FockDensityMatrix(std::move(m), p.tail_mass_bound);
}

inline PhotonNumberDistribution photon_distribution(const FockDensityMatrix &rho) {
    PhotonNumberDistribution p;
    p.probs.resize(static_cast<std::size_t>(rho.dim()));
    for (int n = 0; n < rho.dim(); ++n) p.probs[static_cast<std::size_t>(n)] = rho.population(n);
    p.tail_mass_bound = rho.tail_mass_bound();
    return p;
}

// ------------------------------------------------------------- functionals

inline Moments moments(std::span<const double> probs) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t n = 0; n < probs.size(); ++n) {
        const double dn = static_cast<double>(n);
        m1 += dn * probs[n];
        m2 += dn * dn * probs[n];
    }
    const double var = m2 - m1 * m1;
    return {m1, var, var - m1};
}

inline Moments moments(const PhotonNumberDistribution &p) { return moments(std::span<const double>(p.probs)); }

inline Moments moments(const FockDensityMatrix &rho) {
    const Eigen::VectorXd d = rho.diagonal();
    return moments(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())));
}

/// Sum of singular values of a Hermitian matrix.
inline double trace_norm(const Matrix &hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

/// Half the trace norm of a - b.
inline double trace_distance(const FockDensityMatrix &a, const FockDensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw DomainError("trace_distance: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()) + ")");
    }
    return 0.5 * trace_norm(a.elements() - b.elements());
}

/// <psi|rho|psi> for a pure reference state given by its amplitudes.
inline double fidelity_with_pure(const FockDensityMatrix &rho, const Eigen::VectorXcd &psi) {
    if (psi.size() != rho.dim()) throw DomainError("fidelity_with_pure: dimension mismatch");
    return (psi.adjoint() * rho.elements() * psi)(0, 0).real();
}

struct StateCheck {
    double hermiticity_error = 0.0;  ///< max |rho - rho^dagger|
    double trace_error = 0.0;        ///< |Tr rho - 1| in excess of the tail bound
    double min_eigenvalue = 0.0;

    bool ok(double herm_tol = 1e-12, double trace_tol = 1e-10, double psd_tol = 1e-10) const {
        return hermiticity_error <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= -psd_tol;
    }
};

/// Measures how far `rho` is from a normalized density matrix.
inline StateCheck validate_state(const FockDensityMatrix &rho) {
    StateCheck c;
    const Matrix &m = rho.elements();
    c.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::max(0.0, std::abs(rho.trace() - 1.0) - rho.tail_mass_bound());
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

}  // namespace adabs
