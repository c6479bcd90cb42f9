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

// quadrature.hpp — globally adaptive 7/15-point Gauss-Kronrod integration of
// scalar- or matrix-valued integrands on a finite interval.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "adabs/errors.hpp"

namespace adabs::quad {

namespace detail {

// Kronrod abscissae (non-negative half) and weights; odd indices are the
// embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double max_abs(double v) { return std::abs(v); }

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived> &v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

template <class V>
struct Segment {
    double a, b;
    V value;
    double error;
    bool operator<(const Segment &o) const { return error < o.error; }
};

template <class V, class F>
Segment<V> kronrod15(const F &f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    V fc = f(center);
    V kronrod = fc * kKronrodWeights[7];
    V gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[static_cast<std::size_t>(i)];
        V lo = f(center - dx);
        V hi = f(center + dx);
        V sum = lo + hi;
        kronrod = kronrod + sum * kKronrodWeights[static_cast<std::size_t>(i)];
        if (i % 2 == 1) gauss = gauss + sum * kGaussWeights[static_cast<std::size_t>(i / 2)];
    }
    V k = kronrod * half;
    V g = gauss * half;
    const double err = max_abs(V(k - g));
    return {a, b, std::move(k), err};
}

}  // namespace detail

template <class V>
struct Result {
    V value;
    double error = 0.0;  ///< estimated absolute error, max-element norm
    int intervals = 0;
};

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
    int max_intervals = 4000;
};

/// Integrates f over [a, b]. The value type V is double or an Eigen matrix;
/// the error is measured elementwise in max norm. Intervals with the largest
/// error estimate are bisected until the summed error drops below
/// max(abs_tol, rel_tol * |I|). Throws QuadratureError with the achieved
/// error when max_intervals is exhausted.
template <class F>
auto integrate(const F &f, double a, double b, const Options &opt = {}) {
    using V = std::decay_t<decltype(f(a))>;
    using detail::Segment;
    if (!(b >= a)) throw DomainError("quad::integrate: need b >= a");

    Segment<V> first = detail::kronrod15<V>(f, a, b);
    if (a == b) return Result<V>{first.value * 0.0, 0.0, 1};

    std::priority_queue<Segment<V>> heap;
    V total = first.value;
    double err = first.error;
    heap.push(std::move(first));
    int intervals = 1;

    auto converged = [&] {
        return err <= std::max(opt.abs_tol, opt.rel_tol * detail::max_abs(total));
    };

    while (!converged()) {
        if (intervals >= opt.max_intervals) {
            throw QuadratureError("quad::integrate: no convergence after " + std::to_string(intervals) +
                                      " intervals, achieved error " + std::to_string(err),
                                  err);
        }
        Segment<V> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment<V> left = detail::kronrod15<V>(f, worst.a, mid);
        Segment<V> right = detail::kronrod15<V>(f, mid, worst.b);
        total = total - worst.value + left.value + right.value;
        err = err - worst.error + left.error + right.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++intervals;
    }

    // Re-sum in interval order so the result does not carry the round-off of
    // the running updates.
    std::vector<Segment<V>> parts;
    parts.reserve(heap.size());
    while (!heap.empty()) {
        parts.push_back(heap.top());
        heap.pop();
    }
    std::sort(parts.begin(), parts.end(), [](const auto &l, const auto &r) { return l.a < r.a; });
    V sum = parts.front().value;
    double err_sum = parts.front().error;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        sum = sum + parts[i].value;
        err_sum += parts[i].error;
    }
    return Result<V>{std::move(sum), err_sum, intervals};
}

}  // namespace adabs::quad
