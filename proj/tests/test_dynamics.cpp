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

#include "adabs/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adabs/quadrature.hpp"
#include "test_util.hpp"

using namespace adabs;

namespace {

AbsorberParams params_with(double gamma, int cutoff) {
    AbsorberParams p;
    p.gamma = gamma;
    p.cutoff = cutoff;
    return p;
}

FockDensityMatrix random_mixed_state(std::mt19937_64 &rng, int dim) {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return FockDensityMatrix(rho / rho.trace().real());
}

}  // namespace

TEST(JumpMap, vacuum_gives_zero_branch) {
    const Branch b = jump_map(number_state(0, 4));
    EXPECT_EQ(b.norm, 0.0);
    EXPECT_EQ(b.state.elements().cwiseAbs().maxCoeff(), 0.0);
}

TEST(JumpMap, number_state_loses_one_photon) {
    const Branch b = jump_map(number_state(3, 5));
    EXPECT_DOUBLE_EQ(b.norm, 3.0);
    EXPECT_NEAR(trace_distance(b.state, number_state(2, 5)), 0.0, 1e-15);
    EXPECT_NEAR(b.unnormalized().population(2), 3.0, 1e-15);
}

TEST(JumpMap, coherent_state_is_eigenstate) {
    const Complex alpha = std::polar(1.2, 0.4);
    const auto rho = coherent_state(alpha, 40);
    const Branch b = jump_map(rho);
    EXPECT_NEAR(b.norm, std::norm(alpha), 1e-12);
    EXPECT_LT(trace_distance(b.state, rho), 1e-12);
}

TEST(JumpMap, last_row_and_column_vanish) {
    std::mt19937_64 rng(7);
    const Matrix out = apply_jump(random_mixed_state(rng, 5).elements());
    EXPECT_EQ(out.row(4).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(out.col(4).cwiseAbs().maxCoeff(), 0.0);
}

TEST(NoJump, zero_step_is_identity) {
    const auto rho = coherent_state(0.7, 20);
    const Branch b = no_jump_propagate(rho, params_with(1.0, 20), 0.0);
    EXPECT_NEAR(b.norm, rho.trace(), 1e-15);
    EXPECT_LT(trace_distance(b.unnormalized(), rho), 1e-15);
}

TEST(NoJump, number_state_survival) {
    const Branch b = no_jump_propagate(number_state(2, 4), params_with(0.5, 4), 1.0);
    EXPECT_NEAR(b.norm, 0.1353352832366127, 1e-15);
    EXPECT_NEAR(b.state.population(2), 1.0, 1e-15);
}

TEST(NoJump, coherent_amplitude_decays) {
    const Complex alpha = std::polar(1.5, -0.8);
    const double g = 0.7, dt = 0.9;
    const Branch b = no_jump_propagate(coherent_state(alpha, 40), params_with(g, 40), dt);
    EXPECT_NEAR(b.norm, std::exp(-std::norm(alpha) * (1.0 - std::exp(-2.0 * g * dt))), 1e-12);
    EXPECT_LT(trace_distance(b.state, coherent_state(alpha * std::exp(-g * dt), 40)), 1e-12);
}

TEST(NoJump, rejects_negative_step) {
    EXPECT_THROW(no_jump_propagate(number_state(1, 2), params_with(1, 2), -1e-3), DomainError);
}

TEST(MasterEvolve, zero_time_is_identity) {
    const auto rho = coherent_state(0.5, 10);
    EXPECT_EQ(trace_distance(master_evolve(rho, params_with(1, 10), 0.0), rho), 0.0);
}

TEST(MasterEvolve, coherent_stays_coherent) {
    const Complex alpha = std::polar(2.0, 1.1);
    const double g = 0.3, t = 1.7;
    const auto out = master_evolve(coherent_state(alpha, 40), params_with(g, 40), t);
    EXPECT_LT(trace_distance(out, coherent_state(alpha * std::exp(-g * t), 40)), 1e-12);
}

TEST(MasterEvolve, number_state_is_binomial) {
    const double g = 1.0;
    const double t = std::log(2.0) / (2.0 * g);  // eta = 1/2
    const auto out = master_evolve(number_state(2, 2), params_with(g, 2), t);
    EXPECT_NEAR(out.population(0), 0.25, 1e-15);
    EXPECT_NEAR(out.population(1), 0.5, 1e-15);
    EXPECT_NEAR(out.population(2), 0.25, 1e-15);
}

TEST(MasterEvolve, preserves_trace) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_mixed_state(rng, 8);
        for (double t : {0.01, 0.5, 3.0}) {
            EXPECT_NEAR(master_evolve(rho, params_with(1.3, 7), t).trace(), 1.0, 1e-12);
        }
    }
}

TEST(MasterEvolve, no_jump_trace_is_nonincreasing) {
    std::mt19937_64 rng(12);
    const auto rho = random_mixed_state(rng, 6);
    double last = 1.0;
    for (double t = 0.0; t <= 4.0; t += 0.25) {
        const double tr = no_jump_propagate(rho, params_with(0.8, 5), t).norm;
        EXPECT_LE(tr, last + 1e-15);
        last = tr;
    }
}

// Closed-form Kraus sum against the jump (Dyson) expansion, whose nested time
// integrals are evaluated exactly as convolutions of exponentials.
TEST(MasterEvolve, matches_jump_expansion) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rho = random_mixed_state(rng, 7);
        for (double t : {0.1, 0.8, 2.5}) {
            const Matrix dyson = test_oracles::dyson_damped_state(rho.elements(), 0.9, t);
            const auto kraus = master_evolve(rho, params_with(0.9, 6), t);
            EXPECT_LT(trace_distance(kraus, FockDensityMatrix(dyson)), 1e-12) << "t=" << t;
        }
    }
}

// d rho/dt = 2G(J + L) rho: one step of master_evolve equals the no-jump
// branch plus 2 G dt J rho up to O(dt^2).
TEST(MasterEvolve, splits_into_jump_and_no_jump_parts) {
    std::mt19937_64 rng(14);
    const auto rho = random_mixed_state(rng, 6);
    const double g = 1.1;
    auto residual = [&](double dt) {
        const Matrix exact = master_evolve(rho, params_with(g, 5), dt).elements();
        const Matrix split = apply_no_jump(rho.elements(), g, dt) + 2.0 * g * dt * apply_jump(rho.elements());
        return trace_norm(exact - split);
    };
    const double r3 = residual(1e-3), r4 = residual(1e-4);
    EXPECT_LT(r3, 1e-4);
    EXPECT_NEAR(r3 / r4, 100.0, 5.0);
}

TEST(LossChannel, rejects_out_of_range_eta) {
    EXPECT_THROW(LossChannel(-0.1), DomainError);
    EXPECT_THROW(LossChannel(1.1), DomainError);
}

TEST(BeamSplitter, transmit_distribution) {
    const auto vac = beam_splitter_transmit_distribution(0, 0.3);
    ASSERT_EQ(vac.probs.size(), 1u);
    EXPECT_EQ(vac.probs[0], 1.0);

    const auto full = beam_splitter_transmit_distribution(4, 1.0);
    EXPECT_EQ(full.probs[4], 1.0);
    EXPECT_EQ(full.probs[0], 0.0);

    const auto p = beam_splitter_transmit_distribution(3, 0.25);
    EXPECT_NEAR(p.probs[0], 0.421875, 1e-15);
    EXPECT_NEAR(p.probs[1], 0.421875, 1e-15);
    EXPECT_NEAR(p.probs[2], 0.140625, 1e-15);
    EXPECT_NEAR(p.probs[3], 0.015625, 1e-15);

    EXPECT_THROW(beam_splitter_transmit_distribution(3, 1.5), DomainError);
}

TEST(BeamSplitter, agrees_with_damped_number_state) {
    const double g = 0.6, t = 0.4;
    const double eta = std::exp(-2.0 * g * t);
    const auto out = master_evolve(number_state(5, 5), params_with(g, 5), t);
    const auto p = beam_splitter_transmit_distribution(5, eta);
    for (int m = 0; m <= 5; ++m) EXPECT_NEAR(out.population(m), p.probs[static_cast<std::size_t>(m)], 1e-14);
}

TEST(JumpTimeDensity, vacuum_never_clicks) {
    for (double t : {0.0, 0.3, 5.0}) EXPECT_EQ(jump_time_density(number_state(0, 3), params_with(1, 3), t), 0.0);
}

TEST(JumpTimeDensity, number_state_is_exponential) {
    const double g = 0.75;
    for (int n : {1, 2, 5}) {
        for (double t : {0.0, 0.2, 1.3}) {
            EXPECT_NEAR(jump_time_density(number_state(n, 6), params_with(g, 6), t),
                        2.0 * g * n * std::exp(-2.0 * g * n * t), 1e-14);
        }
    }
}

TEST(JumpTimeDensity, coherent_state_formula) {
    const Complex alpha = std::polar(1.4, 0.2);
    const double g = 1.0, a2 = std::norm(alpha);
    const auto rho = coherent_state(alpha, 40);
    for (double t : {0.0, 0.1, 0.5, 1.0, 3.0}) {
        const double expect = 2 * g * a2 * std::exp(-2 * g * t) * std::exp(-a2 * (1 - std::exp(-2 * g * t)));
        EXPECT_NEAR(jump_time_density(rho, params_with(g, 40), t), expect, 1e-12);
    }
}

TEST(JumpTimeDensity, integrates_with_survival_to_one) {
    std::mt19937_64 rng(21);
    const auto p = test_oracles::random_pmf(rng, 10);
    const auto rho = diagonal_state(p);
    for (double gamma_t : {0.1, 1.0, 10.0}) {
        const double g = 2.0, T = gamma_t / g;
        const auto prm = params_with(g, 10);
        auto f = [&](double t) { return jump_time_density(rho, prm, t); };
        const double integral = quad::integrate(f, 0.0, T).value;
        EXPECT_NEAR(integral + survival_probability(rho, g, T), 1.0, 1e-8);
    }
}
