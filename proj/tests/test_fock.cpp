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

#include "adabs/fock.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace adabs;

TEST(Fock, vacuum_from_zero_amplitude) {
    const auto rho = coherent_state(0.0, 4);
    EXPECT_EQ(rho.dim(), 5);
    EXPECT_DOUBLE_EQ(rho.population(0), 1.0);
    EXPECT_EQ(rho.tail_mass_bound(), 0.0);
    EXPECT_NEAR(trace_distance(rho, number_state(0, 4)), 0.0, 1e-15);
}

TEST(Fock, coherent_state_is_poissonian) {
    const auto rho = coherent_state(1.0, 20);
    EXPECT_NEAR(rho.population(0), 0.36787944117144233, 1e-15);
    double factorial = 1.0;
    for (int n = 0; n <= 20; ++n) {
        if (n > 0) factorial *= n;
        EXPECT_NEAR(rho.population(n), std::exp(-1.0) / factorial, 1e-12) << "n=" << n;
    }
    EXPECT_NEAR(rho.purity(), 1.0, 1e-10);
    EXPECT_TRUE(validate_state(rho).ok());
}

TEST(Fock, coherent_state_tail_is_exact_poisson_remainder) {
    const auto rho = coherent_state(std::polar(2.0, 0.3), 30);
    EXPECT_NEAR(rho.trace() + rho.tail_mass_bound(), 1.0, 1e-14);
    EXPECT_GT(rho.tail_mass_bound(), 0.0);
}

TEST(Fock, coherent_state_truncation_error) {
    EXPECT_THROW(coherent_state(3.0, 10), TruncationError);
    try {
        coherent_state(3.0, 10);
    } catch (const TruncationError &e) {
        EXPECT_GT(e.tail_mass, 1e-12);
    }
    // The caller may accept a larger tail explicitly.
    const auto rho = coherent_state(3.0, 10, 0.5);
    EXPECT_NEAR(rho.trace() + rho.tail_mass_bound(), 1.0, 1e-12);
}

TEST(Fock, number_state) {
    const auto rho = number_state(3, 5);
    for (int n = 0; n <= 5; ++n) EXPECT_EQ(rho.population(n), n == 3 ? 1.0 : 0.0);
    EXPECT_EQ(rho.tail_mass_bound(), 0.0);
    EXPECT_DOUBLE_EQ(moments(rho).mean, 3.0);
    EXPECT_THROW(number_state(6, 5), DomainError);
    EXPECT_THROW(number_state(-1, 5), DomainError);
}

TEST(Fock, moments_of_canonical_states) {
    const Moments coh = moments(coherent_state(1.0, 30));
    EXPECT_NEAR(coh.mean, 1.0, 1e-12);
    EXPECT_NEAR(coh.normally_ordered_variance, 0.0, 1e-9);

    const Moments num = moments(number_state(3, 6));
    EXPECT_DOUBLE_EQ(num.variance, 0.0);
    EXPECT_DOUBLE_EQ(num.normally_ordered_variance, -3.0);

    PhotonNumberDistribution two;
    two.probs = {0.4, 0.0, 0.0, 0.6};
    const Moments m = moments(two);
    EXPECT_NEAR(m.mean, 1.8, 1e-15);
    EXPECT_NEAR(m.variance, 2.16, 1e-14);
    EXPECT_NEAR(m.normally_ordered_variance, 0.36, 1e-14);
    // N (1 - p0)(N p0 - 1) with N = 3, p0 = 0.4
    EXPECT_NEAR(m.normally_ordered_variance, 3 * 0.6 * (3 * 0.4 - 1), 1e-14);
}

TEST(Fock, moments_ignore_global_phase) {
    const Moments a = moments(coherent_state(1.3, 30));
    for (double phi : {0.5, 1.7, std::numbers::pi}) {
        const Moments b = moments(coherent_state(std::polar(1.3, phi), 30));
        EXPECT_NEAR(a.mean, b.mean, 1e-13);
        EXPECT_NEAR(a.variance, b.variance, 1e-12);
    }
}

TEST(Fock, trace_distance_examples) {
    const auto vac = number_state(0, 3);
    const auto one = number_state(1, 3);
    EXPECT_NEAR(trace_distance(vac, vac), 0.0, 1e-15);
    EXPECT_NEAR(trace_distance(vac, one), 1.0, 1e-15);
    Matrix mix = Matrix::Zero(4, 4);
    mix(0, 0) = 0.5;
    mix(1, 1) = 0.5;
    EXPECT_NEAR(trace_distance(vac, FockDensityMatrix(mix)), 0.5, 1e-15);
    EXPECT_THROW(trace_distance(vac, number_state(0, 4)), DomainError);
}

TEST(Fock, validate_state_flags_violations) {
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = 1.2;
    bad(1, 1) = -0.2;
    const StateCheck c = validate_state(FockDensityMatrix(bad));
    EXPECT_LT(c.min_eigenvalue, -0.1);
    EXPECT_FALSE(c.ok());
}

TEST(Fock, params_validation) {
    AbsorberParams p;
    EXPECT_NO_THROW(p.validate());
    p.gamma = 0.0;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.quad_tol = 0.1;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.cutoff = 0;
    EXPECT_THROW(p.validate(), DomainError);
}
