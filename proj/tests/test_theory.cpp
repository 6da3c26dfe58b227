// SPDX-License-Identifier: Apache-2.0
//
// beamlearn: decentralized interference-aware beam codebook learning
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace beamlearn;
using namespace testing_support;

namespace
{
    CMatrix random_hermitian(std::size_t n, Rng &rng)
    {
        CMatrix A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            A.col(c) = random_cvector(n, rng);
        return (A + A.adjoint()) / 2.0;
    }

    std::vector<double> eigen_oracle(const CMatrix &A)
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
        std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        std::sort(v.rbegin(), v.rend());
        return v;
    }

    // E|w^H H f|^2 by enumerating every transmit beam.
    double exhaustive(const CVector &w, const InterferenceChannel &ch, const PhaseSet &phases)
    {
        const CMatrix H = synth_interference_matrix(ch);
        const CVector wH = H.adjoint() * w;
        const auto beams = all_beams(ch.tx_geometry.num_antennas, phases);
        double acc = 0;
        for (const auto &f : beams)
            acc += std::norm(wH.dot(f.vector()));
        return acc / static_cast<double>(beams.size());
    }
}

TEST(Linalg, HermitianEigenvaluesMatchEigen)
{
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t n = random_size(rng, 1, 9);
        const CMatrix A = random_hermitian(n, rng);
        const auto got = hermitian_eigenvalues(A);
        const auto want = eigen_oracle(A);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(got[i], want[i], 1e-9 * (1 + std::abs(want[i])));
        EXPECT_NEAR(hermitian_spectral_norm(A), std::max(std::abs(want.front()), std::abs(want.back())), 1e-9 * (1 + std::abs(want.front())));
    }
}

TEST(Linalg, SymmetricEigenvaluesOfKnownMatrix)
{
    Eigen::MatrixXd A(2, 2);
    A << 2, 1, 1, 2;
    const auto ev = symmetric_eigenvalues(A);
    EXPECT_NEAR(ev[0], 3.0, 1e-12);
    EXPECT_NEAR(ev[1], 1.0, 1e-12);
}

TEST(Projection, PiIsHermitianWithZeroDiagonal)
{
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ArrayGeometry g{random_size(rng, 2, 32), 0.5, 'x'};
        const auto ch = random_interference_channel(g, random_size(rng, 1, 5), rng);
        const auto p = build_projection(random_beam(g.num_antennas, PhaseSet(4), rng), ch);
        EXPECT_LT((p.pi - p.pi.adjoint()).norm(), 1e-12);
        for (Eigen::Index i = 0; i < p.pi.rows(); ++i)
            EXPECT_EQ(p.pi(i, i), cdouble(0.0));
        for (Eigen::Index i = 0; i < p.pi.rows(); ++i)
            for (Eigen::Index k = 0; k < p.pi.cols(); ++k)
                EXPECT_LE(std::abs(p.pi(i, k)), 1.0 + 1e-12); // unit steering vectors
    }
}

// The closed form is exact for i.i.d. uniform phases, so full enumeration must agree to round-off.
TEST(ClosedForm, MatchesExhaustiveEnumeration)
{
    Rng rng(3);
    for (unsigned r : {1u, 2u})
    {
        const PhaseSet phases(r);
        const ArrayGeometry g{r == 1 ? 8u : 4u, 0.5, 'x'};
        for (int trial = 0; trial < 20; ++trial)
        {
            const auto ch = random_interference_channel(g, random_size(rng, 1, 4), rng);
            const QuantizedBeam w = random_beam(g.num_antennas, PhaseSet(4), rng);
            const double want = exhaustive(w.vector(), ch, phases);
            EXPECT_NEAR(expected_interference_closed_form(build_projection(w, ch)), want, 1e-10 * (1 + want));
        }
    }
}

TEST(ClosedForm, SinglePathReducesToNormOverM)
{
    Rng rng(4);
    const ArrayGeometry g{16, 0.5, 'x'};
    const auto ch = random_interference_channel(g, 1, rng);
    const auto p = build_projection(random_beam(16, PhaseSet(4), rng), ch);
    EXPECT_NEAR(expected_interference_closed_form(p), p.xi_norm2() / 16.0, 1e-12 * (1 + p.xi_norm2()));
    EXPECT_NEAR(eta_resolution(p), 1.0, 1e-12);
}

TEST(Eta, MatchesEigenOracle)
{
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial)
    {
        const ArrayGeometry g{random_size(rng, 4, 64), 0.5, 'x'};
        const auto ch = random_interference_channel(g, random_size(rng, 1, 3), rng);
        const auto p = build_projection(random_beam(g.num_antennas, PhaseSet(4), rng), ch);
        const auto ev = eigen_oracle(p.identity_plus_pi());
        if (ev.back() < 1e-6)
            continue;
        const auto pn = eigen_oracle(p.pi);
        const double norm = std::max(std::abs(pn.front()), std::abs(pn.back()));
        EXPECT_NEAR(eta_resolution(p), ev.back() / (1 + norm), 1e-9);
        EXPECT_LE(eta_resolution(p), 1.0 + 1e-12);
        // lambda_min(I + Pi) >= 1 - ||Pi|| gives eta >= eta'
        EXPECT_GE(eta_resolution(p), eta_prime(norm) - 1e-12);
    }
}

TEST(Eta, PrimeFormula)
{
    EXPECT_DOUBLE_EQ(eta_prime(0.0), 1.0);
    EXPECT_DOUBLE_EQ(eta_prime(1.0), 0.0);
    EXPECT_DOUBLE_EQ(eta_prime(0.5), 1.0 / 3.0);
}

// I + Pi is singular here; rounding decides whether the smallest eigenvalue lands just above or below zero
TEST(Eta, DegeneratesWhenPathsCoincide)
{
    const ArrayGeometry g{8, 0.5, 'x'};
    InterferenceChannel ch{{}, g, g};
    ch.paths.push_back({1.0, 0.7, pi / 2, 1.1, pi / 2});
    ch.paths.push_back({0.5, 0.9, pi / 2, 1.1, pi / 2}); // same transmit direction: I + Pi singular
    Rng rng(1);
    const auto p = build_projection(random_beam(8, PhaseSet(4), rng), ch);
    try
    {
        EXPECT_LT(eta_resolution(p), 1e-12);
    }
    catch (const NumericalError &)
    {
    }
}

TEST(OrderingCondition, ConditionImpliesOrderingUnderExhaustiveOracle)
{
    Rng rng(6);
    const PhaseSet phases(1);
    const ArrayGeometry g{8, 0.5, 'x'};
    std::size_t checked = 0;
    for (int trial = 0; trial < 400; ++trial)
    {
        const auto ch = random_interference_channel(g, random_size(rng, 2, 4), rng);
        const QuantizedBeam a = random_beam(8, PhaseSet(4), rng), b = random_beam(8, PhaseSet(4), rng);
        const auto pa = build_projection(a, ch), pb = build_projection(b, ch);
        if (hermitian_eigenvalues(pa.identity_plus_pi()).back() < 1e-9)
            continue;
        const auto c = check_ordering_condition(pa, pb);
        if (!c.condition_holds)
            continue;
        ++checked;
        EXPECT_LT(exhaustive(a.vector(), ch, phases), exhaustive(b.vector(), ch, phases));
        EXPECT_TRUE(c.ordering_holds);
    }
    EXPECT_GT(checked, 20u);
}

TEST(OrderingCondition, RejectsDifferentChannels)
{
    Rng rng(7);
    const ArrayGeometry g{8, 0.5, 'x'};
    const auto c1 = random_interference_channel(g, 2, rng), c2 = random_interference_channel(g, 2, rng);
    const QuantizedBeam w = random_beam(8, PhaseSet(4), rng);
    EXPECT_THROW(check_ordering_condition(build_projection(w, c1), build_projection(w, c2)), ConfigError);
}

TEST(Bounds, HoldOnRandomProjections)
{
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial)
    {
        const ArrayGeometry g{random_size(rng, 2, 32), 0.5, 'x'};
        const auto ch = random_interference_channel(g, random_size(rng, 1, 4), rng);
        const auto r = check_bounds(build_projection(random_beam(g.num_antennas, PhaseSet(3), rng), ch));
        EXPECT_TRUE(r.holds()) << "weyl " << r.weyl_margin << " lower " << r.lower_margin << " upper " << r.upper_margin;
        EXPECT_LE(r.rayleigh_lower, r.rayleigh_upper + 1e-12);
    }
}

TEST(Bounds, ViolationIsDetected)
{
    BoundReport r;
    r.pi_norm = 0.1;
    r.weyl_margin = -0.5;
    EXPECT_FALSE(r.holds());
}

TEST(Asymptotics, MedianNormShrinksWithArraySize)
{
    Rng rng(9);
    const std::vector<std::size_t> Ms{16, 64, 256};
    const auto rows = pi_norm_asymptotics(Ms, 2, 100, rng);
    ASSERT_EQ(rows.size(), 300u);
    std::vector<double> med;
    for (std::size_t M : Ms)
    {
        std::vector<double> v;
        for (const auto &r : rows)
            if (r.M == M)
            {
                v.push_back(r.pi_norm2);
                EXPECT_NEAR(r.eta_prime, eta_prime(r.pi_norm2), 1e-15);
            }
        med.push_back(median(v));
    }
    EXPECT_GT(med[0], med[1]);
    EXPECT_GT(med[1], med[2]);
    EXPECT_THROW(pi_norm_asymptotics(Ms, 2, 0, rng), ConfigError);
}

TEST(Asymptotics, TwoPathNormIsTheCrossCorrelation)
{
    // for L = 2, ||Pi||_2 = |b1^H b2|, which for a ULA is the normalized Dirichlet kernel
    Rng rng(10);
    for (int trial = 0; trial < 50; ++trial)
    {
        Rng a = rng, b = rng;
        const CMatrix P = random_path_coupling(32, 2, a);
        const double t1 = uniform_real(b, 0.0, pi), t2 = uniform_real(b, 0.0, pi);
        const double psi = pi * (std::cos(t1) - std::cos(t2));
        const double dirichlet = std::abs(std::sin(32 * psi / 2) / (32 * std::sin(psi / 2)));
        EXPECT_NEAR(hermitian_spectral_norm(P), dirichlet, 1e-9);
        rng.discard(7);
    }
}

TEST(Median, OddEvenAndEmpty)
{
    EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
    EXPECT_THROW(median({}), ConfigError);
}

TEST(RatioBounds, RatioStaysInsideSandwich)
{
    Rng rng(11);
    std::size_t tested = 0;
    for (int trial = 0; trial < 300; ++trial)
    {
        const ArrayGeometry g{64, 0.5, 'x'};
        const auto ch = random_interference_channel(g, 2, rng);
        const auto pa = build_projection(random_beam(64, PhaseSet(4), rng), ch);
        const auto pb = build_projection(random_beam(64, PhaseSet(4), rng), ch);
        const auto r = check_ratio_bounds(pa, pb);
        EXPECT_TRUE(r.within_bound);
        if (r.pi_norm < 1.0)
        {
            ++tested;
            EXPECT_LE(r.gap, r.gap_bound * (1 + 1e-9));
        }
    }
    EXPECT_GT(tested, 200u);
}

TEST(PathCoupling, EmpiricalMeanVanishes)
{
    Rng rng(12);
    const ArrayGeometry g{16, 0.5, 'x'};
    const auto ch = random_interference_channel(g, 3, rng);
    const CVector z = empirical_path_coupling_mean(ch, PhaseSet(4), 50000, rng);
    // each z_l has variance 1/M per draw
    EXPECT_LT(z.cwiseAbs().maxCoeff(), 5.0 * std::sqrt(1.0 / 16.0 / 50000.0) * 2);
}

TEST(Audit, SmallRunsAreClean)
{
    Rng rng(13);
    const ArrayGeometry g{16, 0.5, 'x'};
    for (const auto &c : closed_form_audit(g, PhaseSet(4), 6, 3, 20000, rng))
        EXPECT_LT(c.rel_error, 0.05) << "L=" << c.L;
    const auto o = ordering_audit(g, PhaseSet(4), 500, 4, rng);
    EXPECT_EQ(o.pairs, 500u);
    EXPECT_EQ(o.violations, 0u);
    const auto b = bound_audit(g, PhaseSet(4), 500, 4, rng);
    EXPECT_EQ(b.weyl_violations, 0u);
    EXPECT_EQ(b.rayleigh_violations, 0u);
}
