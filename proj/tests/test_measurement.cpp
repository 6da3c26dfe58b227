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

#include <map>

using namespace beamlearn;
using namespace testing_support;

namespace
{
    // Exact E|w^H H f|^2 over every beam of the phase set.
    double exhaustive_interference(const QuantizedBeam &w, const CMatrix &H, const PhaseSet &phases)
    {
        const auto beams = all_beams(static_cast<std::size_t>(H.cols()), phases);
        double acc = 0;
        for (const auto &f : beams)
            acc += std::norm(w.vector().dot(H * f.vector()));
        return acc / static_cast<double>(beams.size());
    }

    double variance(const std::vector<double> &v)
    {
        const double m = sample_mean(v);
        double s = 0;
        for (double x : v)
            s += (x - m) * (x - m);
        return s / static_cast<double>(v.size() - 1);
    }
}

TEST(MeasureInterference, RandomPolicyMeanMatchesExhaustiveAverage)
{
    Rng rng(17);
    const PhaseSet phases(2);
    for (int trial = 0; trial < 5; ++trial)
    {
        const std::size_t M = 4;
        CMatrix H(4, 4);
        for (Eigen::Index c = 0; c < 4; ++c)
            H.col(c) = random_cvector(M, rng);
        const QuantizedBeam w = random_beam(M, phases, rng);
        const double exact = exhaustive_interference(w, H, phases);
        const auto s = measure_interference(w, H, InterfererPolicy::random_beam(M, phases), 40000, 0.0, rng);
        const double se = std::sqrt(variance(s) / static_cast<double>(s.size()));
        EXPECT_NEAR(sample_mean(s), exact, 5 * se + 1e-12);
    }
}

TEST(MeasureInterference, FixedCodebookDrawsCodebookBeamsUniformly)
{
    Rng rng(2);
    const ArrayGeometry g{8, 0.5, 'x'};
    const Codebook cb = beamsteering_codebook(g, 4, PhaseSet(4));
    const InterfererPolicy pol = InterfererPolicy::fixed_codebook(cb);
    std::vector<std::size_t> counts(4, 0);
    const int n = 40000;
    for (int i = 0; i < n; ++i)
    {
        const QuantizedBeam f = pol.draw(rng);
        const auto it = std::find(cb.begin(), cb.end(), f);
        ASSERT_NE(it, cb.end());
        ++counts[static_cast<std::size_t>(it - cb.begin())];
    }
    double chi2 = 0;
    for (auto c : counts)
        chi2 += (static_cast<double>(c) - n / 4.0) * (static_cast<double>(c) - n / 4.0) / (n / 4.0);
    EXPECT_LT(chi2, 16.27); // 3 dof, p = 0.001
}

TEST(MeasureInterference, RandomPolicyIsUniformPerAntenna)
{
    Rng rng(9);
    const PhaseSet phases(3);
    const InterfererPolicy pol = InterfererPolicy::random_beam(5, phases);
    std::vector<std::vector<double>> counts(5, std::vector<double>(8, 0));
    const int n = 16000;
    for (int i = 0; i < n; ++i)
    {
        const QuantizedBeam f = pol.draw(rng);
        for (std::size_t m = 0; m < 5; ++m)
            ++counts[m][f.indices()[m]];
    }
    for (const auto &row : counts)
    {
        double chi2 = 0;
        for (double c : row)
            chi2 += (c - n / 8.0) * (c - n / 8.0) / (n / 8.0);
        EXPECT_LT(chi2, 24.32); // 7 dof, p = 0.001
    }
}

TEST(MeasureSignalPlusInterference, SingleBeamInterfererIsDeterministic)
{
    Rng rng(4);
    const ArrayGeometry g{8, 0.5, 'x'};
    const Codebook one = beamsteering_codebook(g, 1, PhaseSet(4));
    const QuantizedBeam w = random_beam(8, PhaseSet(4), rng);
    const CVector h = random_cvector(8, rng);
    CMatrix H = CMatrix::Zero(8, 8);
    H.col(0) = random_cvector(8, rng);
    const double S = beamforming_gain(w, h);
    const double I = std::norm(w.vector().dot(H * one[0].vector()));
    for (double v : measure_signal_plus_interference(w, h, H, InterfererPolicy::fixed_codebook(one), 7, 0.0, rng))
        EXPECT_NEAR(v, S + I, 1e-10 * (S + I));
    for (double v : measure_interference(w, H, InterfererPolicy::fixed_codebook(one), 7, 0.0, rng))
        EXPECT_NEAR(v, I, 1e-10 * (I + 1));
}

TEST(MeasureInterference, NoiseAddsItsPower)
{
    Rng rng(6);
    const QuantizedBeam w = random_beam(4, PhaseSet(2), rng);
    const CMatrix H = CMatrix::Zero(4, 4);
    const auto s = measure_interference(w, H, InterfererPolicy::random_beam(4, PhaseSet(2)), 200000, 0.25, rng);
    EXPECT_NEAR(sample_mean(s), 0.25, 0.005);
    for (double v : s)
        EXPECT_GE(v, 0.0);
}

TEST(MeasureInterference, SuperposesSources)
{
    Rng rng(12);
    const ArrayGeometry g{6, 0.5, 'x'};
    const Codebook a = beamsteering_codebook(g, 1, PhaseSet(4));
    const QuantizedBeam fb = random_beam(6, PhaseSet(4), rng);
    const Codebook b({fb});
    const CMatrix H1 = random_cvector(6, rng) * random_cvector(6, rng).adjoint();
    const CMatrix H2 = random_cvector(6, rng) * random_cvector(6, rng).adjoint();
    const std::vector<InterferenceSource> src{{H1, InterfererPolicy::fixed_codebook(a)}, {H2, InterfererPolicy::fixed_codebook(b)}};
    const QuantizedBeam w = random_beam(6, PhaseSet(4), rng);
    const double want = std::norm(w.vector().dot(H1 * a[0].vector())) + std::norm(w.vector().dot(H2 * fb.vector()));
    for (double v : measure_interference(w, src, 3, 0.0, rng))
        EXPECT_NEAR(v, want, 1e-9 * want);
}

TEST(MeasureInterference, Validation)
{
    Rng rng(1);
    const QuantizedBeam w = random_beam(4, PhaseSet(2), rng);
    const InterfererPolicy pol = InterfererPolicy::random_beam(4, PhaseSet(2));
    EXPECT_THROW(measure_interference(w, CMatrix::Zero(4, 4), pol, 0, 0.0, rng), ConfigError);
    EXPECT_THROW(measure_interference(w, CMatrix::Zero(5, 4), pol, 3, 0.0, rng), DimensionError);
    EXPECT_THROW(measure_signal_plus_interference(w, CVector::Ones(4), CMatrix::Zero(4, 4), pol, 0, 0.0, rng), ConfigError);
}

TEST(Estimators, HandComputedExample)
{
    MeasurementSet ms;
    ms.interference_samples = {1.0, 3.0};              // mean 2
    ms.signal_plus_interference_samples = {7.0, 9.0, 8.0}; // mean 8
    EXPECT_DOUBLE_EQ(estimate_gain(ms), 6.0);
    // (2*2 + 3*8 - 3*6) / 5
    EXPECT_DOUBLE_EQ(estimate_expected_interference(ms, 6.0), 2.0);
    MeasurementSet empty;
    EXPECT_THROW(estimate_gain(empty), ConfigError);
}

TEST(Estimators, NegativeGainIsKept)
{
    MeasurementSet ms;
    ms.interference_samples = {5.0};
    ms.signal_plus_interference_samples = {4.0};
    EXPECT_DOUBLE_EQ(estimate_gain(ms), -1.0);
}

TEST(ClusterAverageGain, FullAndSampled)
{
    Rng rng(3);
    const QuantizedBeam w = random_beam(8, PhaseSet(3), rng);
    std::vector<CVector> cl;
    for (int i = 0; i < 6; ++i)
        cl.push_back(random_cvector(8, rng));
    double full = 0;
    for (const auto &h : cl)
        full += beamforming_gain(w, h);
    full /= 6;
    EXPECT_NEAR(cluster_average_gain(w, cl, 0, rng), full, 1e-12);
    EXPECT_NEAR(cluster_average_gain(w, cl, 99, rng), full, 1e-12);

    // sampling without replacement is unbiased
    double acc = 0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i)
        acc += cluster_average_gain(w, cl, 2, rng);
    EXPECT_NEAR(acc / reps, full, 0.03 * full);

    // sample of size n-1 never repeats a user: with one distinct gain all others zero, the mean is bounded
    std::vector<std::size_t> used;
    auto probe = [&](const CVector &h)
    {
        for (std::size_t i = 0; i < cl.size(); ++i)
            if (cl[i].data() == h.data())
                used.push_back(i);
        return 1.0;
    };
    for (int i = 0; i < 50; ++i)
    {
        used.clear();
        cluster_average_gain(w, cl, 5, rng, probe);
        std::sort(used.begin(), used.end());
        EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
        EXPECT_EQ(used.size(), 5u);
    }
    EXPECT_THROW(cluster_average_gain(w, std::vector<CVector>{}, 0, rng), ConfigError);
}

TEST(DecideBetter, ThresholdSemantics)
{
    EXPECT_EQ(decide_better(1.0, 2.0), Hypothesis::H0);
    EXPECT_EQ(decide_better(2.0, 2.0), Hypothesis::H1); // ratio == gamma decides H1
    EXPECT_EQ(decide_better(3.0, 2.0), Hypothesis::H1);
    EXPECT_EQ(decide_better(3.0, 2.0, DecisionThreshold(2.0)), Hypothesis::H0);
    EXPECT_THROW(decide_better(1.0, 0.0), NumericalError);
    EXPECT_THROW(DecisionThreshold(0.0), ConfigError);
    EXPECT_THROW(DecisionThreshold(-1.0), ConfigError);
}

TEST(Policy, ParsingAndCoLearningSnapshot)
{
    EXPECT_EQ(policy_kind_from_string("random"), PolicyKind::RandomBeam);
    EXPECT_EQ(policy_kind_from_string("dft"), PolicyKind::FixedCodebookSweep);
    EXPECT_EQ(policy_kind_from_string("colearn"), PolicyKind::CoLearning);
    EXPECT_THROW(policy_kind_from_string("greedy"), ConfigError);

    Rng rng(5);
    const QuantizedBeam a = random_beam(4, PhaseSet(2), rng), b = random_beam(4, PhaseSet(2), rng);
    auto live = std::make_shared<LiveBeams>(std::vector<QuantizedBeam>{a});
    const InterfererPolicy pol = InterfererPolicy::co_learning(live);
    EXPECT_EQ(pol.draw(rng), a);
    live->publish(std::vector<QuantizedBeam>{b});
    EXPECT_EQ(pol.draw(rng), b); // the policy sees what is currently on air
    EXPECT_THROW(InterfererPolicy::co_learning(std::make_shared<LiveBeams>()), ConfigError);
    EXPECT_THROW(InterfererPolicy::fixed_codebook(Codebook{}), ConfigError);
}
