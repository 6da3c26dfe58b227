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

using namespace beamlearn;
using namespace testing_support;

namespace
{
    // Noise-free environment: exact gain toward one direction, exact power toward another.
    class ExactEnv final : public BeamEnvironment
    {
    public:
        ExactEnv(CVector h, CVector g) : h_(std::move(h)), g_(std::move(g)) {}
        BeamEstimate measure(const QuantizedBeam &w, Rng &) override
        {
            ++calls;
            return {beamforming_gain(w, h_), beamforming_gain(w, g_)};
        }
        std::size_t calls = 0;

    private:
        CVector h_, g_;
    };

    // Every measurement is an independent draw, so best-record updates are driven by noise alone.
    class NoisyEnv final : public BeamEnvironment
    {
    public:
        BeamEstimate measure(const QuantizedBeam &, Rng &rng) override { return {uniform_unit(rng), uniform_unit(rng)}; }
    };

    TrainConfig small_config(std::size_t budget)
    {
        TrainConfig c;
        c.budget = budget;
        c.estimator = EstimatorKind::Mlp;
        return c;
    }
}

TEST(Reward, BinaryTruthTable)
{
    const BeamEstimate prev{2.0, 2.0};
    struct Row
    {
        double g, i;
        int want;
    };
    const Row rows[] = {
        {3.0, 1.0, 1},  // gain up, interference down
        {3.0, 2.0, -1}, // interference equal
        {3.0, 3.0, -1}, // interference up
        {2.0, 1.0, -1}, // gain equal
        {1.0, 1.0, -1}, // gain down
        {2.0, 2.0, -1},
        {1.0, 3.0, -1},
    };
    for (const auto &r : rows)
        EXPECT_EQ(compute_reward({r.g, r.i}, prev).reward, r.want) << r.g << " " << r.i;
}

TEST(Reward, RecordCarriesEstimatesAndRatio)
{
    const RewardRecord r = compute_reward({4.0, 2.0}, {1.0, 3.0});
    EXPECT_EQ(r.reward, 1);
    EXPECT_DOUBLE_EQ(r.gain, 4.0);
    EXPECT_DOUBLE_EQ(r.interference, 2.0);
    ASSERT_TRUE(r.zeta.has_value());
    EXPECT_DOUBLE_EQ(*r.zeta, 2.0);
    EXPECT_FALSE(compute_reward({4.0, 0.0}, {1.0, 3.0}).zeta.has_value());
}

TEST(Reward, RatioVariant)
{
    // gain and interference both up, ratio up: binary says -1, ratio says +1
    EXPECT_EQ(compute_reward({6.0, 2.0}, {2.0, 1.0}, RewardKind::Binary).reward, -1);
    EXPECT_EQ(compute_reward({6.0, 2.0}, {2.0, 1.0}, RewardKind::Ratio).reward, 1);
    EXPECT_EQ(compute_reward({2.0, 2.0}, {2.0, 1.0}, RewardKind::Ratio).reward, -1);
}

TEST(Action, IncrementDecrementAreInverse)
{
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial)
    {
        const PhaseSet p = random_phase_set(rng);
        const std::size_t M = random_size(rng, 1, 16);
        const QuantizedBeam w = random_beam(M, p, rng);
        const std::size_t m = uniform_index(rng, M);
        const QuantizedBeam up = apply_action(w, 2 * m);
        EXPECT_EQ(apply_action(up, 2 * m + 1), w);
        EXPECT_EQ(up.indices()[m], (w.indices()[m] + 1) % p.size());
        for (std::size_t k = 0; k < M; ++k)
            if (k != m)
            {
                EXPECT_EQ(up.indices()[k], w.indices()[k]);
            }
        EXPECT_NEAR(up.vector().norm(), 1.0, 1e-12);
        EXPECT_THROW(apply_action(w, 2 * M), std::out_of_range);
    }
}

TEST(Action, WrapsAroundThePhaseSet)
{
    const QuantizedBeam w(std::vector<QuantizedBeam::Index>{3, 0}, PhaseSet(2));
    EXPECT_EQ(apply_action(w, 0).indices()[0], 0);
    EXPECT_EQ(apply_action(w, 3).indices()[1], 3);
}

TEST(Epsilon, LinearDecayThenFloor)
{
    TrainConfig c;
    c.budget = 1000;
    EXPECT_DOUBLE_EQ(epsilon_at(c, 0), 1.0);
    EXPECT_NEAR(epsilon_at(c, 250), 0.525, 1e-12);
    EXPECT_NEAR(epsilon_at(c, 500), 0.05, 1e-12);
    EXPECT_NEAR(epsilon_at(c, 999), 0.05, 1e-12);
    for (std::size_t s = 1; s < 1000; ++s)
        EXPECT_LE(epsilon_at(c, s), epsilon_at(c, s - 1));
}

TEST(Agent, FullExplorationIsUniformOverActions)
{
    Rng rng(2);
    const std::size_t M = 8;
    TrainConfig c;
    BeamAgent agent(random_beam(M, PhaseSet(4), rng), std::make_unique<MlpEstimator>(M, PhaseSet(4), rng), c);
    agent.exploration_rate = 1.0;
    std::vector<double> counts(2 * M, 0);
    const int n = 32000;
    for (int i = 0; i < n; ++i)
        ++counts[agent.select_action(rng)];
    double chi2 = 0;
    const double e = n / static_cast<double>(2 * M);
    for (double x : counts)
        chi2 += (x - e) * (x - e) / e;
    EXPECT_LT(chi2, 37.70); // 15 dof, p = 0.001
}

TEST(Agent, GreedyPicksArgmaxWithLowestIndexTie)
{
    Rng rng(3);
    const PhaseSet p(2);
    const QuantizedBeam s = random_beam(3, p, rng);
    auto table = std::make_unique<TabularEstimator>(3, p);
    table->set(s, 4, 2.0);
    table->set(s, 1, 2.0);
    TrainConfig c;
    c.epsilon_start = 0.0;
    BeamAgent agent(s, std::move(table), c);
    agent.exploration_rate = 0.0;
    EXPECT_EQ(agent.select_action(rng), 1u);
}

TEST(Agent, RejectsMismatchedEstimator)
{
    Rng rng(4);
    EXPECT_THROW(BeamAgent(random_beam(4, PhaseSet(2), rng), std::make_unique<TabularEstimator>(3, PhaseSet(2)), TrainConfig{}), DimensionError);
}

TEST(Replay, RingOverwritesOldest)
{
    Rng rng(5);
    ReplayBuffer buf(3);
    const QuantizedBeam s = random_beam(2, PhaseSet(2), rng);
    for (std::size_t a = 0; a < 5; ++a)
        buf.push({s, a, -1, s});
    ASSERT_EQ(buf.size(), 3u);
    std::vector<std::size_t> acts;
    for (std::size_t i = 0; i < 3; ++i)
        acts.push_back(buf[i].action);
    std::sort(acts.begin(), acts.end());
    EXPECT_EQ(acts, (std::vector<std::size_t>{2, 3, 4}));
    EXPECT_THROW(ReplayBuffer(0), ConfigError);
}

TEST(Tabular, SizeLimitAndUpdate)
{
    EXPECT_THROW(TabularEstimator(7, PhaseSet(1)), ConfigError);
    EXPECT_THROW(TabularEstimator(4, PhaseSet(3)), ConfigError);
    TabularEstimator t(2, PhaseSet(2), 0.5);
    const QuantizedBeam s(std::vector<QuantizedBeam::Index>{1, 2}, PhaseSet(2));
    const ValueTarget vt{&s, 3, 4.0};
    t.update(std::span<const ValueTarget>(&vt, 1));
    EXPECT_DOUBLE_EQ(t.q_values(s)[3], 2.0);
    t.update(std::span<const ValueTarget>(&vt, 1));
    EXPECT_DOUBLE_EQ(t.q_values(s)[3], 3.0);
}

TEST(TdTarget, RewardPlusDiscountedNextMax)
{
    Rng rng(6);
    const PhaseSet p(2);
    const QuantizedBeam s(std::vector<QuantizedBeam::Index>{0, 0}, p);
    const QuantizedBeam s2 = apply_action(s, 0);
    auto table = std::make_unique<TabularEstimator>(2, p, 1.0);
    table->set(s2, 2, 4.0);
    table->set(s2, 1, -7.0);
    TrainConfig c;
    c.discount = 0.5;
    c.learning_rate = 1.0;
    c.estimator = EstimatorKind::Tabular;
    BeamAgent agent(s, std::move(table), c);
    agent.replay.push({s, 0, -1, s2});
    train_value_estimator(agent, rng);
    EXPECT_DOUBLE_EQ(agent.value_estimator->q_values(s)[0], -1.0 + 0.5 * 4.0);
}

TEST(Mlp, FitsAFixedTarget)
{
    Rng rng(7);
    const PhaseSet p(4);
    MlpEstimator net(8, p, rng, 1e-2);
    EXPECT_EQ(net.num_actions(), 16u);
    std::vector<QuantizedBeam> states;
    for (int i = 0; i < 4; ++i)
        states.push_back(random_beam(8, p, rng));
    std::vector<ValueTarget> batch;
    for (std::size_t i = 0; i < states.size(); ++i)
        batch.push_back({&states[i], i, i % 2 ? 1.0 : -1.0});
    auto loss = [&]
    {
        double l = 0;
        for (const auto &t : batch)
            l += std::pow(net.q_values(*t.state)[t.action] - t.target, 2);
        return l;
    };
    const double before = loss();
    for (int it = 0; it < 500; ++it)
        net.update(batch);
    EXPECT_LT(loss(), 0.01 * before);
}

TEST(Mlp, SameSeedSameWeights)
{
    Rng a(9), b(9), s(1);
    const PhaseSet p(4);
    MlpEstimator n1(8, p, a), n2(8, p, b);
    const QuantizedBeam w = random_beam(8, p, s);
    EXPECT_EQ(n1.q_values(w), n2.q_values(w));
}

TEST(BestRecord, OnlyMovesOnJointImprovement)
{
    Rng rng(10);
    TrainConfig c = small_config(3000);
    c.episode_length = 50;
    NoisyEnv env;
    BeamTrainer trainer(BeamAgent(random_beam(8, PhaseSet(4), rng), std::make_unique<MlpEstimator>(8, PhaseSet(4), rng), c), env, 0);
    while (!trainer.done())
        trainer.step(rng);
    const auto &log = trainer.log();
    ASSERT_EQ(log.size(), 3000u);
    EXPECT_EQ(log[0].reward, -1);
    std::size_t moves = 0;
    for (std::size_t i = 1; i < log.size(); ++i)
    {
        EXPECT_GE(log[i].best_gain, log[i - 1].best_gain);
        EXPECT_LE(log[i].best_interf, log[i - 1].best_interf);
        if (log[i].best_gain != log[i - 1].best_gain)
        {
            ++moves;
            EXPECT_EQ(log[i].reward, 1);
            EXPECT_EQ(log[i].best_gain, log[i].gain_est);
            EXPECT_EQ(log[i].best_interf, log[i].interf_est);
        }
    }
    EXPECT_GT(moves, 0u);
    EXPECT_EQ(moves, trainer.agent().best_updates);
}

TEST(Training, ImprovesOnAnExactEnvironment)
{
    Rng rng(11);
    const ArrayGeometry g{8, 0.5, 'x'};
    const CVector h = array_response(g, 1.2), v = array_response(g, 1.9);
    ExactEnv env(h, v);
    // start pointed at the interferer so both gain and interference have room to improve
    const QuantizedBeam init = steering_beam(g, std::cos(1.9), PhaseSet(4));
    TrainConfig c = small_config(2000);
    c.episode_length = 100;
    const TrainResult r = train_beam(init, env, c, rng);
    Rng unused(0);
    const BeamEstimate at_best = env.measure(r.best_beam, unused);
    EXPECT_DOUBLE_EQ(at_best.gain, r.best.gain);
    EXPECT_DOUBLE_EQ(at_best.interference, r.best.interference);
    EXPECT_GE(r.best.gain, beamforming_gain(init, h));
    EXPECT_LE(r.best.interference, beamforming_gain(init, v));
    EXPECT_LT(r.best.interference, 0.1 * beamforming_gain(init, v));
    EXPECT_EQ(r.log.size(), 2000u);
}

TEST(Training, DeterministicGivenSeed)
{
    const ArrayGeometry g{8, 0.5, 'x'};
    ExactEnv env(array_response(g, 1.0), array_response(g, 2.0));
    const QuantizedBeam init = steering_beam(g, std::cos(1.0), PhaseSet(4));
    Rng a(12), b(12);
    const auto r1 = train_beam(init, env, small_config(300), a);
    const auto r2 = train_beam(init, env, small_config(300), b);
    EXPECT_EQ(r1.best_beam, r2.best_beam);
    ASSERT_EQ(r1.log.size(), r2.log.size());
    for (std::size_t i = 0; i < r1.log.size(); ++i)
        EXPECT_EQ(r1.log[i].gain_est, r2.log[i].gain_est);
}

TEST(Training, RestartReturnsToBestBeam)
{
    Rng rng(13);
    TrainConfig c = small_config(40);
    c.episode_length = 10;
    NoisyEnv env;
    BeamTrainer t(BeamAgent(random_beam(6, PhaseSet(3), rng), std::make_unique<MlpEstimator>(6, PhaseSet(3), rng), c), env, 0);
    for (int i = 0; i < 10; ++i)
        t.step(rng);
    const QuantizedBeam best = t.agent().best_record->beam;
    t.step(rng); // step 10 restarts from the best beam, then takes one action
    const QuantizedBeam now = t.current_beam();
    std::size_t diff = 0;
    for (std::size_t m = 0; m < 6; ++m)
        diff += now.indices()[m] != best.indices()[m];
    EXPECT_EQ(diff, 1u);
}

TEST(ClusterEnvironment, ExactWithDeterministicInterferer)
{
    Rng rng(14);
    const Codebook one({random_beam(8, PhaseSet(4), rng)});
    std::vector<CVector> cluster{random_cvector(8, rng), random_cvector(8, rng), random_cvector(8, rng)};
    const CMatrix H = random_cvector(8, rng) * random_cvector(8, rng).adjoint();
    TrainConfig c;
    c.P = 3;
    c.Q = 2;
    ClusterEnvironment env(cluster, {{H, InterfererPolicy::fixed_codebook(one)}}, c);
    const QuantizedBeam w = random_beam(8, PhaseSet(4), rng);
    double want_gain = 0;
    for (const auto &h : cluster)
        want_gain += beamforming_gain(w, h) / 3.0;
    const double want_i = std::norm(w.vector().dot(H * one[0].vector()));
    const BeamEstimate e = env.measure(w, rng);
    EXPECT_NEAR(e.gain, want_gain, 1e-9 * want_gain);
    EXPECT_NEAR(e.interference, want_i, 1e-9 * (1 + want_i));

    std::vector<char> slots;
    env.set_sample_log([&](const QuantizedBeam &, const ClusterEnvironment::Sample &s)
                       { slots.push_back(s.slot); });
    env.measure(w, rng);
    EXPECT_EQ(std::count(slots.begin(), slots.end(), 'I'), 3);
    EXPECT_EQ(std::count(slots.begin(), slots.end(), 'S'), 6);
}

TEST(TrainConfig, Validation)
{
    TrainConfig c;
    c.budget = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.P = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.discount = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.epsilon_end = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SteeringStart, PicksBestClusterAverage)
{
    const ArrayGeometry g{16, 0.5, 'x'};
    const Codebook cb = beamsteering_codebook(g, 8, PhaseSet(4));
    std::vector<CVector> cl{array_response(g, std::acos(steering_direction(5, 8)))};
    EXPECT_EQ(best_steering_index(cb, cl), 5u);
}
