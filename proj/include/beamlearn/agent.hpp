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


#ifndef BEAMLEARN_AGENT_HPP
#define BEAMLEARN_AGENT_HPP

#include "cache.hpp"
#include "codebook.hpp"
#include "common.hpp"
#include "measurement.hpp"
#include "value_estimator.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace beamlearn
{
    enum class EstimatorKind
    {
        Mlp,
        Tabular
    };

    enum class RewardKind
    {
        Binary, // joint gain-up / interference-down rule
        Ratio   // gain/interference ratio must strictly improve
    };

    struct TrainConfig
    {
        std::size_t budget = 20000;
        std::size_t P = 10;
        std::size_t Q = 10;
        std::size_t users_per_step = 0; // 0: every cluster member is measured each step
        double noise_power = 0.0;
        CacheMode cache = CacheMode::Off;
        double epsilon_start = 1.0;
        double epsilon_end = 0.05;
        double epsilon_decay_fraction = 0.5;
        double discount = 0.5;
        double learning_rate = 1e-3;
        std::size_t replay_capacity = 4096;
        std::size_t batch_size = 16;
        EstimatorKind estimator = EstimatorKind::Mlp;
        RewardKind reward = RewardKind::Binary;
        std::size_t episode_length = 0; // 0: one episode over the whole budget

        void validate() const
        {
            if (budget < 1)
                throw ConfigError("training budget must be at least 1 step");
            if (P < 1 || Q < 1)
                throw ConfigError("measurement bursts P and Q must be at least 1");
            if (noise_power < 0.0)
                throw ConfigError("noise power must be non-negative");
            if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0))
                throw ConfigError("exploration rates must lie in [0, 1]");
            if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0))
                throw ConfigError("epsilon decay fraction must lie in (0, 1]");
            if (!(discount >= 0.0 && discount < 1.0))
                throw ConfigError("discount must lie in [0, 1)");
            if (!(learning_rate > 0.0))
                throw ConfigError("learning rate must be positive");
            if (replay_capacity < 1 || batch_size < 1)
                throw ConfigError("replay capacity and batch size must be positive");
        }
    };

    // action 2m increments the m-th phase index, 2m+1 decrements it (mod 2^r).
    inline QuantizedBeam apply_action(const QuantizedBeam &state, std::size_t action)
    {
        const std::size_t M = state.num_antennas();
        if (action >= 2 * M)
            throw std::out_of_range("apply_action: action " + std::to_string(action) + " outside [0, " + std::to_string(2 * M) + ")");
        auto idx = state.index_vector();
        const std::size_t m = action / 2;
        const std::size_t L = state.phase_set().size();
        idx[m] = static_cast<QuantizedBeam::Index>((action % 2 == 0) ? (idx[m] + 1) % L : (idx[m] + L - 1) % L);
        return QuantizedBeam(std::move(idx), state.phase_set());
    }

    struct BeamEstimate
    {
        double gain = 0.0;
        double interference = 0.0;
    };

    struct RewardRecord
    {
        int reward = -1;
        double gain = 0.0;
        double interference = 0.0;
        std::optional<double> zeta; // gain / interference when the interference estimate is positive
    };

    inline std::optional<double> zeta_ratio(const BeamEstimate &e)
    {
        if (e.interference > 0.0)
            return e.gain / e.interference;
        return std::nullopt;
    }

    // +1 iff interference strictly decreased and gain strictly increased, else -1.
    inline RewardRecord compute_reward(const BeamEstimate &current, const BeamEstimate &previous, RewardKind kind = RewardKind::Binary)
    {
        RewardRecord r;
        r.gain = current.gain;
        r.interference = current.interference;
        r.zeta = zeta_ratio(current);
        bool up = false;
        if (kind == RewardKind::Binary)
            up = current.interference < previous.interference && current.gain > previous.gain;
        else
        {
            const auto zp = zeta_ratio(previous);
            if (r.zeta && zp)
                up = *r.zeta > *zp;
            else if (!zp && !r.zeta)
                up = current.gain > previous.gain;
            else
                up = !r.zeta ? current.gain > 0.0 : false;
        }
        r.reward = up ? 1 : -1;
        return r;
    }

    struct BestRecord
    {
        QuantizedBeam beam;
        double gain = 0.0;
        double interference = 0.0;
    };

    struct Transition
    {
        QuantizedBeam state;
        std::size_t action = 0;
        int reward = -1;
        QuantizedBeam next_state;
    };

    // Ring buffer of recent transitions.
    class ReplayBuffer
    {
    public:
        explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity)
        {
            if (capacity_ == 0)
                throw ConfigError("replay buffer capacity must be positive");
            data_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
        }

        void push(Transition t)
        {
            if (data_.size() < capacity_)
                data_.push_back(std::move(t));
            else
                data_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }

        std::size_t size() const { return data_.size(); }
        std::size_t capacity() const { return capacity_; }
        const Transition &operator[](std::size_t i) const { return data_.at(i); }

    private:
        std::size_t capacity_;
        std::size_t head_ = 0;
        std::vector<Transition> data_;
    };

    // Anything that can measure a candidate beam and return (gain, interference) estimates.
    class BeamEnvironment
    {
    public:
        virtual ~BeamEnvironment() = default;
        virtual BeamEstimate measure(const QuantizedBeam &w, Rng &rng) = 0;
    };

    // Staged cache writes, committed later by the owner in a fixed order.
    using CacheStage = std::vector<std::pair<std::string, std::vector<double>>>;

    // Measurement bursts against one user cluster: P interference-only samples (possibly served from the
    // BS cache), then Q signal-plus-interference samples per measured user.
    class ClusterEnvironment final : public BeamEnvironment
    {
    public:
        struct Sample
        {
            char slot; // 'I' interference only, 'S' signal plus interference
            double value;
        };
        using SampleLog = std::function<void(const QuantizedBeam &, const Sample &)>;

        ClusterEnvironment(std::vector<CVector> cluster, std::vector<InterferenceSource> sources, const TrainConfig &cfg,
                           MeasurementCache *cache = nullptr, CacheStage *stage = nullptr)
            : cluster_(std::move(cluster)), sources_(std::move(sources)), P_(cfg.P), Q_(cfg.Q), users_(cfg.users_per_step),
              noise_(cfg.noise_power), mode_(cfg.cache), cache_(cache), stage_(stage)
        {
            if (cluster_.empty())
                throw ConfigError("cluster environment needs at least one user");
            if (mode_ != CacheMode::Off && !cache_)
                throw ConfigError("cache mode requires a measurement cache");
        }

        void set_sample_log(SampleLog log) { log_ = std::move(log); }
        std::size_t fresh_interference_samples() const { return fresh_; }

        BeamEstimate measure(const QuantizedBeam &w, Rng &rng) override
        {
            std::vector<double> I = interference_burst(w, rng);
            const double mean_I = sample_mean(I);

            std::vector<std::size_t> who(cluster_.size());
            for (std::size_t i = 0; i < who.size(); ++i)
                who[i] = i;
            std::size_t U = who.size();
            if (users_ > 0 && users_ < U)
            {
                for (std::size_t i = 0; i < users_; ++i)
                    std::swap(who[i], who[i + uniform_index(rng, U - i)]);
                U = users_;
            }

            double gain = 0.0, si_total = 0.0;
            for (std::size_t i = 0; i < U; ++i)
            {
                const auto SI = measure_signal_plus_interference(w, cluster_[who[i]], sources_, Q_, noise_, rng);
                if (log_)
                    for (double v : SI)
                        log_(w, {'S', v});
                const double m = sample_mean(SI);
                si_total += m * static_cast<double>(Q_);
                gain += m - mean_I;
            }
            gain /= static_cast<double>(U);

            // pooled interference estimate over both bursts
            const double P = static_cast<double>(I.size()), Qn = static_cast<double>(Q_ * U);
            const double interf = (P * mean_I + si_total - Qn * gain) / (P + Qn);
            return {gain, interf};
        }

    private:
        std::vector<double> interference_burst(const QuantizedBeam &w, Rng &rng)
        {
            std::vector<double> I;
            if (mode_ != CacheMode::Off)
                I = cache_->lookup(w);
            std::size_t need = P_;
            if (mode_ == CacheMode::TopUp)
                need = I.size() >= P_ ? 0 : P_ - I.size();
            else if (mode_ == CacheMode::Replace)
            {
                need = I.size() >= P_ ? 0 : P_;
                if (need > 0)
                    I.clear();
            }

            if (need > 0)
            {
                auto fresh = measure_interference(w, sources_, need, noise_, rng);
                fresh_ += need;
                if (log_)
                    for (double v : fresh)
                        log_(w, {'I', v});
                if (mode_ != CacheMode::Off)
                {
                    if (stage_)
                        stage_->emplace_back(w.key(), fresh);
                    else
                        cache_->append(w.key(), fresh);
                }
                I.insert(I.end(), fresh.begin(), fresh.end());
            }
            return I;
        }

        std::vector<CVector> cluster_;
        std::vector<InterferenceSource> sources_;
        std::size_t P_, Q_, users_;
        double noise_;
        CacheMode mode_;
        MeasurementCache *cache_;
        CacheStage *stage_;
        SampleLog log_;
        std::size_t fresh_ = 0;
    };

    struct TrainingLogRow
    {
        std::size_t step = 0;
        std::size_t beam_index = 0;
        double gain_est = 0.0;
        double interf_est = 0.0;
        int reward = -1;
        double epsilon = 0.0;
        double best_gain = 0.0;
        double best_interf = 0.0;
    };

    inline double epsilon_at(const TrainConfig &cfg, std::size_t step)
    {
        const double horizon = std::max(1.0, cfg.epsilon_decay_fraction * static_cast<double>(cfg.budget));
        const double t = std::min(1.0, static_cast<double>(step) / horizon);
        return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * t;
    }

    inline std::unique_ptr<ValueEstimator> make_value_estimator(const TrainConfig &cfg, std::size_t M, const PhaseSet &phases, Rng &rng)
    {
        if (cfg.estimator == EstimatorKind::Tabular)
            return std::make_unique<TabularEstimator>(M, phases, cfg.learning_rate);
        return std::make_unique<MlpEstimator>(M, phases, rng, cfg.learning_rate);
    }

    class BeamAgent
    {
    public:
        BeamAgent(QuantizedBeam initial, std::unique_ptr<ValueEstimator> estimator, const TrainConfig &cfg)
            : current_state(std::move(initial)), value_estimator(std::move(estimator)), config(cfg), replay(cfg.replay_capacity)
        {
            cfg.validate();
            if (!value_estimator || value_estimator->num_actions() != 2 * current_state.num_antennas())
                throw DimensionError("value estimator action count must be 2M");
            exploration_rate = cfg.epsilon_start;
        }

        QuantizedBeam current_state;
        std::unique_ptr<ValueEstimator> value_estimator;
        TrainConfig config;
        double exploration_rate = 1.0;
        std::optional<BestRecord> best_record;
        std::optional<BeamEstimate> previous;
        ReplayBuffer replay;
        std::size_t steps = 0;
        std::size_t best_updates = 0;

        std::size_t select_action(Rng &rng) const
        {
            const std::size_t A = 2 * current_state.num_antennas();
            if (uniform_unit(rng) < exploration_rate)
                return uniform_index(rng, A);
            const auto q = value_estimator->q_values(current_state);
            return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
        }

        // Baseline measurement of the current beam; it becomes the first comparison point and the initial best.
        BeamEstimate initialize(BeamEnvironment &env, Rng &rng)
        {
            const BeamEstimate e = env.measure(current_state, rng);
            previous = e;
            best_record = BestRecord{current_state, e.gain, e.interference};
            return e;
        }

        void consider_best(const RewardRecord &r)
        {
            if (r.reward != 1)
                return;
            if (!best_record || (r.gain > best_record->gain && r.interference < best_record->interference))
            {
                best_record = BestRecord{current_state, r.gain, r.interference};
                ++best_updates;
            }
        }
    };

    struct StepRecord
    {
        Transition transition;
        RewardRecord reward;
        double epsilon = 0.0;
    };

    // One minibatch of one-step TD targets r + discount * max_a' Q(s', a') drawn from the replay buffer.
    inline void train_value_estimator(BeamAgent &agent, Rng &rng)
    {
        const std::size_t n = agent.replay.size();
        if (n == 0)
            return;
        const std::size_t B = std::min(agent.config.batch_size, n);
        std::vector<ValueTarget> batch;
        batch.reserve(B);
        for (std::size_t b = 0; b < B; ++b)
        {
            const Transition &t = agent.replay[uniform_index(rng, n)];
            const auto q_next = agent.value_estimator->q_values(t.next_state);
            const double target = static_cast<double>(t.reward) + agent.config.discount * *std::max_element(q_next.begin(), q_next.end());
            batch.push_back({&t.state, t.action, target});
        }
        agent.value_estimator->update(batch);
    }

    // One epsilon-greedy step: move, measure, reward against the previous beam, learn.
    inline StepRecord agent_step(BeamAgent &agent, BeamEnvironment &env, Rng &rng)
    {
        if (!agent.previous)
            agent.initialize(env, rng);
        agent.exploration_rate = epsilon_at(agent.config, agent.steps);
        const std::size_t a = agent.select_action(rng);
        QuantizedBeam next = apply_action(agent.current_state, a);
        const BeamEstimate e = env.measure(next, rng);
        const RewardRecord r = compute_reward(e, *agent.previous, agent.config.reward);

        StepRecord rec{{agent.current_state, a, r.reward, next}, r, agent.exploration_rate};
        agent.replay.push(rec.transition);
        agent.current_state = std::move(next);
        agent.previous = e;
        agent.consider_best(r);
        train_value_estimator(agent, rng);
        ++agent.steps;
        return rec;
    }

    struct TrainResult
    {
        QuantizedBeam best_beam;
        BestRecord best;
        std::vector<TrainingLogRow> log;
    };

    // Step 0 measures the starting beam as the baseline (reward -1); steps 1..budget-1 are agent steps.
    class BeamTrainer
    {
    public:
        BeamTrainer(BeamAgent agent, BeamEnvironment &env, std::size_t beam_index) : agent_(std::move(agent)), env_(&env), beam_index_(beam_index) {}

        bool done() const { return step_ >= agent_.config.budget; }
        std::size_t step_count() const { return step_; }
        const BeamAgent &agent() const { return agent_; }
        const std::vector<TrainingLogRow> &log() const { return log_; }
        QuantizedBeam current_beam() const { return agent_.current_state; }

        void step(Rng &rng)
        {
            if (done())
                return;
            TrainingLogRow row;
            row.step = step_;
            row.beam_index = beam_index_;
            if (step_ == 0)
            {
                const BeamEstimate e = agent_.initialize(*env_, rng);
                row.gain_est = e.gain;
                row.interf_est = e.interference;
                row.reward = -1;
                row.epsilon = agent_.exploration_rate;
            }
            else
            {
                const std::size_t ep = agent_.config.episode_length;
                if (ep > 0 && step_ % ep == 0)
                {
                    // restart the walk from the best beam found so far
                    agent_.current_state = agent_.best_record->beam;
                    agent_.previous = env_->measure(agent_.current_state, rng);
                }
                const StepRecord rec = agent_step(agent_, *env_, rng);
                row.gain_est = rec.reward.gain;
                row.interf_est = rec.reward.interference;
                row.reward = rec.reward.reward;
                row.epsilon = rec.epsilon;
            }
            row.best_gain = agent_.best_record->gain;
            row.best_interf = agent_.best_record->interference;
            log_.push_back(row);
            ++step_;
        }

        TrainResult result() const
        {
            if (!agent_.best_record)
                throw NumericalError("training produced no measurement");
            return {agent_.best_record->beam, *agent_.best_record, log_};
        }

    private:
        BeamAgent agent_;
        BeamEnvironment *env_;
        std::size_t beam_index_;
        std::size_t step_ = 0;
        std::vector<TrainingLogRow> log_;
    };

    // Codebook beam with the largest exact average gain over the cluster (ties: lowest index).
    inline std::size_t best_steering_index(const Codebook &cb, std::span<const CVector> cluster)
    {
        if (cb.empty() || cluster.empty())
            throw ConfigError("best_steering_index: empty codebook or cluster");
        std::size_t best = 0;
        double best_gain = -1.0;
        for (std::size_t n = 0; n < cb.size(); ++n)
        {
            double g = 0.0;
            for (const auto &h : cluster)
                g += beamforming_gain(cb[n], h);
            if (g > best_gain)
            {
                best_gain = g;
                best = n;
            }
        }
        return best;
    }

    inline TrainResult train_beam(const QuantizedBeam &initial, BeamEnvironment &env, const TrainConfig &cfg, Rng &rng, std::size_t beam_index = 0)
    {
        cfg.validate();
        Rng init_rng = make_stream(rng(), 0xE57ULL);
        BeamTrainer trainer(BeamAgent(initial, make_value_estimator(cfg, initial.num_antennas(), initial.phase_set(), init_rng), cfg), env, beam_index);
        while (!trainer.done())
            trainer.step(rng);
        return trainer.result();
    }

    // Cluster-level entry point: starts from the steering beam (of `steering`) that best serves the cluster.
    inline TrainResult train_beam(const std::vector<CVector> &cluster, std::vector<InterferenceSource> sources, const Codebook &steering,
                                  const TrainConfig &cfg, Rng &rng, std::size_t beam_index = 0)
    {
        const QuantizedBeam init = steering[best_steering_index(steering, cluster)];
        ClusterEnvironment env(cluster, std::move(sources), cfg);
        return train_beam(init, env, cfg, rng, beam_index);
    }
}

#endif
