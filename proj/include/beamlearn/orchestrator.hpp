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


#ifndef BEAMLEARN_ORCHESTRATOR_HPP
#define BEAMLEARN_ORCHESTRATOR_HPP

#include "agent.hpp"
#include "cache.hpp"
#include "clustering.hpp"
#include "codebook.hpp"
#include "measurement.hpp"
#include "policy.hpp"
#include "scenario.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <thread>
#include <vector>

namespace beamlearn
{
    // Counts reads of BS-owned state by a different BS. Any nonzero value is an information-exchange leak.
    class AccessAudit
    {
    public:
        void record(std::size_t owner, std::size_t requester)
        {
            if (owner != requester)
                cross_.fetch_add(1, std::memory_order_relaxed);
        }
        std::size_t cross_bs_accesses() const { return cross_.load(); }

    private:
        std::atomic<std::size_t> cross_{0};
    };

    // State that belongs to one BS. Reads name the requesting BS and are audited.
    template <class T>
    class BsScoped
    {
    public:
        BsScoped(std::size_t owner, T value, AccessAudit &audit) : owner_(owner), value_(std::move(value)), audit_(&audit) {}

        std::size_t owner() const { return owner_; }

        T &access(std::size_t requester)
        {
            audit_->record(owner_, requester);
            return value_;
        }

        const T &access(std::size_t requester) const
        {
            audit_->record(owner_, requester);
            return value_;
        }

    private:
        std::size_t owner_;
        T value_;
        AccessAudit *audit_;
    };

    enum class SlotRole
    {
        Receive,
        Transmit
    };

    // Slot s: BS (s mod K) receives, every other BS transmits.
    struct OrchestrationSchedule
    {
        std::size_t bs_count = 2;
        std::size_t slots = 0;
        std::size_t P = 10;
        std::size_t Q = 10;

        SlotRole role(std::size_t bs, std::size_t slot) const
        {
            return slot % bs_count == bs ? SlotRole::Receive : SlotRole::Transmit;
        }
    };

    struct OrchestratorConfig
    {
        std::size_t beams = 4;          // N per learning BS
        unsigned phase_bits = 4;
        PolicyKind policy = PolicyKind::CoLearning;
        TrainConfig train;
        std::uint64_t seed = 1;
        std::size_t workers = 1;
        std::optional<std::size_t> frozen_bs; // keeps its beamsteering codebook and does not learn
        std::size_t fixed_beams = 16;         // size of the beamsteering codebook of frozen / dft interferers
        bool shared_codebook = true;          // transmit with the beams being learned; false keeps the initial beams on air
        bool record_measurements = false;     // keep every raw sample (large)

        void validate(std::size_t bs_count) const
        {
            train.validate();
            if (beams < 1)
                throw ConfigError("codebook size must be at least 1");
            if (phase_bits < 1 || phase_bits > 8)
                throw ConfigError("phase bits must lie in [1, 8]");
            if (workers < 1)
                throw ConfigError("worker count must be at least 1");
            if (fixed_beams < 1)
                throw ConfigError("fixed codebook size must be at least 1");
            if (frozen_bs && *frozen_bs >= bs_count)
                throw ConfigError("frozen BS index out of range");
        }
    };

    struct BsLearningResult
    {
        std::size_t bs = 0;
        bool learned = false;
        Codebook initial;
        Codebook codebook;
        std::vector<UserCluster> clusters; // member indices refer to Scenario::users_of(bs)
        std::vector<BestRecord> best;
        std::vector<std::vector<TrainingLogRow>> logs;
        std::size_t cache_keys = 0;
        std::size_t cache_samples = 0;
        std::vector<MeasurementLogRow> measurements;
    };

    struct LearningResult
    {
        std::vector<BsLearningResult> bs;
        OrchestrationSchedule schedule;
        std::size_t cross_bs_accesses = 0;
    };

    // RNG stream tags. Agent (k, n) of a run with seed s always draws from agent_stream(s, k, n).
    inline Rng agent_stream(std::uint64_t seed, std::size_t bs, std::size_t beam) { return make_stream(seed, 0xA6E27ULL, bs, beam); }
    inline Rng cluster_stream(std::uint64_t seed, std::size_t bs) { return make_stream(seed, 0xC1A57ULL, bs); }

    namespace detail
    {
        // Everything one BS owns while learning. Nothing in here refers to another BS.
        struct BsLearner
        {
            std::vector<CVector> channels;
            std::vector<UserCluster> clusters;
            Codebook initial;
            std::unique_ptr<MeasurementCache> cache;
            std::vector<CacheStage> stages;
            std::vector<std::unique_ptr<ClusterEnvironment>> envs;
            std::vector<BeamTrainer> trainers;
            std::vector<Rng> rngs;
            std::vector<std::vector<MeasurementLogRow>> pending; // per agent, flushed in agent order
            std::vector<MeasurementLogRow> measurements;
        };

        template <class F>
        void parallel_for(std::size_t n, std::size_t workers, F &&f)
        {
            if (workers <= 1 || n <= 1)
            {
                for (std::size_t i = 0; i < n; ++i)
                    f(i);
                return;
            }
            const std::size_t T = std::min(workers, n);
            std::vector<std::thread> pool;
            pool.reserve(T);
            for (std::size_t t = 0; t < T; ++t)
                pool.emplace_back([&, t]
                                  { for (std::size_t i = t; i < n; i += T) f(i); });
            for (auto &th : pool)
                th.join();
        }
    }

    // Decentralized learning at every BS. The only coupling between BSs is the simulated interference power
    // each receiver measures; interferers with K > 2 are aggregated by superposition.
    inline LearningResult run_decentralized_learning(const Scenario &scenario, const OrchestratorConfig &cfg)
    {
        const std::size_t K = scenario.bs_count();
        if (K < 2)
            throw ConfigError("decentralized learning needs at least two base stations");
        cfg.validate(K);

        const PhaseSet phases(cfg.phase_bits);
        const std::size_t M = scenario.num_antennas();
        const Codebook steering = beamsteering_codebook(scenario.geometry, cfg.beams, phases);
        const Codebook fixed = beamsteering_codebook(scenario.geometry, cfg.fixed_beams, phases);
        const Codebook sensing = sensing_codebook(scenario.geometry);

        AccessAudit audit;
        std::vector<BsScoped<detail::BsLearner>> learners;
        learners.reserve(K);
        std::vector<std::shared_ptr<LiveBeams>> live(K);

        // Per-BS setup: clustering and warm start use only the BS's own user channels.
        for (std::size_t k = 0; k < K; ++k)
        {
            detail::BsLearner L;
            L.channels = scenario.channels_of(k);
            const bool frozen = cfg.frozen_bs && *cfg.frozen_bs == k;
            if (frozen)
                L.initial = fixed;
            else
            {
                if (L.channels.size() < cfg.beams)
                    throw ConfigError("BS " + std::to_string(k) + " serves " + std::to_string(L.channels.size()) + " users, fewer than " + std::to_string(cfg.beams) + " beams");
                Rng crng = cluster_stream(cfg.seed, k);
                L.clusters = cluster_users(L.channels, cfg.beams, sensing, crng);
                std::vector<QuantizedBeam> init;
                for (const auto &c : L.clusters)
                {
                    std::vector<CVector> members;
                    for (auto i : c.members)
                        members.push_back(L.channels[i]);
                    init.push_back(steering[best_steering_index(steering, members)]);
                }
                L.initial = Codebook(std::move(init));
            }
            live[k] = std::make_shared<LiveBeams>(L.initial.beams());
            learners.emplace_back(k, std::move(L), audit);
        }

        // What BS k hears from BS q: the propagation medium draws q's transmit beam according to the policy.
        auto policy_of = [&](std::size_t q) -> InterfererPolicy
        {
            if (cfg.frozen_bs && *cfg.frozen_bs == q)
                return InterfererPolicy::fixed_codebook(fixed);
            switch (cfg.policy)
            {
            case PolicyKind::RandomBeam:
                return InterfererPolicy::random_beam(M, phases);
            case PolicyKind::FixedCodebookSweep:
                return InterfererPolicy::fixed_codebook(fixed);
            default:
                return InterfererPolicy::co_learning(live[q]);
            }
        };

        for (std::size_t k = 0; k < K; ++k)
        {
            if (cfg.frozen_bs && *cfg.frozen_bs == k)
                continue;
            std::vector<InterferenceSource> sources;
            for (std::size_t q = 0; q < K; ++q)
                if (q != k)
                    sources.push_back({scenario.link(q, k).H, policy_of(q)});

            auto &L = learners[k].access(k);
            if (cfg.train.cache != CacheMode::Off)
                L.cache = std::make_unique<MeasurementCache>(k);
            L.stages.resize(L.clusters.size());
            for (std::size_t n = 0; n < L.clusters.size(); ++n)
            {
                std::vector<CVector> members;
                for (auto i : L.clusters[n].members)
                    members.push_back(L.channels[i]);
                L.envs.push_back(std::make_unique<ClusterEnvironment>(std::move(members), sources, cfg.train, L.cache.get(), &L.stages[n]));
                L.rngs.push_back(agent_stream(cfg.seed, k, n));
                Rng init_rng = make_stream(L.rngs.back()(), 0xE57ULL);
                BeamAgent agent(L.initial[n], make_value_estimator(cfg.train, M, phases, init_rng), cfg.train);
                L.trainers.emplace_back(std::move(agent), *L.envs.back(), n);
            }
            if (cfg.record_measurements)
            {
                L.pending.resize(L.trainers.size());
                for (std::size_t n = 0; n < L.trainers.size(); ++n)
                {
                    const BeamTrainer *t = &L.trainers[n];
                    auto *buf = &L.pending[n];
                    L.envs[n]->set_sample_log([t, buf](const QuantizedBeam &w, const ClusterEnvironment::Sample &smp)
                                              { buf->push_back({t->step_count(), w.hash(), smp.slot, smp.value}); });
                }
            }
        }

        OrchestrationSchedule schedule{K, 0, cfg.train.P, cfg.train.Q};
        for (std::size_t round = 0; round < cfg.train.budget; ++round)
        {
            for (std::size_t k = 0; k < K; ++k)
            {
                if (cfg.frozen_bs && *cfg.frozen_bs == k)
                    continue;
                ++schedule.slots;
                auto &L = learners[k].access(k);
                detail::parallel_for(L.trainers.size(), cfg.workers, [&](std::size_t n)
                                     { L.trainers[n].step(L.rngs[n]); });
                if (L.cache)
                    for (auto &stage : L.stages)
                    {
                        for (auto &[key, samples] : stage)
                            L.cache->append(key, samples);
                        stage.clear();
                    }
                for (auto &buf : L.pending)
                {
                    L.measurements.insert(L.measurements.end(), buf.begin(), buf.end());
                    buf.clear();
                }
                if (cfg.policy == PolicyKind::CoLearning && cfg.shared_codebook)
                {
                    std::vector<QuantizedBeam> now;
                    for (const auto &t : L.trainers)
                        now.push_back(t.current_beam());
                    live[k]->publish(std::move(now));
                }
            }
        }

        LearningResult out;
        out.schedule = schedule;
        for (std::size_t k = 0; k < K; ++k)
        {
            auto &L = learners[k].access(k);
            BsLearningResult r;
            r.bs = k;
            r.initial = L.initial;
            r.clusters = L.clusters;
            if (L.trainers.empty())
                r.codebook = L.initial;
            else
            {
                r.learned = true;
                std::vector<QuantizedBeam> beams;
                for (const auto &t : L.trainers)
                {
                    const TrainResult tr = t.result();
                    beams.push_back(tr.best_beam);
                    r.best.push_back(tr.best);
                    r.logs.push_back(tr.log);
                }
                r.codebook = Codebook(std::move(beams));
            }
            r.measurements = std::move(L.measurements);
            if (L.cache)
            {
                r.cache_keys = L.cache->keys();
                r.cache_samples = L.cache->total_samples();
            }
            out.bs.push_back(std::move(r));
        }
        out.cross_bs_accesses = audit.cross_bs_accesses();
        return out;
    }
}

#endif
