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


#ifndef BEAMLEARN_POLICY_HPP
#define BEAMLEARN_POLICY_HPP

#include "codebook.hpp"
#include "common.hpp"

#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

namespace beamlearn
{
    // Transmit beams currently radiated by a learning BS. The owning BS publishes; the propagation medium reads.
    class LiveBeams
    {
    public:
        explicit LiveBeams(std::vector<QuantizedBeam> beams = {}) : beams_(std::move(beams)) {}

        void publish(std::vector<QuantizedBeam> beams)
        {
            std::unique_lock lock(mutex_);
            beams_ = std::move(beams);
        }

        void publish(std::size_t index, QuantizedBeam beam)
        {
            std::unique_lock lock(mutex_);
            beams_.at(index) = std::move(beam);
        }

        std::size_t size() const
        {
            std::shared_lock lock(mutex_);
            return beams_.size();
        }

        QuantizedBeam at(std::size_t i) const
        {
            std::shared_lock lock(mutex_);
            return beams_.at(i);
        }

        std::vector<QuantizedBeam> snapshot() const
        {
            std::shared_lock lock(mutex_);
            return beams_;
        }

    private:
        mutable std::shared_mutex mutex_;
        std::vector<QuantizedBeam> beams_;
    };

    enum class PolicyKind
    {
        RandomBeam,
        FixedCodebookSweep,
        CoLearning
    };

    inline std::string to_string(PolicyKind k)
    {
        switch (k)
        {
        case PolicyKind::RandomBeam:
            return "random";
        case PolicyKind::FixedCodebookSweep:
            return "dft";
        default:
            return "colearn";
        }
    }

    inline PolicyKind policy_kind_from_string(const std::string &s)
    {
        if (s == "random")
            return PolicyKind::RandomBeam;
        if (s == "dft")
            return PolicyKind::FixedCodebookSweep;
        if (s == "colearn")
            return PolicyKind::CoLearning;
        throw ConfigError("unknown interferer policy '" + s + "' (expected random|dft|colearn)");
    }

    // How an interfering BS picks its transmit beam for each measurement slot, as seen by the victim.
    class InterfererPolicy
    {
    public:
        static InterfererPolicy random_beam(std::size_t M, PhaseSet phases)
        {
            InterfererPolicy p;
            p.kind_ = PolicyKind::RandomBeam;
            p.M_ = M;
            p.phases_ = phases;
            return p;
        }

        static InterfererPolicy fixed_codebook(Codebook cb)
        {
            if (cb.empty())
                throw ConfigError("fixed codebook policy needs a non-empty codebook");
            InterfererPolicy p;
            p.kind_ = PolicyKind::FixedCodebookSweep;
            p.M_ = cb.num_antennas();
            p.phases_ = cb[0].phase_set();
            p.codebook_ = std::make_shared<const Codebook>(std::move(cb));
            return p;
        }

        static InterfererPolicy co_learning(std::shared_ptr<const LiveBeams> live)
        {
            if (!live || live->size() == 0)
                throw ConfigError("co-learning policy needs published beams");
            InterfererPolicy p;
            p.kind_ = PolicyKind::CoLearning;
            p.live_ = std::move(live);
            const auto first = p.live_->at(0);
            p.M_ = first.num_antennas();
            p.phases_ = first.phase_set();
            return p;
        }

        PolicyKind kind() const { return kind_; }
        std::size_t num_antennas() const { return M_; }

        // RandomBeam: every phase i.i.d. uniform over the phase set, so E[f f^H] = I/M.
        // FixedCodebookSweep and CoLearning: a uniformly chosen beam of the (live) codebook.
        QuantizedBeam draw(Rng &rng) const
        {
            switch (kind_)
            {
            case PolicyKind::RandomBeam:
                return beamlearn::random_beam(M_, phases_, rng);
            case PolicyKind::FixedCodebookSweep:
                return (*codebook_)[uniform_index(rng, codebook_->size())];
            default:
                return live_->at(uniform_index(rng, live_->size()));
            }
        }

    private:
        InterfererPolicy() = default;

        PolicyKind kind_ = PolicyKind::RandomBeam;
        std::size_t M_ = 0;
        PhaseSet phases_{4};
        std::shared_ptr<const Codebook> codebook_;
        std::shared_ptr<const LiveBeams> live_;
    };

    inline QuantizedBeam draw_interferer_beam(const InterfererPolicy &policy, Rng &rng)
    {
        return policy.draw(rng);
    }
}

#endif
