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


#ifndef BEAMLEARN_VALUE_ESTIMATOR_HPP
#define BEAMLEARN_VALUE_ESTIMATOR_HPP

#include "codebook.hpp"
#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace beamlearn
{
    // Training target for one (state, action) pair.
    struct ValueTarget
    {
        const QuantizedBeam *state = nullptr;
        std::size_t action = 0;
        double target = 0.0;
    };

    // Action-value function over (phase configuration, single-phase action).
    class ValueEstimator
    {
    public:
        virtual ~ValueEstimator() = default;
        virtual std::vector<double> q_values(const QuantizedBeam &state) const = 0;
        virtual void update(std::span<const ValueTarget> batch) = 0;
        virtual std::size_t num_actions() const = 0;
    };

    // Lookup table keyed by exact configuration. Only sensible for tiny state spaces.
    class TabularEstimator final : public ValueEstimator
    {
    public:
        TabularEstimator(std::size_t M, const PhaseSet &phases, double learning_rate = 0.1) : actions_(2 * M), lr_(learning_rate)
        {
            const double states = std::pow(static_cast<double>(phases.size()), static_cast<double>(M));
            if (M > 6 || phases.bits() > 2 || states > 4096.0)
                throw ConfigError("tabular value estimator requires M <= 6 and r <= 2");
        }

        std::vector<double> q_values(const QuantizedBeam &state) const override
        {
            auto it = table_.find(state.key());
            return it == table_.end() ? std::vector<double>(actions_, 0.0) : it->second;
        }

        void update(std::span<const ValueTarget> batch) override
        {
            for (const auto &t : batch)
            {
                auto [it, inserted] = table_.try_emplace(t.state->key(), actions_, 0.0);
                double &q = it->second.at(t.action);
                q += lr_ * (t.target - q);
            }
        }

        std::size_t num_actions() const override { return actions_; }

        void set(const QuantizedBeam &state, std::size_t action, double value)
        {
            auto [it, inserted] = table_.try_emplace(state.key(), actions_, 0.0);
            it->second.at(action) = value;
        }

    private:
        std::size_t actions_;
        double lr_;
        std::unordered_map<std::string, std::vector<double>> table_;
    };

    // Two-hidden-layer ReLU perceptron over a per-antenna one-hot phase encoding, trained with Adam on
    // squared TD error of the taken action only.
    class MlpEstimator final : public ValueEstimator
    {
    public:
        MlpEstimator(std::size_t M, const PhaseSet &phases, Rng &rng, double learning_rate = 1e-3, std::size_t hidden = 0)
            : M_(M), levels_(phases.size()), in_(M * phases.size()), hid_(hidden ? hidden : 2 * M), out_(2 * M), lr_(learning_rate)
        {
            const auto H = static_cast<Eigen::Index>(hid_), O = static_cast<Eigen::Index>(out_);
            p_.push_back(he_init(hid_, in_, static_cast<double>(M), rng)); // M inputs are active at a time
            p_.push_back(Eigen::MatrixXd::Zero(H, 1));
            p_.push_back(he_init(hid_, hid_, static_cast<double>(hid_), rng));
            p_.push_back(Eigen::MatrixXd::Zero(H, 1));
            p_.push_back(he_init(out_, hid_, static_cast<double>(hid_), rng) * 0.1);
            p_.push_back(Eigen::MatrixXd::Zero(O, 1));
            for (const auto &p : p_)
                adam_.push_back({Eigen::MatrixXd::Zero(p.rows(), p.cols()), Eigen::MatrixXd::Zero(p.rows(), p.cols())});
        }

        std::vector<double> q_values(const QuantizedBeam &state) const override
        {
            Forward f = forward(state);
            return {f.q.data(), f.q.data() + f.q.size()};
        }

        void update(std::span<const ValueTarget> batch) override
        {
            if (batch.empty())
                return;
            std::vector<Eigen::MatrixXd> grads;
            for (const auto &p : p_)
                grads.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
            const double inv = 1.0 / static_cast<double>(batch.size());

            for (const auto &t : batch)
            {
                const Forward f = forward(*t.state);
                Eigen::VectorXd dq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_));
                const auto a = static_cast<Eigen::Index>(t.action);
                dq[a] = (f.q[a] - t.target) * inv;

                grads[4] += dq * f.h2.transpose();
                grads[5] += dq;
                Eigen::VectorXd dh2 = p_[4].transpose() * dq;
                dh2 = dh2.cwiseProduct((f.z2.array() > 0.0).cast<double>().matrix());
                grads[2] += dh2 * f.h1.transpose();
                grads[3] += dh2;
                Eigen::VectorXd dh1 = p_[2].transpose() * dh2;
                dh1 = dh1.cwiseProduct((f.z1.array() > 0.0).cast<double>().matrix());
                const auto idx = t.state->indices();
                for (std::size_t m = 0; m < M_; ++m)
                    grads[0].col(static_cast<Eigen::Index>(m * levels_ + idx[m])) += dh1;
                grads[1] += dh1;
            }
            adam_step(grads);
        }

        std::size_t num_actions() const override { return out_; }

    private:
        struct Forward
        {
            Eigen::VectorXd z1, h1, z2, h2, q;
        };

        struct AdamState
        {
            Eigen::MatrixXd m, v;
        };

        static Eigen::MatrixXd he_init(std::size_t rows, std::size_t cols, double fan_in, Rng &rng)
        {
            Eigen::MatrixXd W(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
            const double sd = std::sqrt(2.0 / fan_in);
            for (Eigen::Index c = 0; c < W.cols(); ++c)
                for (Eigen::Index r = 0; r < W.rows(); ++r)
                    W(r, c) = sd * standard_normal(rng);
            return W;
        }

        Forward forward(const QuantizedBeam &s) const
        {
            if (s.num_antennas() != M_)
                throw DimensionError("MlpEstimator: state size mismatch");
            Forward f;
            f.z1 = p_[1].col(0);
            const auto idx = s.indices();
            for (std::size_t m = 0; m < M_; ++m)
                f.z1 += p_[0].col(static_cast<Eigen::Index>(m * levels_ + idx[m]));
            f.h1 = f.z1.cwiseMax(0.0);
            f.z2 = p_[2] * f.h1 + p_[3].col(0);
            f.h2 = f.z2.cwiseMax(0.0);
            f.q = p_[4] * f.h2 + p_[5].col(0);
            return f;
        }

        void adam_step(const std::vector<Eigen::MatrixXd> &grads)
        {
            constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
            ++t_;
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
            for (std::size_t i = 0; i < p_.size(); ++i)
            {
                auto &st = adam_[i];
                const auto &g = grads[i];
                st.m = beta1 * st.m + (1.0 - beta1) * g;
                st.v = beta2 * st.v + (1.0 - beta2) * g.cwiseProduct(g);
                p_[i].array() -= lr_ * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + eps);
            }
        }

        std::size_t M_, levels_, in_, hid_, out_;
        double lr_;
        std::size_t t_ = 0;
        std::vector<Eigen::MatrixXd> p_; // W1 b1 W2 b2 W3 b3
        std::vector<AdamState> adam_;
    };
}

#endif
