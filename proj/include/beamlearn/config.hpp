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


#ifndef BEAMLEARN_CONFIG_HPP
#define BEAMLEARN_CONFIG_HPP

#include "agent.hpp"
#include "cache.hpp"
#include "common.hpp"
#include "orchestrator.hpp"
#include "policy.hpp"
#include "scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

// Run configuration: flat "key = value" text, one entry per line.
//
//   # comment until end of line
//   array.antennas = 16
//   measure.cache  = top-up
//
// Keys are fixed (see config_keys()); unknown or repeated keys are errors. Values are trimmed; booleans
// accept true/false. Every key has a default, so an empty file is a valid configuration.

namespace beamlearn
{
    enum class ValueType
    {
        UInt,
        Real,
        Bool,
        Choice
    };

    struct KeySpec
    {
        std::string key;
        ValueType type;
        std::string default_value;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        std::vector<std::string> choices;
        std::string doc;
    };

    inline const std::vector<KeySpec> &config_keys()
    {
        using V = ValueType;
        constexpr double inf = std::numeric_limits<double>::infinity();
        static const std::vector<KeySpec> keys = {
            {"seed", V::UInt, "1", 0, inf, {}, "master seed; every random stream is derived from it"},
            {"workers", V::UInt, "0", 0, 1024, {}, "worker threads, 0 = available cores"},
            {"policy", V::Choice, "colearn", 0, 0, {"random", "dft", "colearn"}, "interferer policy"},

            {"array.antennas", V::UInt, "16", 1, 1024, {}, "M, antennas per BS"},
            {"array.spacing", V::Real, "0.5", 1e-6, 100, {}, "element spacing in wavelengths"},

            {"codebook.beams", V::UInt, "16", 1, 4096, {}, "N, beams per learned codebook"},
            {"codebook.phase_bits", V::UInt, "4", 1, 8, {}, "r, phase shifter resolution in bits"},
            {"codebook.baseline_beams", V::UInt, "16", 1, 4096, {}, "size of the beamsteering baseline / dft interferer codebook"},

            {"network.bs_count", V::UInt, "2", 2, 64, {}, "K, number of base stations"},
            {"network.bs_spacing", V::Real, "80", 1e-3, 1e6, {}, "distance between neighbouring BSs along x (m)"},
            {"network.bs_stagger", V::Real, "20", -1e6, 1e6, {}, "y offset per BS index (m)"},

            {"grid.rows", V::UInt, "20", 1, 100000, {}, "user rows along y"},
            {"grid.cols", V::UInt, "10", 1, 100000, {}, "user columns along x"},
            {"grid.width", V::Real, "60", 1e-3, 1e6, {}, "grid extent along x (m)"},
            {"grid.height", V::Real, "70", 1e-3, 1e6, {}, "grid extent along y (m)"},
            {"grid.offset", V::Real, "30", -1e6, 1e6, {}, "y of the first user row (m)"},

            {"channel.user_paths", V::UInt, "1", 1, 64, {}, "paths per user channel (first is LOS)"},
            {"channel.interference_paths", V::UInt, "1", 1, 64, {}, "paths per BS-to-BS channel (first is LOS)"},
            {"channel.nlos_offset_db", V::Real, "-15", -200, 0, {}, "NLOS path power relative to LOS"},
            {"channel.interference_gain_ratio", V::Real, "10", 1e-9, 1e9, {}, "BS-to-BS LOS magnitude over the strongest user LOS magnitude"},
            {"channel.reference_distance", V::Real, "50", 1e-6, 1e9, {}, "distance with unit LOS magnitude (m)"},

            {"measure.p", V::UInt, "10", 1, 1000000, {}, "P, interference-only samples per beam"},
            {"measure.q", V::UInt, "10", 1, 1000000, {}, "Q, signal-plus-interference samples per measured user"},
            {"measure.users_per_step", V::UInt, "0", 0, 1000000, {}, "users measured per step, 0 = whole cluster"},
            {"measure.noise_power", V::Real, "0", 0, 1e12, {}, "receiver noise power added to every sample"},
            {"measure.cache", V::Choice, "off", 0, 0, {"off", "top-up", "replace"}, "use of the per-BS interference cache"},

            {"train.budget", V::UInt, "20000", 1, 1e9, {}, "steps per beam"},
            {"train.epsilon_start", V::Real, "1", 0, 1, {}, "initial exploration rate"},
            {"train.epsilon_end", V::Real, "0.05", 0, 1, {}, "final exploration rate"},
            {"train.epsilon_decay_fraction", V::Real, "0.5", 1e-9, 1, {}, "fraction of the budget over which epsilon decays linearly"},
            {"train.discount", V::Real, "0.5", 0, 0.999999, {}, "TD discount"},
            {"train.learning_rate", V::Real, "0.001", 1e-12, 10, {}, "value estimator step size"},
            {"train.replay_capacity", V::UInt, "4096", 1, 1e8, {}, "replay buffer size"},
            {"train.batch_size", V::UInt, "16", 1, 1e6, {}, "TD minibatch size"},
            {"train.estimator", V::Choice, "mlp", 0, 0, {"mlp", "tabular"}, "value estimator"},
            {"train.reward", V::Choice, "binary", 0, 0, {"binary", "ratio"}, "reward rule"},
            {"train.episode_length", V::UInt, "200", 0, 1e9, {}, "steps between restarts from the best beam, 0 = never"},
            {"train.shared_codebook", V::Bool, "true", 0, 0, {}, "transmit with the beams being learned"},
            {"train.frozen_bs", V::Choice, "none", 0, 0, {}, "BS index that keeps its beamsteering codebook, or none"},

            {"eval.snr_db", V::Real, "30", -300, 300, {}, "Px / sigma^2 for rate evaluation (dB)"},
            {"eval.sir_cap_db", V::Real, "120", 0, 1000, {}, "clamp for SIR summaries and maps (dB)"},
            {"eval.pattern_points", V::UInt, "720", 1, 1e7, {}, "angular grid intervals over [0, pi]"},

            {"roc.trials", V::UInt, "2000", 0, 1e9, {}, "beam pairs per ROC curve"},
            {"roc.p_list", V::Choice, "1,3,5,10", 0, 0, {}, "comma-separated P values, one curve each"},
            {"roc.gamma_min_exp", V::Real, "-3", -300, 300, {}, "smallest threshold exponent (base 10)"},
            {"roc.gamma_max_exp", V::Real, "3", -300, 300, {}, "largest threshold exponent (base 10)"},
            {"roc.gamma_points", V::UInt, "121", 1, 1e6, {}, "log-spaced thresholds (gamma = 1 is always added)"},

            {"theory.instances", V::UInt, "50", 1, 1e7, {}, "closed-form vs Monte-Carlo instances"},
            {"theory.mc_draws", V::UInt, "100000", 1, 1e9, {}, "random beams per Monte-Carlo estimate"},
            {"theory.pairs", V::UInt, "10000", 1, 1e9, {}, "beam pairs for the ordering audit"},
            {"theory.bound_trials", V::UInt, "10000", 1, 1e9, {}, "random projections for the eigenvalue bounds"},
            {"theory.asymptotic_trials", V::UInt, "200", 1, 1e9, {}, "trials per array size for the coupling asymptotics"},
            {"theory.max_paths", V::UInt, "4", 1, 64, {}, "largest path count drawn in the audits"},
        };
        return keys;
    }

    inline const KeySpec &key_spec(const std::string &key)
    {
        for (const auto &k : config_keys())
            if (k.key == key)
                return k;
        throw ConfigError("unknown configuration key '" + key + "'");
    }

    namespace detail
    {
        inline std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        inline bool parse_uint(const std::string &v, std::uint64_t &out)
        {
            if (v.empty() || !std::isdigit(static_cast<unsigned char>(v[0])))
                return false;
            const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
            return r.ec == std::errc() && r.ptr == v.data() + v.size();
        }

        inline bool parse_real(const std::string &v, double &out)
        {
            if (v.empty())
                return false;
            std::istringstream is(v);
            is.imbue(std::locale::classic());
            is >> out;
            return !is.fail() && is.eof() && std::isfinite(out);
        }

        inline bool valid_p_list(const std::string &v)
        {
            std::stringstream ss(v);
            std::string item;
            std::size_t n = 0;
            while (std::getline(ss, item, ','))
            {
                std::uint64_t p;
                if (!parse_uint(trim(item), p) || p < 1)
                    return false;
                ++n;
            }
            return n > 0;
        }

        // Checks one value against its spec and returns it normalized.
        inline std::string check_value(const KeySpec &k, const std::string &raw)
        {
            const std::string v = trim(raw);
            auto range_error = [&]
            {
                std::ostringstream os;
                os << "value '" << v << "' for " << k.key << " outside [" << k.lo << ", " << k.hi << "]";
                return ConfigError(os.str());
            };
            switch (k.type)
            {
            case ValueType::UInt:
            {
                std::uint64_t x;
                if (!parse_uint(v, x))
                    throw ConfigError("value '" + v + "' for " + k.key + " is not a non-negative integer");
                if (static_cast<double>(x) < k.lo || static_cast<double>(x) > k.hi)
                    throw range_error();
                return std::to_string(x);
            }
            case ValueType::Real:
            {
                double x;
                if (!parse_real(v, x))
                    throw ConfigError("value '" + v + "' for " + k.key + " is not a number");
                if (x < k.lo || x > k.hi)
                    throw range_error();
                return v;
            }
            case ValueType::Bool:
                if (v != "true" && v != "false")
                    throw ConfigError("value '" + v + "' for " + k.key + " must be true or false");
                return v;
            default:
                if (k.key == "roc.p_list")
                {
                    if (!valid_p_list(v))
                        throw ConfigError("roc.p_list must be a comma-separated list of positive integers");
                    return v;
                }
                if (k.key == "train.frozen_bs")
                {
                    std::uint64_t x;
                    if (v != "none" && !parse_uint(v, x))
                        throw ConfigError("train.frozen_bs must be a BS index or none");
                    return v;
                }
                if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end())
                {
                    std::string all;
                    for (const auto &c : k.choices)
                        all += (all.empty() ? "" : "|") + c;
                    throw ConfigError("value '" + v + "' for " + k.key + " must be one of " + all);
                }
                return v;
            }
        }
    }

    // Resolved configuration: every key present, either from the file or from its default.
    class RunConfig
    {
    public:
        RunConfig()
        {
            for (const auto &k : config_keys())
                values_[k.key] = k.default_value;
        }

        void set(const std::string &key, const std::string &value) { values_[key] = detail::check_value(key_spec(key), value); }

        const std::string &text(const std::string &key) const
        {
            auto it = values_.find(key);
            if (it == values_.end())
                throw ConfigError("unknown configuration key '" + key + "'");
            return it->second;
        }

        std::uint64_t uint(const std::string &key) const
        {
            std::uint64_t x = 0;
            detail::parse_uint(text(key), x);
            return x;
        }

        std::size_t size(const std::string &key) const { return static_cast<std::size_t>(uint(key)); }

        double real(const std::string &key) const
        {
            double x = 0.0;
            detail::parse_real(text(key), x);
            return x;
        }

        bool flag(const std::string &key) const { return text(key) == "true"; }

        const std::map<std::string, std::string> &values() const { return values_; }

        // Typed view of every key, suitable for a run manifest.
        nlohmann::json to_json() const
        {
            nlohmann::json j = nlohmann::json::object();
            for (const auto &k : config_keys())
            {
                switch (k.type)
                {
                case ValueType::UInt:
                    j[k.key] = uint(k.key);
                    break;
                case ValueType::Real:
                    j[k.key] = real(k.key);
                    break;
                case ValueType::Bool:
                    j[k.key] = flag(k.key);
                    break;
                default:
                    j[k.key] = text(k.key);
                }
            }
            return j;
        }

        // Inverse of to_json (used to re-run from a manifest).
        static RunConfig from_json(const nlohmann::json &j)
        {
            RunConfig c;
            if (!j.is_object())
                throw ConfigError("manifest config must be a JSON object");
            for (const auto &[key, value] : j.items())
            {
                const KeySpec &spec = key_spec(key);
                std::string v;
                if (value.is_string())
                    v = value.get<std::string>();
                else if (value.is_boolean())
                    v = value.get<bool>() ? "true" : "false";
                else if (value.is_number_unsigned() || value.is_number_integer())
                    v = std::to_string(value.get<std::int64_t>());
                else if (value.is_number())
                {
                    std::ostringstream os;
                    os.imbue(std::locale::classic());
                    os.precision(17);
                    os << value.get<double>();
                    v = os.str();
                }
                else
                    throw ConfigError("manifest value for " + key + " has an unsupported type");
                c.set(spec.key, v);
            }
            return c;
        }

    private:
        std::map<std::string, std::string> values_;
    };

    inline RunConfig parse_config_text(const std::string &text, const std::string &source = "<config>")
    {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        std::map<std::string, std::size_t> seen;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            line = detail::trim(line);
            if (line.empty())
                continue;
            const std::string where = source + ":" + std::to_string(lineno) + ": ";
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(where + "expected 'key = value'");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(where + "missing key");
            if (auto it = seen.find(key); it != seen.end())
                throw ConfigError(where + "key '" + key + "' already set on line " + std::to_string(it->second));
            seen[key] = lineno;
            try
            {
                cfg.set(key, value);
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(where + e.what());
            }
        }
        return cfg;
    }

    inline RunConfig parse_config(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_config_text(ss.str(), path);
    }

    inline ScenarioParams scenario_params(const RunConfig &c)
    {
        ScenarioParams p;
        p.antennas = c.size("array.antennas");
        p.spacing = c.real("array.spacing");
        p.bs_count = c.size("network.bs_count");
        p.bs_spacing = c.real("network.bs_spacing");
        p.bs_stagger = c.real("network.bs_stagger");
        p.grid_rows = c.size("grid.rows");
        p.grid_cols = c.size("grid.cols");
        p.grid_width = c.real("grid.width");
        p.grid_height = c.real("grid.height");
        p.grid_offset = c.real("grid.offset");
        p.user_paths = c.size("channel.user_paths");
        p.interference_paths = c.size("channel.interference_paths");
        p.nlos_offset_db = c.real("channel.nlos_offset_db");
        p.interference_gain_ratio = c.real("channel.interference_gain_ratio");
        p.reference_distance = c.real("channel.reference_distance");
        p.seed = c.uint("seed");
        return p;
    }

    inline TrainConfig train_config(const RunConfig &c)
    {
        TrainConfig t;
        t.budget = c.size("train.budget");
        t.P = c.size("measure.p");
        t.Q = c.size("measure.q");
        t.users_per_step = c.size("measure.users_per_step");
        t.noise_power = c.real("measure.noise_power");
        t.cache = cache_mode_from_string(c.text("measure.cache"));
        t.epsilon_start = c.real("train.epsilon_start");
        t.epsilon_end = c.real("train.epsilon_end");
        t.epsilon_decay_fraction = c.real("train.epsilon_decay_fraction");
        t.discount = c.real("train.discount");
        t.learning_rate = c.real("train.learning_rate");
        t.replay_capacity = c.size("train.replay_capacity");
        t.batch_size = c.size("train.batch_size");
        t.estimator = c.text("train.estimator") == "tabular" ? EstimatorKind::Tabular : EstimatorKind::Mlp;
        t.reward = c.text("train.reward") == "ratio" ? RewardKind::Ratio : RewardKind::Binary;
        t.episode_length = c.size("train.episode_length");
        t.validate();
        return t;
    }

    inline std::size_t resolve_workers(std::size_t requested)
    {
        if (requested > 0)
            return requested;
        return std::max(1u, std::thread::hardware_concurrency());
    }

    inline OrchestratorConfig orchestrator_config(const RunConfig &c)
    {
        OrchestratorConfig o;
        o.beams = c.size("codebook.beams");
        o.phase_bits = static_cast<unsigned>(c.uint("codebook.phase_bits"));
        o.policy = policy_kind_from_string(c.text("policy"));
        o.train = train_config(c);
        o.seed = c.uint("seed");
        o.workers = resolve_workers(c.size("workers"));
        o.fixed_beams = c.size("codebook.baseline_beams");
        o.shared_codebook = c.flag("train.shared_codebook");
        if (c.text("train.frozen_bs") != "none")
            o.frozen_bs = c.size("train.frozen_bs");
        return o;
    }

    inline std::vector<std::size_t> roc_p_list(const RunConfig &c)
    {
        std::vector<std::size_t> out;
        std::stringstream ss(c.text("roc.p_list"));
        std::string item;
        while (std::getline(ss, item, ','))
        {
            std::uint64_t p = 0;
            detail::parse_uint(detail::trim(item), p);
            out.push_back(static_cast<std::size_t>(p));
        }
        return out;
    }
}

#endif
