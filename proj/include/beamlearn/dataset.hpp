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


#ifndef BEAMLEARN_DATASET_HPP
#define BEAMLEARN_DATASET_HPP

#include "common.hpp"
#include "scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace beamlearn
{
    // Scenario exchange format. Each BS lists every user with that user's channel to the BS; serving BSs are
    // recomputed by associate_users on load. Complex arrays are split into parallel real arrays; H is row-major.
    // Optional extensions written by save_channel_dataset: "pos" per BS and "paths" per interference link.

    namespace detail
    {
        inline nlohmann::json complex_split(const Eigen::Ref<const CVector> &v, bool imag)
        {
            nlohmann::json a = nlohmann::json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i)
                a.push_back(imag ? v[i].imag() : v[i].real());
            return a;
        }

        inline CVector complex_join(const nlohmann::json &re, const nlohmann::json &im, std::size_t expected, const std::string &what)
        {
            if (!re.is_array() || !im.is_array())
                throw FormatError(what + ": expected real and imaginary arrays");
            if (re.size() != expected || im.size() != expected)
                throw DimensionError(what + ": expected " + std::to_string(expected) + " entries, got " + std::to_string(re.size()) + "/" + std::to_string(im.size()));
            CVector v(static_cast<Eigen::Index>(expected));
            for (std::size_t i = 0; i < expected; ++i)
            {
                if (!re[i].is_number() || !im[i].is_number())
                    throw FormatError(what + ": non-numeric entry");
                v[static_cast<Eigen::Index>(i)] = {re[i].get<double>(), im[i].get<double>()};
            }
            return v;
        }

        template <typename T>
        T require(const nlohmann::json &j, const char *key, const std::string &ctx)
        {
            if (!j.is_object() || !j.contains(key))
                throw FormatError(ctx + ": missing key \"" + key + "\"");
            try
            {
                return j.at(key).get<T>();
            }
            catch (const nlohmann::json::exception &e)
            {
                throw FormatError(ctx + ": bad value for \"" + key + "\": " + e.what());
            }
        }
    }

    inline nlohmann::json scenario_to_json(const Scenario &s)
    {
        using nlohmann::json;
        const std::size_t M = s.num_antennas();
        json root;
        root["m"] = M;
        root["bs"] = json::array();
        for (std::size_t k = 0; k < s.bs_count(); ++k)
        {
            json bs;
            bs["id"] = k;
            bs["pos"] = s.bs_positions[k];
            bs["users"] = json::array();
            for (const auto &u : s.users)
            {
                json ju;
                ju["id"] = u.id;
                ju["pos"] = u.pos;
                ju["h_re"] = detail::complex_split(u.channels[k], false);
                ju["h_im"] = detail::complex_split(u.channels[k], true);
                bs["users"].push_back(std::move(ju));
            }
            root["bs"].push_back(std::move(bs));
        }
        root["interference"] = json::array();
        for (const auto &l : s.links)
        {
            json jl;
            jl["from"] = l.from;
            jl["to"] = l.to;
            // row-major flattening
            CVector flat(static_cast<Eigen::Index>(M * M));
            for (std::size_t r = 0; r < M; ++r)
                for (std::size_t c = 0; c < M; ++c)
                    flat[static_cast<Eigen::Index>(r * M + c)] = l.H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            jl["H_re"] = detail::complex_split(flat, false);
            jl["H_im"] = detail::complex_split(flat, true);
            if (l.geometry)
            {
                jl["paths"] = json::array();
                for (const auto &p : l.geometry->paths)
                    jl["paths"].push_back({{"gain_re", p.gain.real()}, {"gain_im", p.gain.imag()}, {"az_r", p.rx_azimuth}, {"el_r", p.rx_elevation}, {"az_t", p.tx_azimuth}, {"el_t", p.tx_elevation}});
            }
            root["interference"].push_back(std::move(jl));
        }
        return root;
    }

    inline Scenario scenario_from_json(const nlohmann::json &root, double spacing = 0.5)
    {
        const auto M = detail::require<std::size_t>(root, "m", "scenario");
        if (M < 1)
            throw FormatError("scenario: m must be positive");
        if (!root.contains("bs") || !root["bs"].is_array() || root["bs"].size() < 2)
            throw FormatError("scenario: \"bs\" must list at least two base stations");

        Scenario s;
        s.geometry = ArrayGeometry{M, spacing, 'x'};
        const auto &bss = root["bs"];
        const std::size_t K = bss.size();

        std::map<int, std::size_t> bs_index;
        std::map<int, std::size_t> user_index;
        for (std::size_t k = 0; k < K; ++k)
        {
            const auto &bs = bss[k];
            const std::string ctx = "bs[" + std::to_string(k) + "]";
            const int id = detail::require<int>(bs, "id", ctx);
            if (!bs_index.emplace(id, k).second)
                throw FormatError(ctx + ": duplicate BS id " + std::to_string(id));
            s.bs_positions.push_back(bs.contains("pos") ? bs["pos"].get<Position>() : Position{0.0, 0.0, 0.0});
            if (!bs.contains("users") || !bs["users"].is_array())
                throw FormatError(ctx + ": missing \"users\" array");
            for (const auto &ju : bs["users"])
            {
                const int uid = detail::require<int>(ju, "id", ctx + ".users");
                const std::string uctx = ctx + ".user " + std::to_string(uid);
                auto [it, inserted] = user_index.emplace(uid, s.users.size());
                if (inserted)
                {
                    UserRecord u;
                    u.id = uid;
                    u.pos = ju.contains("pos") ? ju["pos"].get<Position>() : Position{0.0, 0.0, 0.0};
                    u.channels.assign(K, CVector());
                    s.users.push_back(std::move(u));
                }
                auto &u = s.users[it->second];
                if (u.channels[k].size() != 0)
                    throw FormatError(uctx + ": listed twice");
                u.channels[k] = detail::complex_join(ju.value("h_re", nlohmann::json()), ju.value("h_im", nlohmann::json()), M, uctx);
            }
        }
        for (const auto &u : s.users)
            for (std::size_t k = 0; k < K; ++k)
                if (u.channels[k].size() == 0)
                    throw FormatError("user " + std::to_string(u.id) + " has no channel to BS index " + std::to_string(k));

        if (root.contains("interference"))
        {
            for (const auto &jl : root["interference"])
            {
                const int from = detail::require<int>(jl, "from", "interference");
                const int to = detail::require<int>(jl, "to", "interference");
                if (!bs_index.count(from) || !bs_index.count(to) || from == to)
                    throw FormatError("interference: invalid BS pair " + std::to_string(from) + " -> " + std::to_string(to));
                const std::string ctx = "interference " + std::to_string(from) + "->" + std::to_string(to);
                const CVector flat = detail::complex_join(jl.value("H_re", nlohmann::json()), jl.value("H_im", nlohmann::json()), M * M, ctx);
                InterferenceLink l;
                l.from = bs_index[from];
                l.to = bs_index[to];
                l.H.resize(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
                for (std::size_t r = 0; r < M; ++r)
                    for (std::size_t c = 0; c < M; ++c)
                        l.H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[static_cast<Eigen::Index>(r * M + c)];
                if (jl.contains("paths"))
                {
                    InterferenceChannel ch{{}, s.geometry, s.geometry};
                    for (const auto &jp : jl["paths"])
                        ch.paths.push_back({{detail::require<double>(jp, "gain_re", ctx), detail::require<double>(jp, "gain_im", ctx)},
                                            detail::require<double>(jp, "az_r", ctx), detail::require<double>(jp, "el_r", ctx),
                                            detail::require<double>(jp, "az_t", ctx), detail::require<double>(jp, "el_t", ctx)});
                    l.geometry = std::move(ch);
                }
                s.links.push_back(std::move(l));
            }
        }
        s.serving_bs = associate_users(s);
        return s;
    }

    inline void save_channel_dataset(const Scenario &s, const std::filesystem::path &path)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << scenario_to_json(s).dump(1) << '\n';
        if (!out)
            throw std::runtime_error("failed writing " + path.string());
    }

    inline Scenario load_channel_dataset(const std::filesystem::path &path, std::optional<std::size_t> expected_antennas = std::nullopt)
    {
        std::ifstream in(path);
        if (!in)
            throw FormatError("cannot open " + path.string());
        nlohmann::json root;
        try
        {
            in >> root;
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw FormatError(path.string() + ": " + e.what());
        }
        Scenario s = scenario_from_json(root);
        if (expected_antennas && *expected_antennas != s.num_antennas())
            throw DimensionError(path.string() + ": dataset has " + std::to_string(s.num_antennas()) + " antennas, expected " + std::to_string(*expected_antennas));
        return s;
    }
}

#endif
