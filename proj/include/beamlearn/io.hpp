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


#ifndef BEAMLEARN_IO_HPP
#define BEAMLEARN_IO_HPP

#include "agent.hpp"
#include "clustering.hpp"
#include "codebook.hpp"
#include "eval.hpp"
#include "theory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <tuple>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

namespace beamlearn
{
    namespace detail
    {
        inline bool parse_uint_cell(std::string cell, std::uint64_t &out)
        {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
                cell.pop_back();
            while (!cell.empty() && cell.front() == ' ')
                cell.erase(cell.begin());
            if (cell.empty())
                return false;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), out);
            return r.ec == std::errc() && r.ptr == cell.data() + cell.size();
        }
    }

    // Minimal CSV writer: locale-independent, 17 significant digits, infinities as "inf" / "-inf".
    class CsvWriter
    {
    public:
        explicit CsvWriter(const std::string &path) : out_(path), path_(path)
        {
            if (!out_)
                throw std::runtime_error("cannot open '" + path + "' for writing");
            out_.imbue(std::locale::classic());
            out_.precision(17);
        }

        template <class... T>
        void row(const T &...fields)
        {
            bool first = true;
            ((out_ << (first ? "" : ","), put(fields), first = false), ...);
            out_ << '\n';
            if (!out_)
                throw std::runtime_error("write to '" + path_ + "' failed");
        }

        std::ostream &stream() { return out_; }

    private:
        void put(double v)
        {
            if (std::isinf(v))
                out_ << (v > 0 ? "inf" : "-inf");
            else
                out_ << v;
        }
        template <class T>
        void put(const T &v) { out_ << v; }

        std::ofstream out_;
        std::string path_;
    };

    inline void write_codebook_csv(const std::string &path, const Codebook &cb)
    {
        CsvWriter w(path);
        std::ostringstream head;
        head << "beam_id";
        for (std::size_t m = 0; m < cb.num_antennas(); ++m)
            head << ",p" << m;
        w.stream() << head.str() << '\n';
        for (std::size_t b = 0; b < cb.size(); ++b)
        {
            w.stream() << b;
            for (auto i : cb[b].indices())
                w.stream() << ',' << i;
            w.stream() << '\n';
        }
    }

    inline Codebook read_codebook_csv(const std::string &path, const PhaseSet &phases)
    {
        std::ifstream in(path);
        if (!in)
            throw FormatError("cannot open codebook '" + path + "'");
        std::string line;
        if (!std::getline(in, line) || line.rfind("beam_id", 0) != 0)
            throw FormatError(path + ": missing 'beam_id,...' header");
        std::vector<QuantizedBeam> beams;
        std::size_t lineno = 1;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.empty())
                continue;
            std::stringstream ss(line);
            std::string cell;
            std::vector<QuantizedBeam::Index> idx;
            bool first = true;
            while (std::getline(ss, cell, ','))
            {
                std::uint64_t v = 0;
                if (!detail::parse_uint_cell(cell, v))
                    throw FormatError(path + ":" + std::to_string(lineno) + ": bad integer '" + cell + "'");
                if (first)
                {
                    if (v != beams.size())
                        throw FormatError(path + ":" + std::to_string(lineno) + ": beam ids must be 0, 1, 2, ...");
                    first = false;
                    continue;
                }
                if (v >= phases.size())
                    throw FormatError(path + ":" + std::to_string(lineno) + ": phase index " + std::to_string(v) + " needs more than " + std::to_string(phases.bits()) + " bits");
                idx.push_back(static_cast<QuantizedBeam::Index>(v));
            }
            if (!beams.empty() && idx.size() != beams.front().num_antennas())
                throw FormatError(path + ":" + std::to_string(lineno) + ": inconsistent antenna count");
            if (idx.empty())
                throw FormatError(path + ":" + std::to_string(lineno) + ": no phase indices");
            beams.emplace_back(std::move(idx), phases);
        }
        if (beams.empty())
            throw FormatError(path + ": no beams");
        return Codebook(std::move(beams));
    }

    inline void write_training_log_csv(const std::string &path, const std::vector<std::vector<TrainingLogRow>> &logs)
    {
        CsvWriter w(path);
        w.row("step", "beam_index", "gain_est", "interf_est", "reward", "epsilon", "best_gain", "best_interf");
        for (const auto &log : logs)
            for (const auto &r : log)
                w.row(r.step, r.beam_index, r.gain_est, r.interf_est, r.reward, r.epsilon, r.best_gain, r.best_interf);
    }

    inline void write_asymptotics_csv(const std::string &path, const std::vector<AsymptoticsRow> &rows)
    {
        CsvWriter w(path);
        w.row("M", "L", "trial", "pi_norm2", "eta_prime");
        for (const auto &r : rows)
            w.row(r.M, r.L, r.trial, r.pi_norm2, r.eta_prime);
    }

    inline void write_sir_csv(const std::string &path, const SirReport &rep)
    {
        CsvWriter w(path);
        w.row("user_id", "x", "y", "avg_sir_db", "min_sir_db");
        for (const auto &u : rep.users)
            w.row(u.user_id, u.x, u.y, u.avg_sir_db, u.min_sir_db);
    }

    inline void write_roc_csv(const std::string &path, const std::vector<RocCurve> &curves)
    {
        CsvWriter w(path);
        w.row("gamma", "tpr", "fpr", "trials", "p_measurements");
        for (const auto &c : curves)
            for (const auto &p : c.points)
                w.row(p.gamma, p.tpr, p.fpr, c.trials, c.p_measurements);
    }

    inline void write_rate_csv(const std::string &path, const RateResult &r)
    {
        CsvWriter w(path);
        w.row("user_id", "rate_bps_hz");
        for (const auto &u : r.users)
            w.row(u.user_id, u.rate_bps_hz);
    }

    inline void write_pattern_csv(const std::string &path, const PatternExport &p)
    {
        CsvWriter w(path);
        w.row("beam_id", "angle_rad", "gain");
        for (const auto &r : p.rows)
            w.row(r.beam_id, r.angle_rad, r.gain);
    }

    inline void write_pattern_annotations_csv(const std::string &path, const PatternExport &p)
    {
        CsvWriter w(path);
        w.row("beam_id", "main_lobe_rad", "main_lobe_gain_db", "interference_rad", "interference_gain_db", "null_depth_db");
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto &a : p.annotations)
            w.row(a.beam_id, a.main_lobe_rad, a.main_lobe_gain_db, a.interference_rad.value_or(nan), a.interference_gain_db.value_or(nan),
                  a.null_depth_db.value_or(nan));
    }

    // One row per user: serving BS, user id, cluster id.
    inline void write_cluster_csv(const std::string &path, const std::vector<std::tuple<std::size_t, int, std::size_t>> &rows)
    {
        CsvWriter w(path);
        w.row("bs", "user_id", "cluster_id");
        for (const auto &[bs, user, cluster] : rows)
            w.row(bs, user, cluster);
    }

    inline void write_measurement_log_csv(const std::string &path, const std::vector<MeasurementLogRow> &rows)
    {
        CsvWriter w(path);
        w.row("step", "beam_hash", "slot_type", "sample_value");
        for (const auto &r : rows)
            w.row(r.step, r.beam_hash, r.slot == 'I' ? "I" : "SI", r.value);
    }
}

#endif
