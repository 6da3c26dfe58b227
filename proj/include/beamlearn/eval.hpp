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


#ifndef BEAMLEARN_EVAL_HPP
#define BEAMLEARN_EVAL_HPP

#include "codebook.hpp"
#include "common.hpp"
#include "geometry.hpp"
#include "measurement.hpp"
#include "policy.hpp"
#include "scenario.hpp"
#include "theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace beamlearn
{
    // (1/|W2|) sum_f log2(1 + |w^H h|^2 Px / (|w^H H f|^2 Px + sigma2))
    inline double user_rate(const CVector &w, const CVector &h, const Codebook &other, const CMatrix &H, double Px, double sigma2)
    {
        if (other.empty())
            throw ConfigError("user_rate: interfering codebook is empty");
        if (w.size() != h.size() || H.rows() != w.size() || H.cols() != static_cast<Eigen::Index>(other.num_antennas()))
            throw DimensionError("user_rate: inconsistent dimensions");
        if (!(sigma2 > 0.0) && !(Px > 0.0))
            throw ConfigError("user_rate: transmit power and noise power cannot both vanish");
        const double S = std::norm(w.dot(h)) * Px;
        const Eigen::RowVectorXcd wH = w.adjoint() * H;
        double acc = 0.0;
        for (const auto &f : other)
        {
            const double I = std::norm((wH * f.vector())(0)) * Px;
            const double denom = I + sigma2;
            acc += denom > 0.0 ? std::log2(1.0 + S / denom) : (S > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        }
        return acc / static_cast<double>(other.size());
    }

    inline double user_rate(const QuantizedBeam &w, const CVector &h, const Codebook &other, const CMatrix &H, double Px, double sigma2)
    {
        return user_rate(w.vector(), h, other, H, Px, sigma2);
    }

    struct UserRate
    {
        int user_id = 0;
        std::size_t bs = 0;
        double rate_bps_hz = 0.0;
    };

    struct RateResult
    {
        std::vector<UserRate> users;
        double objective = 0.0; // sum over BSs of the per-BS average user rate
    };

    namespace detail
    {
        inline void require_codebooks(const Scenario &s, std::span<const Codebook> codebooks)
        {
            if (codebooks.size() != s.bs_count())
                throw ConfigError("one codebook per base station is required");
            for (const auto &cb : codebooks)
            {
                if (cb.empty())
                    throw ConfigError("codebooks must be non-empty");
                if (cb.num_antennas() != s.num_antennas())
                    throw DimensionError("codebook antenna count does not match the scenario");
            }
        }

        // Visits every joint choice of interfering beams (one beam per other BS) and passes the power sum
        // sum_q |w^H H_qk f_q|^2 of that choice.
        inline void for_each_interference(const CVector &w, std::size_t k, const Scenario &s, std::span<const Codebook> codebooks,
                                          const std::function<void(double)> &visit)
        {
            const std::size_t K = s.bs_count();
            std::vector<std::vector<double>> per; // per interferer: power for each of its beams
            for (std::size_t q = 0; q < K; ++q)
            {
                if (q == k)
                    continue;
                const Eigen::RowVectorXcd wH = w.adjoint() * s.link(q, k).H;
                std::vector<double> p;
                for (const auto &f : codebooks[q])
                    p.push_back(std::norm((wH * f.vector())(0)));
                per.push_back(std::move(p));
            }
            std::vector<std::size_t> idx(per.size(), 0);
            while (true)
            {
                double I = 0.0;
                for (std::size_t i = 0; i < per.size(); ++i)
                    I += per[i][idx[i]];
                visit(I);
                std::size_t i = 0;
                while (i < per.size() && ++idx[i] == per[i].size())
                    idx[i++] = 0;
                if (i == per.size())
                    break;
            }
        }
    }

    // Serving beams by beam training on each BS's own codebook; rates averaged over the interferers' codebooks.
    inline RateResult objective_value(std::span<const Codebook> codebooks, const Scenario &s, double Px, double sigma2)
    {
        detail::require_codebooks(s, codebooks);
        RateResult r;
        for (std::size_t k = 0; k < s.bs_count(); ++k)
        {
            const auto users = s.users_of(k);
            double bs_sum = 0.0;
            for (auto u : users)
            {
                const CVector &h = s.users[u].channels[k];
                const QuantizedBeam &w = codebooks[k][beam_training_select(codebooks[k], h).index];
                const double S = std::norm(w.vector().dot(h)) * Px;
                double acc = 0.0;
                std::size_t n = 0;
                detail::for_each_interference(w.vector(), k, s, codebooks, [&](double I)
                                              { acc += std::log2(1.0 + S / (I * Px + sigma2)); ++n; });
                const double rate = acc / static_cast<double>(n);
                r.users.push_back({s.users[u].id, k, rate});
                bs_sum += rate;
            }
            if (!users.empty())
                r.objective += bs_sum / static_cast<double>(users.size());
        }
        return r;
    }

    struct SirEntry
    {
        int user_id = 0;
        std::size_t bs = 0;
        double x = 0.0, y = 0.0;
        double avg_sir_db = 0.0; // +inf when every interfering beam is nulled
        double min_sir_db = 0.0;
    };

    struct SirReport
    {
        std::vector<SirEntry> users;
        double cap_db = 120.0;

        // Values clamped to [-cap, cap] for rendering and summary statistics.
        std::vector<double> capped_avg() const
        {
            std::vector<double> v;
            for (const auto &u : users)
                v.push_back(std::clamp(u.avg_sir_db, -cap_db, cap_db));
            return v;
        }
        std::vector<double> capped_min() const
        {
            std::vector<double> v;
            for (const auto &u : users)
                v.push_back(std::clamp(u.min_sir_db, -cap_db, cap_db));
            return v;
        }
    };

    // Per user: serving beam by beam training, average SIR over equiprobable interfering beams, and the
    // worst case over those beams.
    inline SirReport sir_map(std::span<const Codebook> codebooks, const Scenario &s, double cap_db = 120.0)
    {
        detail::require_codebooks(s, codebooks);
        SirReport rep;
        rep.cap_db = cap_db;
        const double inf = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < s.users.size(); ++u)
        {
            const std::size_t k = s.serving_bs[u];
            const CVector &h = s.users[u].channels[k];
            const QuantizedBeam &w = codebooks[k][beam_training_select(codebooks[k], h).index];
            const double S = std::norm(w.vector().dot(h));
            double acc = 0.0, worst = 0.0;
            std::size_t n = 0;
            bool unbounded = false;
            detail::for_each_interference(w.vector(), k, s, codebooks, [&](double I)
                                          {
                                              ++n;
                                              worst = std::max(worst, I);
                                              if (I > 0.0)
                                                  acc += S / I;
                                              else if (S > 0.0)
                                                  unbounded = true; });
            SirEntry e;
            e.user_id = s.users[u].id;
            e.bs = k;
            e.x = s.users[u].pos[0];
            e.y = s.users[u].pos[1];
            e.avg_sir_db = unbounded ? inf : linear_to_db(acc / static_cast<double>(n));
            e.min_sir_db = worst > 0.0 ? linear_to_db(S / worst) : (S > 0.0 ? inf : -inf);
            if (S == 0.0)
                e.avg_sir_db = e.min_sir_db = -inf;
            rep.users.push_back(e);
        }
        return rep;
    }

    struct RocPoint
    {
        double gamma = 0.0;
        double tpr = 0.0;
        double fpr = 0.0;
    };

    struct RocCurve
    {
        std::vector<RocPoint> points; // increasing gamma
        std::size_t p_measurements = 0;
        std::size_t trials = 0;
        std::size_t positives = 0; // trials whose ground truth is H0

        // Trapezoidal area under the (FPR, TPR) polyline closed with (0, 0) and (1, 1).
        double auc() const
        {
            std::vector<std::pair<double, double>> xy{{0.0, 0.0}};
            for (const auto &p : points)
                xy.push_back({p.fpr, p.tpr});
            xy.push_back({1.0, 1.0});
            std::stable_sort(xy.begin(), xy.end());
            double a = 0.0;
            for (std::size_t i = 1; i < xy.size(); ++i)
                a += (xy[i].first - xy[i - 1].first) * 0.5 * (xy[i].second + xy[i - 1].second);
            return a;
        }
    };

    // Log-spaced thresholds between 10^lo and 10^hi (inclusive), plus gamma = 1.
    inline std::vector<double> default_gamma_grid(double lo_exp = -3.0, double hi_exp = 3.0, std::size_t n = 121)
    {
        std::vector<double> g;
        for (std::size_t i = 0; i < n; ++i)
            g.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1))));
        g.push_back(1.0);
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        return g;
    }

    // Per trial: two random receive beams, truth from the multipath projections, prediction from the ratio of
    // P-sample interference means. The same trials are scored for every gamma.
    inline RocCurve roc_curve(const InterferenceChannel &ch, const InterfererPolicy &policy, const PhaseSet &phases, std::size_t P,
                              std::vector<double> gamma_grid, std::size_t trials, Rng &rng, double noise_power = 0.0)
    {
        if (trials < 1)
            throw ConfigError("roc: trials must be at least 1");
        if (P < 1)
            throw ConfigError("roc: P must be at least 1");
        if (gamma_grid.empty())
            throw ConfigError("roc: empty threshold grid");
        for (double g : gamma_grid)
            if (!(g > 0.0))
                throw ConfigError("roc: thresholds must be positive");
        std::sort(gamma_grid.begin(), gamma_grid.end());

        const CMatrix H = synth_interference_matrix(ch);
        const std::size_t M = ch.rx_geometry.num_antennas;
        std::vector<double> ratio_h0, ratio_h1;
        for (std::size_t t = 0; t < trials; ++t)
        {
            const QuantizedBeam w = random_beam(M, phases, rng);
            const QuantizedBeam w2 = random_beam(M, phases, rng);
            const bool truth_h0 = build_projection(w, ch).xi_norm2() < build_projection(w2, ch).xi_norm2();
            const double e1 = sample_mean(measure_interference(w, H, policy, P, noise_power, rng));
            const double e2 = sample_mean(measure_interference(w2, H, policy, P, noise_power, rng));
            double ratio;
            if (e2 > 0.0)
                ratio = e1 / e2;
            else
                ratio = e1 > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
            (truth_h0 ? ratio_h0 : ratio_h1).push_back(ratio);
        }

        RocCurve c;
        c.p_measurements = P;
        c.trials = trials;
        c.positives = ratio_h0.size();
        std::sort(ratio_h0.begin(), ratio_h0.end());
        std::sort(ratio_h1.begin(), ratio_h1.end());
        auto rate_below = [](const std::vector<double> &v, double g)
        {
            if (v.empty())
                return 0.0;
            return static_cast<double>(std::lower_bound(v.begin(), v.end(), g) - v.begin()) / static_cast<double>(v.size());
        };
        for (double g : gamma_grid)
            c.points.push_back({g, rate_below(ratio_h0, g), rate_below(ratio_h1, g)});
        return c;
    }

    struct PatternRow
    {
        std::size_t beam_id = 0;
        double angle_rad = 0.0;
        double gain = 0.0;
    };

    struct PatternAnnotation
    {
        std::size_t beam_id = 0;
        double main_lobe_rad = 0.0;
        double main_lobe_gain_db = 0.0;
        std::optional<double> interference_rad;
        std::optional<double> interference_gain_db;
        std::optional<double> null_depth_db; // main-lobe dB minus dB toward the interferer
    };

    struct PatternExport
    {
        std::vector<PatternRow> rows;
        std::vector<PatternAnnotation> annotations;
    };

    // Gain of every beam over `points`+1 azimuths in [0, pi]; null depth uses the exact gain at the interference azimuth.
    inline PatternExport export_patterns(const Codebook &cb, const ArrayGeometry &geom, std::optional<double> interference_azimuth,
                                         std::size_t points = 720)
    {
        if (cb.empty())
            throw ConfigError("export_patterns: empty codebook");
        if (points < 1)
            throw ConfigError("export_patterns: at least one grid interval required");
        const auto grid = angle_grid(0.0, pi, points);
        PatternExport out;
        for (std::size_t b = 0; b < cb.size(); ++b)
        {
            const auto pat = beam_pattern(cb[b], geom, grid);
            PatternAnnotation a;
            a.beam_id = b;
            double best = -1.0;
            for (const auto &p : pat)
            {
                out.rows.push_back({b, p.angle, p.gain});
                if (p.gain > best)
                {
                    best = p.gain;
                    a.main_lobe_rad = p.angle;
                }
            }
            a.main_lobe_gain_db = linear_to_db(best);
            if (interference_azimuth)
            {
                const double az = *interference_azimuth;
                const double g = std::norm(cb[b].vector().dot(array_response(geom, az)));
                a.interference_rad = az;
                a.interference_gain_db = linear_to_db(g);
                a.null_depth_db = a.main_lobe_gain_db - *a.interference_gain_db;
            }
            out.annotations.push_back(a);
        }
        return out;
    }

}

#endif
