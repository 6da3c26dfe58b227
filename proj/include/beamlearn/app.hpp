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


#ifndef BEAMLEARN_APP_HPP
#define BEAMLEARN_APP_HPP

#include "clustering.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "eval.hpp"
#include "io.hpp"
#include "orchestrator.hpp"
#include "theory_audit.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

// Command implementations behind the beamlearn CLI. Each command reads a resolved RunConfig plus optional
// input files and writes everything into one output directory, together with manifest.json.

namespace beamlearn::app
{
    namespace fs = std::filesystem;

    struct Inputs
    {
        std::optional<std::string> scenario;   // scenario JSON; synthesized from the config when absent
        std::vector<std::string> codebooks;    // one CSV per BS (eval-sir, pattern); baseline when absent
        bool log_measurements = false;         // train: raw measurement logs
    };

    // Tracks files written by a command so that a failed run leaves nothing behind.
    class OutputDir
    {
    public:
        explicit OutputDir(const std::string &dir) : dir_(dir)
        {
            if (dir_.empty())
                throw ConfigError("output directory must not be empty");
            if (fs::exists(dir_) && !fs::is_directory(dir_))
                throw ConfigError("output path '" + dir + "' exists and is not a directory");
            if (!fs::exists(dir_))
            {
                fs::create_directories(dir_);
                created_ = true;
            }
        }

        std::string file(const std::string &name)
        {
            const fs::path p = dir_ / name;
            files_.push_back(p);
            return p.string();
        }

        void rollback() noexcept
        {
            std::error_code ec;
            for (const auto &f : files_)
                fs::remove(f, ec);
            if (created_ && fs::is_empty(dir_, ec))
                fs::remove(dir_, ec);
        }

        const std::vector<fs::path> &files() const { return files_; }

    private:
        fs::path dir_;
        bool created_ = false;
        std::vector<fs::path> files_;
    };

    inline Scenario load_or_synthesize(const RunConfig &cfg, const Inputs &in)
    {
        if (in.scenario)
        {
            Scenario s = load_channel_dataset(*in.scenario, cfg.size("array.antennas"));
            s.geometry.spacing = cfg.real("array.spacing");
            return s;
        }
        return generate_scenario(scenario_params(cfg));
    }

    inline nlohmann::json base_manifest(const std::string &command, const RunConfig &cfg, const Inputs &in)
    {
        nlohmann::json m;
        m["command"] = command;
        m["seed"] = cfg.uint("seed");
        m["config"] = cfg.to_json();
        m["inputs"]["scenario"] = in.scenario ? nlohmann::json(*in.scenario) : nlohmann::json(nullptr);
        m["inputs"]["codebooks"] = in.codebooks;
        return m;
    }

    inline void write_manifest(OutputDir &out, const nlohmann::json &m)
    {
        std::ofstream f(out.file("manifest.json"));
        f << m.dump(2) << '\n';
        if (!f)
            throw std::runtime_error("failed to write manifest");
    }

    // Codebook per BS: given files, or the beamsteering baseline for every BS.
    inline std::vector<Codebook> codebooks_for(const Scenario &s, const RunConfig &cfg, const Inputs &in)
    {
        const PhaseSet phases(static_cast<unsigned>(cfg.uint("codebook.phase_bits")));
        std::vector<Codebook> cbs;
        if (in.codebooks.empty())
        {
            const Codebook base = beamsteering_codebook(s.geometry, cfg.size("codebook.baseline_beams"), phases);
            cbs.assign(s.bs_count(), base);
            return cbs;
        }
        if (in.codebooks.size() != s.bs_count())
            throw ConfigError("expected " + std::to_string(s.bs_count()) + " codebook files, got " + std::to_string(in.codebooks.size()));
        for (const auto &p : in.codebooks)
        {
            cbs.push_back(read_codebook_csv(p, phases));
            if (cbs.back().num_antennas() != s.num_antennas())
                throw ConfigError("codebook '" + p + "' has " + std::to_string(cbs.back().num_antennas()) + " antennas, scenario has " + std::to_string(s.num_antennas()));
        }
        return cbs;
    }

    inline void cmd_synth(const RunConfig &cfg, const Inputs &in, OutputDir &out, std::ostream &log)
    {
        const Scenario s = generate_scenario(scenario_params(cfg));
        save_channel_dataset(s, out.file("scenario.json"));
        write_manifest(out, base_manifest("synth", cfg, in));
        log << "synthesized " << s.users.size() << " users, " << s.bs_count() << " base stations\n";
    }

    inline void cmd_cluster(const RunConfig &cfg, const Inputs &in, OutputDir &out, std::ostream &log)
    {
        const Scenario s = load_or_synthesize(cfg, in);
        const Codebook sensing = sensing_codebook(s.geometry);
        const std::size_t N = cfg.size("codebook.beams");
        std::vector<std::tuple<std::size_t, int, std::size_t>> rows;
        for (std::size_t k = 0; k < s.bs_count(); ++k)
        {
            const auto users = s.users_of(k);
            Rng rng = cluster_stream(cfg.uint("seed"), k);
            const auto clusters = cluster_users(s.channels_of(k), N, sensing, rng);
            for (const auto &c : clusters)
                for (auto i : c.members)
                    rows.emplace_back(k, s.users[users[i]].id, c.id);
            log << "BS " << k << ": " << users.size() << " users in " << clusters.size() << " clusters\n";
        }
        std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b)
                  { return std::get<1>(a) < std::get<1>(b); });
        write_cluster_csv(out.file("clusters.csv"), rows);
        write_manifest(out, base_manifest("cluster", cfg, in));
    }

    inline void cmd_train(const RunConfig &cfg, const Inputs &in, OutputDir &out, std::ostream &log)
    {
        const Scenario s = load_or_synthesize(cfg, in);
        OrchestratorConfig oc = orchestrator_config(cfg);
        oc.record_measurements = in.log_measurements;
        const LearningResult res = run_decentralized_learning(s, oc);

        nlohmann::json m = base_manifest("train", cfg, in);
        m["schedule"] = {{"bs_count", res.schedule.bs_count}, {"slots", res.schedule.slots}, {"p", res.schedule.P}, {"q", res.schedule.Q}, {"order", "round-robin"}};
        m["policy"] = to_string(oc.policy);
        m["budget_per_beam"] = oc.train.budget;
        m["cross_bs_accesses"] = res.cross_bs_accesses;
        for (const auto &b : res.bs)
        {
            const std::string k = std::to_string(b.bs);
            write_codebook_csv(out.file("codebook_bs" + k + ".csv"), b.codebook);
            write_codebook_csv(out.file("initial_codebook_bs" + k + ".csv"), b.initial);
            nlohmann::json entry{{"bs", b.bs}, {"learned", b.learned}, {"beams", b.codebook.size()}, {"cache_keys", b.cache_keys}, {"cache_samples", b.cache_samples}};
            if (b.learned)
            {
                write_training_log_csv(out.file("training_log_bs" + k + ".csv"), b.logs);
                for (const auto &best : b.best)
                    entry["best"].push_back({{"gain", best.gain}, {"interference", best.interference}});
            }
            if (in.log_measurements && b.learned)
                write_measurement_log_csv(out.file("measurements_bs" + k + ".csv"), b.measurements);
            m["bs"].push_back(entry);
            log << "BS " << b.bs << (b.learned ? ": learned " : ": kept ") << b.codebook.size() << " beams\n";
        }
        write_manifest(out, m);
    }

    inline void cmd_eval_sir(const RunConfig &cfg, const Inputs &in, OutputDir &out, std::ostream &log)
    {
        const Scenario s = load_or_synthesize(cfg, in);
        const auto cbs = codebooks_for(s, cfg, in);
        const SirReport rep = sir_map(cbs, s, cfg.real("eval.sir_cap_db"));
        write_sir_csv(out.file("sir_map.csv"), rep);
        const double snr = db_to_linear(cfg.real("eval.snr_db"));
        const RateResult rate = objective_value(cbs, s, snr, 1.0);
        write_rate_csv(out.file("rate.csv"), rate);

        nlohmann::json m = base_manifest("eval-sir", cfg, in);
        m["median_avg_sir_db"] = median(rep.capped_avg());
        m["median_min_sir_db"] = median(rep.capped_min());
        m["objective_bps_hz"] = rate.objective;
        write_manifest(out, m);
        log << "median avg SIR " << m["median_avg_sir_db"].get<double>() << " dB, median min SIR " << m["median_min_sir_db"].get<double>()
            << " dB, objective " << rate.objective << " bit/s/Hz\n";
    }

    inline void cmd_roc(const RunConfig &cfg, const Inputs &in, OutputDir &out, std::ostream &log)
    {
        if (cfg.uint("roc.trials") < 1)
            throw ConfigError("roc.trials must be at least 1");
        const Scenario s = load_or_synthesize(cfg, in);
        const auto &link = s.link(1, 0);
        if (!link.geometry)
            throw ConfigError("roc needs path geometry for the BS 1 -> BS 0 link");
        const PhaseSet phases(static_cast<unsigned>(cfg.uint("codebook.phase_bits")));
        const PolicyKind kind = policy_kind_from_string(cfg.text("policy"));
        InterfererPolicy policy = InterfererPolicy::random_beam(s.num_antennas(), phases);
        if (kind == PolicyKind::FixedCodebookSweep)
            policy = InterfererPolicy::fixed_codebook(beamsteering_codebook(s.geometry, cfg.size("codebook.baseline_beams"), phases));
        else if (kind == PolicyKind::CoLearning)
            throw ConfigError("roc supports the random and dft interferer policies");

        const auto grid = default_gamma_grid(cfg.real("roc.gamma_min_exp"), cfg.real("roc.gamma_max_exp"), cfg.size("roc.gamma_points"));
        std::vector<RocCurve> curves;
        nlohmann::json m = base_manifest("roc", cfg, in);
        for (std::size_t P : roc_p_list(cfg))
        {
            Rng rng = make_stream(cfg.uint("seed"), 0x40CULL, P);
            curves.push_back(roc_curve(*link.geometry, policy, phases, P, grid, cfg.size("roc.trials"), rng, cfg.real("measure.noise_power")));
            const auto &c = curves.back();
            const auto at1 = std::find_if(c.points.begin(), c.points.end(), [](const RocPoint &p)
                                          { return p.gamma == 1.0; });
            m["curves"].push_back({{"p", P}, {"auc", c.auc()}, {"tpr_at_1", at1->tpr}, {"fpr_at_1", at1->fpr}});
            log << "P=" << P << ": AUC " << c.auc() << ", gamma=1 TPR " << at1->tpr << " FPR " << at1->fpr << '\n';
        }
        write_roc_csv(out.file("roc.csv"), curves);
        write_manifest(out, m);
    }

    inline void cmd_pattern(const RunConfig &cfg, const Inputs &in, OutputDir &out, std::ostream &log)
    {
        const Scenario s = load_or_synthesize(cfg, in);
        const auto cbs = codebooks_for(s, cfg, in);
        nlohmann::json m = base_manifest("pattern", cfg, in);
        for (std::size_t k = 0; k < cbs.size(); ++k)
        {
            // the strongest interferer direction seen by BS k
            std::optional<double> az;
            double strongest = -1.0;
            for (std::size_t q = 0; q < s.bs_count(); ++q)
            {
                if (q == k)
                    continue;
                const double p = s.link(q, k).H.squaredNorm();
                if (p > strongest)
                {
                    strongest = p;
                    az = s.los_azimuth(q, k);
                }
            }
            const PatternExport pe = export_patterns(cbs[k], s.geometry, az, cfg.size("eval.pattern_points"));
            const std::string ks = std::to_string(k);
            write_pattern_csv(out.file("pattern_bs" + ks + ".csv"), pe);
            write_pattern_annotations_csv(out.file("pattern_annotations_bs" + ks + ".csv"), pe);
            double shallowest = std::numeric_limits<double>::infinity();
            for (const auto &a : pe.annotations)
                if (a.null_depth_db)
                    shallowest = std::min(shallowest, *a.null_depth_db);
            if (az)
                log << "BS " << k << ": shallowest null toward the interferer " << shallowest << " dB\n";
            m["bs"].push_back({{"bs", k}, {"interference_rad", az ? nlohmann::json(*az) : nlohmann::json(nullptr)},
                               {"shallowest_null_db", az ? nlohmann::json(shallowest) : nlohmann::json(nullptr)}});
        }
        write_manifest(out, m);
    }

    inline void cmd_theory_audit(const RunConfig &cfg, const Inputs &in, OutputDir &out, std::ostream &log)
    {
        const ArrayGeometry geom{cfg.size("array.antennas"), cfg.real("array.spacing"), 'x'};
        geom.validate();
        const PhaseSet phases(static_cast<unsigned>(cfg.uint("codebook.phase_bits")));
        const std::size_t Lmax = cfg.size("theory.max_paths");
        const std::uint64_t seed = cfg.uint("seed");

        Rng r1 = make_stream(seed, 0x7E01ULL);
        const auto cf = closed_form_audit(geom, phases, cfg.size("theory.instances"), std::min<std::size_t>(Lmax, 3), cfg.size("theory.mc_draws"), r1);
        double worst = 0.0;
        for (const auto &c : cf)
            worst = std::max(worst, c.rel_error);

        Rng r2 = make_stream(seed, 0x7E02ULL);
        const OrderingAudit ord = ordering_audit(geom, phases, cfg.size("theory.pairs"), Lmax, r2);
        Rng r3 = make_stream(seed, 0x7E03ULL);
        const BoundAudit bnd = bound_audit(geom, phases, cfg.size("theory.bound_trials"), Lmax, r3);

        Rng r4 = make_stream(seed, 0x7E04ULL);
        const std::vector<std::size_t> Ms{16, 64, 256};
        const auto rows = pi_norm_asymptotics(Ms, 2, cfg.size("theory.asymptotic_trials"), r4);
        write_asymptotics_csv(out.file("asymptotics.csv"), rows);

        nlohmann::json m = base_manifest("theory-audit", cfg, in);
        m["closed_form"] = {{"instances", cf.size()}, {"draws", cfg.size("theory.mc_draws")}, {"max_rel_error", worst}};
        m["ordering"] = {{"pairs", ord.pairs}, {"condition_true", ord.condition_true}, {"violations", ord.violations}};
        m["bounds"] = {{"trials", bnd.trials}, {"weyl_violations", bnd.weyl_violations}, {"rayleigh_violations", bnd.rayleigh_violations}};
        for (std::size_t M : Ms)
        {
            std::vector<double> n, e;
            for (const auto &r : rows)
                if (r.M == M)
                {
                    n.push_back(r.pi_norm2);
                    e.push_back(r.eta_prime);
                }
            m["asymptotics"].push_back({{"M", M}, {"L", 2}, {"median_pi_norm2", median(n)}, {"median_eta_prime", median(e)}});
            log << "M=" << M << " L=2: median ||Pi||_2 " << median(n) << ", median eta' " << median(e) << '\n';
        }
        write_manifest(out, m);
        log << "closed form vs Monte-Carlo: worst relative error " << worst << " over " << cf.size() << " instances\n"
            << "ordering audit: " << ord.violations << " violations in " << ord.condition_true << " qualifying pairs\n"
            << "bound audit: " << bnd.weyl_violations << " Weyl and " << bnd.rayleigh_violations << " Rayleigh violations in " << bnd.trials << " trials\n";
    }

    using Command = void (*)(const RunConfig &, const Inputs &, OutputDir &, std::ostream &);

    inline Command find_command(const std::string &name)
    {
        if (name == "synth")
            return cmd_synth;
        if (name == "cluster")
            return cmd_cluster;
        if (name == "train")
            return cmd_train;
        if (name == "eval-sir")
            return cmd_eval_sir;
        if (name == "roc")
            return cmd_roc;
        if (name == "pattern")
            return cmd_pattern;
        if (name == "theory-audit")
            return cmd_theory_audit;
        throw ConfigError("unknown command '" + name + "'");
    }

    enum ExitCode
    {
        Success = 0,
        ConfigFailure = 2,
        RuntimeFailure = 3
    };

    // Runs one command; on failure every file it wrote is removed. Returns the process exit code.
    inline int run(const std::string &command, const RunConfig &cfg, const Inputs &in, const std::string &out_dir, std::ostream &log, std::ostream &err)
    {
        std::optional<OutputDir> out;
        try
        {
            const Command cmd = find_command(command);
            out.emplace(out_dir);
            cmd(cfg, in, *out, log);
            return Success;
        }
        catch (const ConfigError &e)
        {
            err << "beamlearn " << command << ": configuration error: " << e.what() << '\n';
            if (out)
                out->rollback();
            return ConfigFailure;
        }
        catch (const DimensionError &e)
        {
            err << "beamlearn " << command << ": inconsistent input: " << e.what() << '\n';
            if (out)
                out->rollback();
            return ConfigFailure;
        }
        catch (const FormatError &e)
        {
            err << "beamlearn " << command << ": malformed input: " << e.what() << '\n';
            if (out)
                out->rollback();
            return ConfigFailure;
        }
        catch (const std::exception &e)
        {
            err << "beamlearn " << command << ": " << e.what() << '\n';
            if (out)
                out->rollback();
            return RuntimeFailure;
        }
    }
}

#endif
