#include "peellab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "peellab/eden.hpp"
#include "peellab/errors.hpp"
#include "peellab/estimators.hpp"
#include "peellab/layers.hpp"
#include "peellab/peel_engine.hpp"
#include "peellab/perco.hpp"
#include "peellab/sampling.hpp"
#include "peellab/step_law.hpp"
#include "peellab/walk_lab.hpp"

namespace peellab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kExperiments[] = {"calibrate", "peel",     "layers", "eden",
                                        "perco",     "walk-tau", "gof"};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["law"] = c.law_path;
    j["beta_lo"] = c.beta_lo;
    j["beta_hi"] = c.beta_hi;
    j["cutoff"] = c.cutoff;
    j["mode"] = c.mode;
    j["n_steps"] = c.n_steps;
    j["r_max"] = c.r_max;
    j["t_max"] = c.t_max;
    j["p"] = c.p;
    j["n_grid"] = c.n_grid;
    j["sigma_l"] = c.sigma_l;
    j["step_cap"] = c.step_cap;
    j["replicas"] = c.replicas;
    j["stride"] = c.stride;
    j["track_volume"] = c.track_volume;
    j["c_plus"] = c.c_plus;
    j["c_minus"] = c.c_minus;
    j["target_b"] = c.target_b;
    j["seed"] = c.master_seed;
    j["workers"] = c.workers;
    j["out"] = c.out_dir;
    j["format"] = c.format;
    j["check"] = c.check;
    return j;
}

struct Gate {
    std::string name;
    double value;
    double target;
    double tolerance; // relative unless abs
    bool relative;
    bool pass;
};

json gate_json(const Gate& g) {
    json j;
    j["name"] = g.name;
    j["value"] = g.value;
    j["target"] = g.target;
    j["tolerance"] = g.tolerance;
    j["relative"] = g.relative;
    j["pass"] = g.pass;
    return j;
}

Gate make_gate(std::string name, double value, double target, double tol, bool relative = true) {
    const double err = relative ? std::fabs(value - target) / std::fabs(target)
                                : std::fabs(value - target);
    return {std::move(name), value, target, tol, relative, err <= tol};
}

class Runner {
public:
    explicit Runner(const ExperimentConfig& config) : cfg_(config) {}

    int run() {
        validate_config(cfg_);
        out_root_ = cfg_.out_dir;
        law_file_override_.clear();
        if (cfg_.experiment == "calibrate" && out_root_.size() > 4 &&
            out_root_.substr(out_root_.size() - 4) == ".tsv") {
            law_file_override_ = out_root_;
            const fs::path parent = fs::path(out_root_).parent_path();
            out_root_ = parent.empty() ? "." : parent.string();
        }
        fs::create_directories(out_root_);

        manifest_ = json();
        manifest_["schema"] = 1;
        manifest_["tool"] = "peellab";
        manifest_["code_version"] = kVersion;
        manifest_["config"] = config_json(cfg_);
        manifest_["complete"] = false;
        if (cfg_.experiment != "calibrate" && !cfg_.law_path.empty()) {
            law_ = StepLaw::load(cfg_.law_path);
            manifest_["law_fingerprint"] = law_.fingerprint_hex();
        }
        write_manifest();
        // the hash feeds every data-file header: normalize away the output
        // path so reruns into different directories stay bit-identical
        json hashed = manifest_;
        hashed["config"].erase("out");
        manifest_hash_ = hex64(fnv1a(hashed.dump(2)));

        report_ = json();
        report_["schema"] = 1;
        report_["experiment"] = cfg_.experiment;
        report_["code_version"] = kVersion;
        report_["manifest_hash"] = manifest_hash_;

        if (cfg_.experiment == "calibrate") run_calibrate();
        else if (cfg_.experiment == "peel") run_peel();
        else if (cfg_.experiment == "layers") run_layers();
        else if (cfg_.experiment == "eden") run_eden();
        else if (cfg_.experiment == "perco") run_perco();
        else if (cfg_.experiment == "walk-tau") run_walk_tau();
        else run_gof();

        bool gates_ok = true;
        json gates = json::array();
        for (const Gate& g : gates_) {
            gates.push_back(gate_json(g));
            gates_ok = gates_ok && g.pass;
        }
        report_["gates"] = gates;
        report_["gates_passed"] = gates_ok;
        write_text(fs::path(out_root_) / "report.json", report_.dump(2) + "\n");

        manifest_["complete"] = true;
        write_manifest();
        if (cfg_.check && !gates_ok) return kExitGateFailed;
        return kExitOk;
    }

private:
    void write_manifest() {
        write_text(fs::path(out_root_) / "manifest.json", manifest_.dump(2) + "\n");
    }

    static void write_text(const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
    }

    std::string file_header_comment(std::int64_t stream_id, const char* extra = "") const {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "# peellab schema=1 experiment=%s manifest=%s stream_id=%" PRId64
                      " seed=%" PRIu64 "%s\n",
                      cfg_.experiment.c_str(), manifest_hash_.c_str(), stream_id,
                      cfg_.master_seed, extra);
        return buf;
    }

    fs::path replica_path(std::int64_t r, const char* ext) const {
        char name[64];
        std::snprintf(name, sizeof(name), "replica_%05" PRId64 ".%s", r, ext);
        return fs::path(out_root_) / name;
    }

    void add_estimate(const std::string& name, double value) {
        report_["estimates"][name] = value;
    }

    // ---- calibrate --------------------------------------------------------
    void run_calibrate() {
        CalibrationOptions opts;
        opts.beta_lo = cfg_.beta_lo;
        opts.beta_hi = cfg_.beta_hi;
        opts.cutoff = cfg_.cutoff;
        const StepLaw law = calibrate(opts);
        const std::string law_path =
            law_file_override_.empty() ? (fs::path(out_root_) / "law.tsv").string()
                                       : law_file_override_;
        law.save(law_path);
        const ValidationReport rep = validate(law);

        report_["law_file"] = law_path;
        report_["law_fingerprint"] = law.fingerprint_hex();
        json v;
        v["beta"] = law.beta();
        v["alpha"] = law.alpha();
        v["p_q"] = law.p_q();
        v["c_q"] = law.c_q();
        v["mass_defect"] = rep.mass_defect;
        v["max_harmonicity_residual"] = rep.max_harmonicity_residual;
        v["worst_residual_l"] = rep.worst_residual_l;
        v["pos_tail_exponent"] = rep.pos_tail_exponent;
        v["neg_tail_exponent"] = rep.neg_tail_exponent;
        v["tail_symmetry"] = rep.tail_symmetry;
        v["min_neg_value"] = rep.min_neg_value;
        v["pv_mean"] = rep.pv_mean;
        v["pass"] = rep.pass;
        report_["validation"] = v;

        gates_.push_back({"mass_defect", std::fabs(rep.mass_defect), 0.0, 1e-8, false,
                          std::fabs(rep.mass_defect) < 1e-8});
        gates_.push_back({"harmonicity_residual", rep.max_harmonicity_residual, 0.0, 1e-8,
                          false, rep.max_harmonicity_residual < 1e-8});
        gates_.push_back(make_gate("pos_tail_exponent", rep.pos_tail_exponent, 2.0, 0.025));
        gates_.push_back(make_gate("neg_tail_exponent", rep.neg_tail_exponent, 2.0, 0.025));
    }

    // ---- peel -------------------------------------------------------------
    void run_peel() {
        const PeelMode mode = cfg_.mode == "plane" ? PeelMode::plane : PeelMode::half_plane;
        const NuSampler nu(law_);
        const int workers = resolve_workers();
        std::vector<std::unique_ptr<PeelEngine>> engines;
        EngineOptions eopts;
        eopts.track_volume = cfg_.track_volume;
        for (int w = 0; w < workers; ++w)
            engines.push_back(std::make_unique<PeelEngine>(law_, nu, eopts));

        std::vector<TrajectoryRow> finals(static_cast<std::size_t>(cfg_.replicas));
        std::mutex io_mutex;
        run_replicas(cfg_.replicas, workers, [&](std::int64_t r) {
            const int w = static_cast<int>(r % workers);
            RngStream rng(cfg_.master_seed, static_cast<std::uint64_t>(r));
            Trajectory traj = engines[static_cast<std::size_t>(w)]->run(mode, cfg_.n_steps,
                                                                        cfg_.stride, rng);
            finals[static_cast<std::size_t>(r)] = traj.rows.back();
            std::lock_guard<std::mutex> lock(io_mutex);
            write_trajectory(r, traj);
        });

        aggregate_peel(finals, mode);
    }

    void write_trajectory(std::int64_t r, const Trajectory& traj) {
        if (cfg_.format == "csv") {
            std::string text = file_header_comment(r);
            text += "n,P,V,F\n";
            char line[128];
            for (const auto& row : traj.rows) {
                std::snprintf(line, sizeof(line), "%" PRId64 ",%" PRId64 ",%" PRIu64 ",%" PRIu64 "\n",
                              row.n, row.P, row.V, row.F);
                text += line;
            }
            write_text(replica_path(r, "csv"), text);
            return;
        }
        json header;
        header["type"] = "header";
        header["schema"] = 1;
        header["law_fingerprint"] = traj.law_fingerprint;
        header["master_seed"] = traj.master_seed;
        header["stream_id"] = traj.stream_id;
        header["mode"] = to_string(traj.mode);
        header["stride"] = traj.stride;
        header["manifest_hash"] = manifest_hash_;
        std::string text = header.dump() + "\n";
        for (const auto& row : traj.rows) {
            json jr;
            jr["n"] = row.n;
            jr["P"] = row.P;
            jr["V"] = row.V;
            jr["F"] = row.F;
            text += jr.dump() + "\n";
        }
        write_text(replica_path(r, "jsonl"), text);
    }

    void aggregate_peel(const std::vector<TrajectoryRow>& finals, PeelMode mode) {
        const double logn = std::log(static_cast<double>(cfg_.n_steps));
        std::vector<double> log_p, log_v, v_over_f, n_over_p;
        for (const auto& row : finals) {
            if (row.P >= 1) {
                log_p.push_back(std::log(static_cast<double>(row.P)) / logn);
                n_over_p.push_back(static_cast<double>(cfg_.n_steps) /
                                   static_cast<double>(row.P));
            }
            if (row.V > 0) log_v.push_back(std::log(static_cast<double>(row.V)) / logn);
            if (row.F > 0 && cfg_.track_volume)
                v_over_f.push_back(static_cast<double>(row.V) / static_cast<double>(row.F));
        }
        add_estimate("median_log_P_over_log_n", median(log_p));
        if (!log_v.empty()) add_estimate("median_log_V_over_log_n", median(log_v));
        if (!v_over_f.empty()) add_estimate("median_V_over_F", median(v_over_f));
        if (mode == PeelMode::plane) {
            double mean_np = 0.0;
            for (const double x : n_over_p) mean_np += x;
            mean_np /= static_cast<double>(n_over_p.size());
            add_estimate("mean_n_over_P", mean_np);
            const double target = 2.0 / (M_PI * M_PI * law_.p_q());
            add_estimate("target_mean_n_over_P", target);
            gates_.push_back(make_gate("mean_n_over_P", mean_np, target, 0.10));
            gates_.push_back(make_gate("median_log_P_over_log_n", median(log_p), 1.0, 0.05));
            if (!log_v.empty())
                gates_.push_back(
                    make_gate("median_log_V_over_log_n", median(log_v), 1.5, 0.0533));
            if (!v_over_f.empty()) {
                const double vf_target = 4.0 / (law_.c_q() - 4.0);
                add_estimate("target_V_over_F", vf_target);
                gates_.push_back(make_gate("median_V_over_F", median(v_over_f), vf_target, 0.10));
            }
        }
    }

    // ---- layers -----------------------------------------------------------
    void run_layers() {
        const NuSampler nu(law_);
        const int workers = resolve_workers();
        EngineOptions eopts;
        eopts.track_volume = cfg_.track_volume;
        std::vector<std::unique_ptr<PeelEngine>> engines;
        for (int w = 0; w < workers; ++w)
            engines.push_back(std::make_unique<PeelEngine>(law_, nu, eopts));

        if (cfg_.r_max > 0) {
            std::vector<std::vector<HullRecord>> all(static_cast<std::size_t>(cfg_.replicas));
            std::mutex io_mutex;
            run_replicas(cfg_.replicas, workers, [&](std::int64_t r) {
                const int w = static_cast<int>(r % workers);
                RngStream rng(cfg_.master_seed, static_cast<std::uint64_t>(r));
                LayerPeeler peeler(*engines[static_cast<std::size_t>(w)]);
                all[static_cast<std::size_t>(r)] = peeler.explore_to_radius(cfg_.r_max, rng);
                std::lock_guard<std::mutex> lock(io_mutex);
                write_hull_records(r, all[static_cast<std::size_t>(r)]);
            });
            aggregate_hulls(all);
        }

        if (cfg_.n_steps > 0) run_layers_height(engines, workers);
        if (cfg_.sigma_l > 0) run_layer_time(nu, workers);
    }

    void write_hull_records(std::int64_t r, const std::vector<HullRecord>& records) {
        std::string text = file_header_comment(r);
        text += "r,theta_r,half_perimeter,vertices,faces\n";
        char line[160];
        for (const auto& rec : records) {
            std::snprintf(line, sizeof(line),
                          "%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRIu64 ",%" PRIu64 "\n", rec.r,
                          rec.theta_r, rec.half_perimeter, rec.vertices, rec.faces);
            text += line;
        }
        write_text(replica_path(r, "csv"), text);
    }

    void aggregate_hulls(const std::vector<std::vector<HullRecord>>& all) {
        // per-radius medians plus the growth trend at the largest radius
        std::string text = file_header_comment(-1);
        text += "r,median_theta,median_half_perimeter,median_vertices,median_faces\n";
        std::vector<double> trend_perim, trend_vol;
        for (std::int64_t rr = 1; rr <= cfg_.r_max; ++rr) {
            std::vector<double> th, hp, vv, ff;
            for (const auto& records : all)
                for (const auto& rec : records)
                    if (rec.r == rr) {
                        th.push_back(static_cast<double>(rec.theta_r));
                        hp.push_back(static_cast<double>(rec.half_perimeter));
                        vv.push_back(static_cast<double>(rec.vertices));
                        ff.push_back(static_cast<double>(rec.faces));
                    }
            if (th.empty()) continue;
            char line[200];
            std::snprintf(line, sizeof(line), "%" PRId64 ",%g,%g,%g,%g\n", rr, median(th),
                          median(hp), median(vv), median(ff));
            text += line;
            if (rr == cfg_.r_max) {
                const double sq = std::sqrt(static_cast<double>(rr));
                for (const double x : hp)
                    if (x >= 1) trend_perim.push_back(std::log(2.0 * x) / sq);
                for (const double x : vv)
                    if (x >= 1) trend_vol.push_back(std::log(x) / sq);
            }
        }
        write_text(fs::path(out_root_) / "hulls_aggregate.csv", text);
        if (!trend_perim.empty()) {
            add_estimate("log_boundary_over_sqrt_r", median(trend_perim));
            add_estimate("target_log_boundary_over_sqrt_r", M_PI * std::sqrt(2.0));
            gates_.push_back(make_gate("log_boundary_over_sqrt_r", median(trend_perim),
                                       M_PI * std::sqrt(2.0), 0.25));
        }
        if (!trend_vol.empty()) {
            add_estimate("log_volume_over_sqrt_r", median(trend_vol));
            add_estimate("target_log_volume_over_sqrt_r", 3.0 * M_PI / std::sqrt(2.0));
            gates_.push_back(make_gate("log_volume_over_sqrt_r", median(trend_vol),
                                       3.0 * M_PI / std::sqrt(2.0), 0.25));
        }
    }

    void run_layers_height(std::vector<std::unique_ptr<PeelEngine>>& engines, int workers) {
        std::vector<std::int64_t> grid = cfg_.n_grid;
        if (grid.empty()) {
            for (std::int64_t g = 10000; g <= cfg_.n_steps; g *= 10) grid.push_back(g);
            if (grid.empty() || grid.back() != cfg_.n_steps) grid.push_back(cfg_.n_steps);
        }
        std::vector<std::vector<double>> h_scaled(grid.size());
        for (auto& v : h_scaled) v.resize(static_cast<std::size_t>(cfg_.replicas));

        std::mutex io_mutex;
        run_replicas(cfg_.replicas, workers, [&](std::int64_t r) {
            const int w = static_cast<int>(r % workers);
            RngStream rng(cfg_.master_seed, static_cast<std::uint64_t>(r));
            LayerPeeler peeler(*engines[static_cast<std::size_t>(w)]);
            LayeredState st = LayerPeeler::initial_state();
            std::size_t g = 0;
            std::string rows;
            for (std::int64_t i = 1; i <= cfg_.n_steps && g < grid.size(); ++i) {
                peeler.layer_step(st, rng);
                if (i == grid[g]) {
                    const double logn = std::log(static_cast<double>(i));
                    h_scaled[g][static_cast<std::size_t>(r)] =
                        static_cast<double>(st.H) / (logn * logn);
                    char line[160];
                    std::snprintf(line, sizeof(line),
                                  "{\"n\":%" PRId64 ",\"P\":%" PRId64 ",\"D\":%" PRId64
                                  ",\"H\":%" PRId64 "}\n",
                                  i, st.es.P, st.D, st.H);
                    rows += line;
                    ++g;
                }
            }
            std::lock_guard<std::mutex> lock(io_mutex);
            std::string text = file_header_comment(r);
            text += rows;
            write_text(replica_path(r, "jsonl"), text);
        });

        json height = json::array();
        double prev = 0.0;
        bool monotone = true;
        double final_value = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double med = median(h_scaled[g]);
            json row;
            row["n"] = grid[g];
            row["median_H_over_log2_n"] = med;
            height.push_back(row);
            if (g > 0 && med < prev) monotone = false;
            prev = med;
            final_value = med;
        }
        report_["height_growth"] = height;
        const double target = 1.0 / (2.0 * M_PI * M_PI);
        add_estimate("median_H_over_log2_n", final_value);
        add_estimate("target_H_over_log2_n", target);
        report_["height_monotone_trend"] = monotone;
        gates_.push_back(make_gate("median_H_over_log2_n", final_value, target, 0.30));
        gates_.push_back({"height_monotone_trend", monotone ? 1.0 : 0.0, 1.0, 0.0, false,
                          monotone});
    }

    void run_layer_time(const NuSampler& nu, int workers) {
        std::vector<double> scaled(static_cast<std::size_t>(cfg_.replicas));
        run_replicas(cfg_.replicas, workers, [&](std::int64_t r) {
            RngStream rng(cfg_.master_seed ^ 0x51a7eb01ULL, static_cast<std::uint64_t>(r));
            const std::int64_t sigma = first_layer_time(nu, cfg_.sigma_l, rng);
            const double l = static_cast<double>(cfg_.sigma_l);
            scaled[static_cast<std::size_t>(r)] =
                static_cast<double>(sigma) * law_.p_q() * std::log(l) / (2.0 * l);
        });
        const double med = median(scaled);
        add_estimate("median_sigma_scaled", med);
        gates_.push_back(make_gate("median_sigma_scaled", med, 1.0, 0.20));
    }

    // ---- eden -------------------------------------------------------------
    void run_eden() {
        const NuSampler nu(law_);
        const int workers = resolve_workers();
        EngineOptions eopts;
        eopts.track_volume = cfg_.track_volume;
        std::vector<std::unique_ptr<PeelEngine>> engines;
        for (int w = 0; w < workers; ++w)
            engines.push_back(std::make_unique<PeelEngine>(law_, nu, eopts));

        struct Final {
            double T;
            std::int64_t P;
            std::uint64_t V;
        };
        std::vector<Final> finals(static_cast<std::size_t>(cfg_.replicas));
        std::mutex io_mutex;
        run_replicas(cfg_.replicas, workers, [&](std::int64_t r) {
            const int w = static_cast<int>(r % workers);
            RngStream rng(cfg_.master_seed, static_cast<std::uint64_t>(r));
            ClockedTrajectory traj = eden_run(*engines[static_cast<std::size_t>(w)],
                                              cfg_.n_steps, cfg_.stride, rng);
            const ClockedRow& last = traj.rows.back();
            finals[static_cast<std::size_t>(r)] = {last.T, last.P, last.V};
            std::lock_guard<std::mutex> lock(io_mutex);
            write_clocked(r, traj);
        });

        const double logn = std::log(static_cast<double>(cfg_.n_steps));
        double mean_t = 0.0;
        std::vector<double> perim_rate, vol_rate;
        for (const auto& f : finals) {
            mean_t += f.T / logn;
            if (f.T > 0.0 && f.P >= 1)
                perim_rate.push_back(std::log(2.0 * static_cast<double>(f.P)) / f.T);
            if (f.T > 0.0 && f.V >= 1)
                vol_rate.push_back(std::log(static_cast<double>(f.V)) / f.T);
        }
        mean_t /= static_cast<double>(finals.size());
        const double target = 1.0 / (M_PI * M_PI * law_.p_q());
        add_estimate("mean_T_over_log_n", mean_t);
        add_estimate("target_T_over_log_n", target);
        gates_.push_back(make_gate("mean_T_over_log_n", mean_t, target, 0.15));
        if (!perim_rate.empty()) {
            add_estimate("median_log_boundary_over_T", median(perim_rate));
            add_estimate("target_log_boundary_over_T", M_PI * M_PI * law_.p_q());
        }
        if (!vol_rate.empty()) {
            add_estimate("median_log_volume_over_T", median(vol_rate));
            add_estimate("target_log_volume_over_T", 1.5 * M_PI * M_PI * law_.p_q());
        }
    }

    void write_clocked(std::int64_t r, const ClockedTrajectory& traj) {
        std::string text = file_header_comment(r);
        text += "n,T,P,V,F\n";
        char line[180];
        for (const auto& row : traj.rows) {
            std::snprintf(line, sizeof(line),
                          "%" PRId64 ",%.17g,%" PRId64 ",%" PRIu64 ",%" PRIu64 "\n", row.n, row.T,
                          row.P, row.V, row.F);
            text += line;
        }
        write_text(replica_path(r, "csv"), text);
    }

    // ---- perco ------------------------------------------------------------
    void run_perco() {
        const NuSampler nu(law_);
        const PercoWalk walk(law_, nu, cfg_.p);
        const int workers = resolve_workers();
        const std::int64_t cap = cfg_.step_cap > 0 ? cfg_.step_cap : 1000000;

        std::vector<ClusterStats> stats(static_cast<std::size_t>(cfg_.replicas));
        run_replicas(cfg_.replicas, workers, [&](std::int64_t r) {
            RngStream rng(cfg_.master_seed, static_cast<std::uint64_t>(r));
            stats[static_cast<std::size_t>(r)] = run_cluster(walk, rng, cap);
        });

        // per-cluster records
        if (cfg_.format == "csv") {
            std::string text = file_header_comment(0);
            text += "p,theta,N,N_prime\n";
            char line[128];
            for (const auto& s : stats) {
                std::snprintf(line, sizeof(line), "%.17g,%" PRId64 ",%" PRId64 ",%" PRId64 "\n",
                              cfg_.p, s.theta, s.N, s.N_prime);
                text += line;
            }
            write_text(fs::path(out_root_) / "clusters.csv", text);
        } else {
            std::string text = file_header_comment(0);
            for (const auto& s : stats) {
                json j;
                j["p"] = cfg_.p;
                j["theta"] = s.theta;
                j["N"] = s.N;
                j["N_prime"] = s.N_prime;
                text += j.dump() + "\n";
            }
            write_text(fs::path(out_root_) / "clusters.jsonl", text);
        }

        // survival curve on a geometric grid
        std::vector<std::int64_t> grid;
        for (std::int64_t n = 1; n <= cap; n = std::max(n + 1, (n * 5) / 4)) grid.push_back(n);
        std::string curve = file_header_comment(0);
        curve += "n,survival\n";
        std::vector<std::pair<double, double>> pts;
        char line[96];
        for (const std::int64_t n : grid) {
            std::int64_t surv = 0;
            for (const auto& s : stats)
                if (s.theta > n || (s.capped && s.theta >= n)) ++surv;
            const double frac = static_cast<double>(surv) / static_cast<double>(stats.size());
            std::snprintf(line, sizeof(line), "%" PRId64 ",%.17g\n", n, frac);
            curve += line;
            if (n >= 100 && surv >= 50) pts.push_back({static_cast<double>(n), frac});
        }
        write_text(fs::path(out_root_) / "survival.csv", curve);

        const double lambda_hat = [&] {
            if (pts.size() < 3) return std::numeric_limits<double>::quiet_NaN();
            double s, rms;
            if (!slope_of_logs(pts, &s, &rms)) return std::numeric_limits<double>::quiet_NaN();
            return -s;
        }();
        const double lambda_pred = lambda_prediction(law_, cfg_.p);
        add_estimate("lambda_hat", lambda_hat);
        add_estimate("lambda_predicted", lambda_pred);
        if (cfg_.p < 0.5) {
            gates_.push_back(make_gate("lambda", lambda_hat, 1.0, 0.15, false));
        } else if (cfg_.p == 0.5) {
            gates_.push_back(make_gate("lambda", lambda_hat, lambda_pred, 0.10, false));
        } else {
            gates_.push_back({"lambda_small", lambda_hat, 0.0, 0.15, false, lambda_hat < 0.15});
        }

        // deterministic cut-edge partial sums
        json cut = json::array();
        for (const std::int64_t w : {100, 1000, 10000}) {
            json row;
            row["window"] = w;
            row["mass"] = cut_edge_mass(law_, w);
            cut.push_back(row);
        }
        report_["cut_edge_mass"] = cut;
    }

    // ---- walk-tau ---------------------------------------------------------
    void run_walk_tau() {
        const CauchyWalkLaw wlaw = make_walk_law(cfg_.c_plus, cfg_.c_minus, cfg_.target_b);
        std::vector<std::int64_t> grid = cfg_.n_grid;
        if (grid.empty())
            for (std::int64_t n = 2; n <= 1000000; n = std::max(n + 1, (n * 3) / 2))
                grid.push_back(n);

        // replicas are split over workers and merged by survival counts
        const int workers = resolve_workers();
        std::vector<SurvivalCurve> parts(static_cast<std::size_t>(workers));
        const std::int64_t per = (cfg_.replicas + workers - 1) / workers;
        run_replicas(workers, workers, [&](std::int64_t w) {
            const std::int64_t count = std::min<std::int64_t>(per, cfg_.replicas - w * per);
            if (count <= 0) return;
            RngStream rng(cfg_.master_seed, static_cast<std::uint64_t>(w));
            const auto tau = tau_samples_sim([&wlaw](RngStream& r) { return wlaw.sample(r); },
                                             count, rng, grid.back() * 100);
            parts[static_cast<std::size_t>(w)] = survival_from_taus(tau, grid);
        });
        SurvivalCurve merged;
        merged.n_grid = grid;
        merged.survivors.assign(grid.size(), 0);
        for (const auto& part : parts) {
            if (part.replicas == 0) continue;
            merged.replicas += part.replicas;
            for (std::size_t g = 0; g < grid.size(); ++g)
                merged.survivors[g] += part.survivors[g];
        }

        std::string curve = file_header_comment(0);
        curve += "n,survivors,replicas\n";
        char line[96];
        std::vector<std::pair<double, double>> pts;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            std::snprintf(line, sizeof(line), "%" PRId64 ",%" PRId64 ",%" PRId64 "\n", grid[g],
                          merged.survivors[g], merged.replicas);
            curve += line;
            if (grid[g] >= 100 && merged.survivors[g] >= 50)
                pts.push_back({static_cast<double>(grid[g]),
                               static_cast<double>(merged.survivors[g]) /
                                   static_cast<double>(merged.replicas)});
        }
        write_text(fs::path(out_root_) / "survival.csv", curve);

        double slope = std::numeric_limits<double>::quiet_NaN(), rms = 0.0;
        if (pts.size() >= 3) slope_of_logs(pts, &slope, &rms);
        const double rho = cfg_.c_plus == cfg_.c_minus
                               ? rho_prediction(wlaw.b(), wlaw.c_plus())
                               : std::numeric_limits<double>::quiet_NaN();
        json pred;
        pred["c_plus"] = cfg_.c_plus;
        pred["c_minus"] = cfg_.c_minus;
        pred["b"] = wlaw.b();
        pred["rho"] = rho;
        write_text(fs::path(out_root_) / "prediction.json", pred.dump(2) + "\n");

        add_estimate("slope", slope);
        add_estimate("rho_predicted", rho);
        if (!std::isnan(rho))
            gates_.push_back(make_gate("tau_slope", -slope, rho, 0.07, false));
    }

    // ---- gof --------------------------------------------------------------
    void run_gof() {
        const NuSampler nu(law_);
        const int workers = resolve_workers();
        std::vector<double> values(static_cast<std::size_t>(cfg_.replicas));
        run_replicas(cfg_.replicas, workers, [&](std::int64_t r) {
            RngStream rng(cfg_.master_seed, static_cast<std::uint64_t>(r));
            std::int64_t s = 0;
            for (std::int64_t i = 0; i < cfg_.n_steps; ++i) s += nu.sample(rng);
            values[static_cast<std::size_t>(r)] =
                static_cast<double>(s) / static_cast<double>(cfg_.n_steps);
        });
        const double scale = M_PI * law_.p_q();
        const double ks =
            ks_statistic(values, [scale](double x) { return cauchy_cdf(x, scale); });
        add_estimate("ks", ks);
        add_estimate("cauchy_scale", scale);
        add_estimate("median_S_n_over_n", median(values));
        const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
        add_estimate("iqr", iqr);
        add_estimate("target_iqr", 2.0 * scale);
        gates_.push_back({"cauchy_ks", ks, 0.0, 0.02, false, ks < 0.02});
    }

    int resolve_workers() const {
        if (cfg_.workers > 0) return cfg_.workers;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }

    ExperimentConfig cfg_;
    std::string out_root_;
    std::string law_file_override_;
    StepLaw law_;
    json manifest_;
    json report_;
    std::string manifest_hash_;
    std::vector<Gate> gates_;
};

} // namespace

void run_replicas(std::int64_t replicas, int workers,
                  const std::function<void(std::int64_t)>& fn) {
    if (workers < 1) workers = 1;
    if (replicas < 1) return;
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::int64_t r = w; r < replicas; r += workers) fn(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void validate_config(const ExperimentConfig& c) {
    const auto* begin = std::begin(kExperiments);
    const auto* end = std::end(kExperiments);
    if (std::find(begin, end, c.experiment) == end)
        throw ConfigError("experiment", "unknown experiment: " + c.experiment);
    if (c.experiment != "calibrate" && c.experiment != "walk-tau" && c.law_path.empty())
        throw ConfigError("law", "experiment '" + c.experiment + "' requires --law");
    if (c.experiment == "peel" || c.experiment == "eden" || c.experiment == "gof") {
        if (c.n_steps < 1) throw ConfigError("n-steps", "n-steps must be >= 1");
    }
    if (c.experiment == "layers" && c.n_steps < 1 && c.r_max < 1 && c.sigma_l < 1)
        throw ConfigError("r-max", "layers needs one of n-steps, r-max, sigma-l");
    if (c.experiment == "peel" && c.mode != "plane" && c.mode != "half-plane")
        throw ConfigError("mode", "mode must be plane or half-plane");
    if (c.experiment == "perco" && !(c.p > 0.0 && c.p <= 1.0))
        throw ConfigError("p", "p must be in (0, 1]");
    if (c.replicas < 1) throw ConfigError("replicas", "replicas must be >= 1");
    if (c.stride < 1) throw ConfigError("stride", "stride must be >= 1");
    if (c.format != "csv" && c.format != "jsonl")
        throw ConfigError("format", "format must be csv or jsonl");
    if (c.out_dir.empty()) throw ConfigError("out", "output path must not be empty");
    if (c.experiment == "walk-tau") {
        if (!(c.c_plus > 0.0) || !(c.c_minus > 0.0))
            throw ConfigError("c-plus", "tail constants must be positive");
        if (c.replicas < 100) throw ConfigError("replicas", "walk-tau needs >= 100 replicas");
    }
}

int run_experiment(const ExperimentConfig& config) {
    try {
        Runner runner(config);
        return runner.run();
    } catch (const ConfigError& e) {
        std::cerr << "config error (" << e.key << "): " << e.what() << "\n";
        return kExitConfigError;
    } catch (const CalibrationFailed& e) {
        std::cerr << "calibration failed: " << e.what() << "\n";
        return kExitCalibrationFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace peellab
