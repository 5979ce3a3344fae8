#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "peellab/eden.hpp"
#include "peellab/experiment.hpp"

namespace {

// reads an eden CSV (n,T,P,V,F) and answers a hull_at_time query
int hull_at_query(const std::string& file, double t) {
    std::ifstream in(file);
    if (!in) {
        std::fprintf(stderr, "cannot open %s\n", file.c_str());
        return 1;
    }
    peellab::ClockedTrajectory traj;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
        peellab::ClockedRow row{};
        if (std::sscanf(line.c_str(), "%" SCNd64 ",%lg,%" SCNd64 ",%" SCNu64 ",%" SCNu64, &row.n,
                        &row.T, &row.P, &row.V, &row.F) == 5)
            traj.rows.push_back(row);
    }
    if (traj.rows.empty()) {
        std::fprintf(stderr, "no rows in %s\n", file.c_str());
        return 1;
    }
    try {
        const peellab::HullSnapshot snap = peellab::hull_at_time(traj, t);
        std::printf("n=%" PRId64 " half_perimeter=%" PRId64 " vertices=%" PRIu64
                    " faces=%" PRIu64 "\n",
                    snap.n, snap.half_perimeter, snap.vertices, snap.faces);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"peeling-process simulators for critical a=2 Boltzmann planar maps"};
    app.require_subcommand(1);
    app.set_config("--config", "", "config file (flat key = value, one section per experiment)");

    peellab::ExperimentConfig cfg;
    if (const char* env = std::getenv("PEELLAB_SEED"))
        cfg.master_seed = std::strtoull(env, nullptr, 10);

    std::string hull_file;
    double hull_t = 0.0;

    auto add_run_options = [&cfg](CLI::App* sub, bool with_law = true) {
        if (with_law) sub->add_option("--law", cfg.law_path, "serialized step-law file");
        sub->add_option("--replicas", cfg.replicas, "independent replicas");
        sub->add_option("--stride", cfg.stride, "recording stride");
        sub->add_option("--seed", cfg.master_seed, "master seed (env PEELLAB_SEED)");
        sub->add_option("--workers", cfg.workers, "worker threads, 0 = core count");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--format", cfg.format, "csv or jsonl")->expected(1);
        sub->add_flag("--check", cfg.check, "evaluate gates; exit 4 on failure");
    };

    CLI::App* calibrate = app.add_subcommand("calibrate", "calibrate the step law");
    calibrate->add_option("--beta-bracket", [&cfg](const std::vector<std::string>& vals) {
        if (vals.size() != 1) return false;
        return std::sscanf(vals[0].c_str(), "%lg,%lg", &cfg.beta_lo, &cfg.beta_hi) == 2;
    }, "shape-parameter bracket lo,hi");
    calibrate->add_option("--cutoff", cfg.cutoff, "stored table depth (>= 1e5)");
    add_run_options(calibrate, false);

    CLI::App* peel = app.add_subcommand("peel", "run the filled-in peeling chain");
    peel->add_option("--mode", cfg.mode, "plane or half-plane");
    peel->add_option("--n-steps", cfg.n_steps, "peel steps per replica");
    peel->add_flag("!--no-volume", cfg.track_volume, "skip hole fills");
    add_run_options(peel);

    CLI::App* layers = app.add_subcommand("layers", "peeling by layers");
    layers->add_option("--n-steps", cfg.n_steps, "height-growth mode: steps per replica");
    layers->add_option("--r-max", cfg.r_max, "hull mode: explore to this radius");
    layers->add_option("--sigma-l", cfg.sigma_l, "also measure the first-layer time at this l");
    layers->add_option("--n-grid", cfg.n_grid, "height recording grid");
    layers->add_flag("!--no-volume", cfg.track_volume, "skip hole fills");
    add_run_options(layers);

    CLI::App* eden = app.add_subcommand("eden", "uniform peeling with exponential clocks");
    eden->add_option("--n-steps", cfg.n_steps, "peel steps per replica");
    eden->add_flag("!--no-volume", cfg.track_volume, "skip hole fills");
    add_run_options(eden);

    CLI::App* perco = app.add_subcommand("perco", "percolation interface exploration");
    perco->add_option("--p", cfg.p, "percolation parameter in (0,1]");
    perco->add_option("--step-cap", cfg.step_cap, "right-censoring cap per cluster");
    add_run_options(perco);

    CLI::App* walk = app.add_subcommand("walk-tau", "entrance-time tails of Cauchy-type walks");
    walk->add_option("--c-plus", cfg.c_plus, "positive tail constant");
    walk->add_option("--c-minus", cfg.c_minus, "negative tail constant");
    walk->add_option("--target-b", cfg.target_b, "centring parameter target");
    walk->add_option("--n-grid", cfg.n_grid, "survival grid");
    add_run_options(walk, false);

    CLI::App* gof = app.add_subcommand("gof", "Cauchy goodness of fit for S_n/n");
    gof->add_option("--n-steps", cfg.n_steps, "walk length n");
    add_run_options(gof);

    CLI::App* hull = app.add_subcommand("hull-at", "query an eden CSV at a clock time");
    hull->add_option("--file", hull_file, "eden replica CSV")->required();
    hull->add_option("--t", hull_t, "clock time")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return peellab::kExitConfigError;
    }

    if (app.got_subcommand(hull)) return hull_at_query(hull_file, hull_t);
    for (CLI::App* sub : app.get_subcommands()) cfg.experiment = sub->get_name();
    return peellab::run_experiment(cfg);
}
