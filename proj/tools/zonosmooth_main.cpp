#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "zonosmooth/experiment.hpp"
#include "zonosmooth/filter.hpp"
#include "zonosmooth/grid_oracle.hpp"
#include "zonosmooth/interval1d.hpp"
#include "zonosmooth/rts.hpp"
#include "zonosmooth/smoother.hpp"

using namespace zonosmooth;

namespace {

struct CommonFlags {
    std::string config_path;
    int trials = -1;
    long long seed = -1;
    std::string out_dir;
    bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "configuration file (JSON)");
    cmd->add_option("--trials", f.trials, "override the trial count");
    cmd->add_option("--seed", f.seed, "override the base seed");
    cmd->add_option("--out", f.out_dir, "override the output directory");
    cmd->add_flag("--full-scale", f.full_scale, "run the full 5000-trial protocol");
}

bool is_scalar_config(const CommonFlags& f) {
    if (f.config_path.empty()) return false;
    auto j = experiment::load_config_file(f.config_path);
    return j.value("type", std::string("linear")) == "scalar";
}

experiment::LinearConfig linear_config(const CommonFlags& f) {
    experiment::LinearConfig cfg;
    if (!f.config_path.empty())
        cfg = experiment::linear_config_from_json(experiment::load_config_file(f.config_path));
    if (f.trials > 0) cfg.trials = f.trials;
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.full_scale) cfg.trials = 5000;
    cfg.validate();
    return cfg;
}

experiment::ScalarConfig scalar_config(const CommonFlags& f) {
    experiment::ScalarConfig cfg;
    if (!f.config_path.empty())
        cfg = experiment::scalar_config_from_json(experiment::load_config_file(f.config_path));
    if (f.trials > 0) cfg.trials = f.trials;
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.full_scale) cfg.trials = 5000;
    cfg.validate();
    return cfg;
}

std::string join(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

int run_filter_cmd(const CommonFlags& f) {
    if (is_scalar_config(f)) {
        auto cfg = scalar_config(f);
        auto res = experiment::run_scalar_experiment(cfg);
        experiment::write_diameters_csv(res, join(cfg.out_dir, "diameters.csv"));
        experiment::write_hulls_csv(res, cfg.hull_window, join(cfg.out_dir, "hulls_trial0.csv"));
        std::printf("filter: %d trials, T=%d -> %s\n", cfg.trials, cfg.horizon,
                    cfg.out_dir.c_str());
        return 0;
    }
    auto cfg = linear_config(f);
    filter::FilterOptions fopt;
    fopt.compress = cfg.compress;

    std::vector<double> avg(cfg.horizon + 1, 0.0);
    std::vector<cz::IntervalBox> hulls0;
    std::vector<Eigen::VectorXd> states0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        auto traj = model::simulate_linear(cfg.sys, cfg.horizon, cfg.seed, trial);
        auto fs = filter::run_filter(cfg.sys, traj, fopt);
        for (int k = 0; k <= cfg.horizon; ++k) {
            auto h = cz::interval_hull(fs[k].posterior);
            avg[k] += (h.upper - h.lower).maxCoeff();
            if (trial == 0) hulls0.push_back(h);
        }
        if (trial == 0) states0 = traj.states;
    }
    for (auto& v : avg) v /= cfg.trials;

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream out(join(cfg.out_dir, "diameters.csv"));
        out << "# zonosmooth-csv v1\nk,avg_filtered_diam\n";
        char buf[32];
        for (int k = 0; k <= cfg.horizon; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", avg[k]);
            out << k << ',' << buf << "\n";
        }
    }
    {
        std::ofstream out(join(cfg.out_dir, "hulls_trial0.csv"));
        out << "# zonosmooth-csv v1\nk,x1,x2,filt_lo1,filt_hi1,filt_lo2,filt_hi2\n";
        char buf[32];
        const int last = std::min(cfg.hull_window, cfg.horizon);
        for (int k = 0; k <= last; ++k) {
            out << k;
            const double vals[6] = {states0[k](0),      states0[k](1),
                                    hulls0[k].lower(0), hulls0[k].upper(0),
                                    hulls0[k].lower(1), hulls0[k].upper(1)};
            for (double v : vals) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << ',' << buf;
            }
            out << "\n";
        }
    }
    std::printf("filter: %d trials, T=%d -> %s\n", cfg.trials, cfg.horizon,
                cfg.out_dir.c_str());
    return 0;
}

int run_smooth_cmd(const CommonFlags& f) {
    if (is_scalar_config(f)) {
        auto cfg = scalar_config(f);
        auto res = experiment::run_scalar_experiment(cfg);
        experiment::write_diameters_csv(res, join(cfg.out_dir, "diameters.csv"));
        experiment::write_hulls_csv(res, cfg.hull_window, join(cfg.out_dir, "hulls_trial0.csv"));
        std::printf("smooth: %d trials, T=%d -> %s\n", cfg.trials, cfg.horizon,
                    cfg.out_dir.c_str());
        return 0;
    }
    auto cfg = linear_config(f);
    auto res = experiment::run_linear_experiment(cfg);
    experiment::write_diameters_csv(res, join(cfg.out_dir, "diameters.csv"));
    experiment::write_hulls_csv(res, cfg.hull_window, join(cfg.out_dir, "hulls_trial0.csv"));
    std::printf("smooth: %d trials, T=%d -> %s\n", cfg.trials, cfg.horizon,
                cfg.out_dir.c_str());
    return 0;
}

int run_compare_rts_cmd(const CommonFlags& f, double q, double r) {
    auto cfg = linear_config(f);
    rts::RtsConfig rcfg;
    if (q >= 0.0 && r >= 0.0) {
        rcfg.q = q;
        rcfg.r = r;
        std::printf("compare-rts: fixed parameters q=%g r=%g\n", q, r);
    } else {
        auto tuned = rts::tune_grid(cfg.sys, cfg.horizon, cfg.rts.trials,
                                    cfg.rts.q_grid, cfg.rts.r_grid, cfg.seed);
        rcfg.q = tuned.best_q;
        rcfg.r = tuned.best_r;
        experiment::write_rts_grid_csv(tuned, join(cfg.out_dir, "rts_grid.csv"));
        std::printf("compare-rts: tuned q=%g r=%g (grid mse %.5f)\n", tuned.best_q,
                    tuned.best_r, tuned.best_mse);
    }
    auto res = experiment::run_linear_experiment(cfg, &rcfg);
    experiment::write_diameters_csv(res, join(cfg.out_dir, "diameters.csv"));
    experiment::write_mse_csv(res, join(cfg.out_dir, "mse.csv"));
    experiment::write_hulls_csv(res, cfg.hull_window, join(cfg.out_dir, "hulls_trial0.csv"));

    double sms = 0.0, kal = 0.0;
    for (std::size_t k = 0; k < res.mse_sms.size(); ++k) {
        sms += res.mse_sms[k];
        kal += res.mse_rts[k];
    }
    sms /= res.mse_sms.size();
    kal /= res.mse_rts.size();
    std::printf("compare-rts: mean MSE over k: set-membership %.5f, rts %.5f -> %s\n",
                sms, kal, cfg.out_dir.c_str());
    return 0;
}

int run_tune_rts_cmd(const CommonFlags& f) {
    auto cfg = linear_config(f);
    auto tuned = rts::tune_grid(cfg.sys, cfg.horizon, cfg.rts.trials, cfg.rts.q_grid,
                                cfg.rts.r_grid, cfg.seed);
    experiment::write_rts_grid_csv(tuned, join(cfg.out_dir, "rts_grid.csv"));
    std::printf("tune-rts: best q=%g r=%g mse=%.5f (%zu pairs) -> %s\n", tuned.best_q,
                tuned.best_r, tuned.best_mse, tuned.table.size(), cfg.out_dir.c_str());
    return 0;
}

int run_oracle_check_cmd(const CommonFlags& f, int horizon) {
    if (is_scalar_config(f)) {
        auto cfg = scalar_config(f);
        auto traj = model::simulate_scalar(cfg.sys, horizon, cfg.seed);
        auto fs = interval1d::run_filter_1d(cfg.sys, traj);
        auto sm = interval1d::run_smoother_1d(fs, cfg.sys);
        double lo = 1e300, hi = -1e300;
        for (const auto& st : fs) {
            lo = std::min(lo, st.posterior.a);
            hi = std::max(hi, st.posterior.b);
        }
        const double margin = 0.1 * (hi - lo) + 0.1;
        std::vector<double> ys;
        for (const auto& y : traj.measurements) ys.push_back(y(0));
        auto gf = grid_oracle::grid_filter_scalar(cfg.sys, ys, lo - margin, hi + margin,
                                                  cfg.oracle_delta);
        auto gs = grid_oracle::grid_smooth_scalar(gf, cfg.sys, cfg.oracle_delta);
        bool ok = true;
        std::filesystem::create_directories(cfg.out_dir);
        for (int k = 0; k <= horizon; ++k) {
            auto h = grid_oracle::hull_of_grid(gs[k]);
            const double gap =
                std::max(std::abs(h.lower(0) - sm[k].a), std::abs(h.upper(0) - sm[k].b));
            std::printf("k=%d smoothed [%.4f, %.4f] oracle [%.4f, %.4f] gap %.4f\n", k,
                        sm[k].a, sm[k].b, h.lower(0), h.upper(0), gap);
            ok = ok && gap <= 2.0 * cfg.oracle_delta;
            grid_oracle::write_grid_csv(
                gs[k], join(cfg.out_dir, ("oracle_smoothed_k" + std::to_string(k) + ".csv").c_str()));
        }
        std::printf("oracle-check: %s\n", ok ? "agreement within 2*delta" : "MISMATCH");
        return ok ? 0 : 1;
    }

    auto cfg = linear_config(f);
    auto traj = model::simulate_linear(cfg.sys, horizon, cfg.seed);
    auto fs = filter::run_filter(cfg.sys, traj);
    auto sm = smoother::run_smoother(fs, cfg.sys);

    cz::IntervalBox dom = cz::interval_hull(fs[0].posterior);
    for (std::size_t k = 1; k < fs.size(); ++k) {
        auto h = cz::interval_hull(fs[k].posterior);
        dom.lower = dom.lower.cwiseMin(h.lower);
        dom.upper = dom.upper.cwiseMax(h.upper);
    }
    dom = dom.inflated(0.1 * (dom.upper - dom.lower).maxCoeff() + 0.1);

    auto gf = grid_oracle::grid_filter(cfg.sys, traj.measurements, dom, cfg.oracle_delta);
    auto gs = grid_oracle::grid_smooth(gf, cfg.sys, cfg.oracle_delta);
    bool ok = true;
    std::filesystem::create_directories(cfg.out_dir);
    for (int k = 0; k <= horizon; ++k) {
        auto hull_cz = cz::interval_hull(sm.smoothed[k]);
        auto hull_gr = grid_oracle::hull_of_grid(gs[k]);
        const double gap =
            std::max((hull_cz.lower - hull_gr.lower).lpNorm<Eigen::Infinity>(),
                     (hull_cz.upper - hull_gr.upper).lpNorm<Eigen::Infinity>());
        std::printf("k=%d smoothed hull gap %.4f (limit %.4f)\n", k, gap,
                    2.0 * cfg.oracle_delta);
        ok = ok && gap <= 2.0 * cfg.oracle_delta;
        grid_oracle::write_grid_csv(
            gs[k], join(cfg.out_dir, ("oracle_smoothed_k" + std::to_string(k) + ".csv").c_str()));
    }
    std::printf("oracle-check: %s\n", ok ? "agreement within 2*delta" : "MISMATCH");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zonosmooth: guaranteed state estimation with constrained zonotopes"};
    app.require_subcommand(1);

    CommonFlags flags;
    double q = -1.0, r = -1.0;
    int oracle_horizon = 2;

    auto* c_filter = app.add_subcommand("filter", "forward set-membership filter run");
    add_common(c_filter, flags);
    auto* c_smooth = app.add_subcommand("smooth", "filter + backward smoother run");
    add_common(c_smooth, flags);
    auto* c_rts = app.add_subcommand("compare-rts", "smoother vs tuned Gaussian baseline");
    add_common(c_rts, flags);
    c_rts->add_option("--q", q, "fixed process-noise variance (skips tuning)");
    c_rts->add_option("--r", r, "fixed measurement-noise variance (skips tuning)");
    auto* c_tune = app.add_subcommand("tune-rts", "grid-tune the Gaussian baseline");
    add_common(c_tune, flags);
    auto* c_oracle = app.add_subcommand("oracle-check", "cross-check against the lattice oracle");
    add_common(c_oracle, flags);
    c_oracle->add_option("--horizon", oracle_horizon, "steps for the oracle instance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_filter->parsed()) return run_filter_cmd(flags);
        if (c_smooth->parsed()) return run_smooth_cmd(flags);
        if (c_rts->parsed()) return run_compare_rts_cmd(flags, q, r);
        if (c_tune->parsed()) return run_tune_rts_cmd(flags);
        if (c_oracle->parsed()) return run_oracle_check_cmd(flags, oracle_horizon);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
