#ifndef ZONOSMOOTH_EXPERIMENT_HPP_
#define ZONOSMOOTH_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zonosmooth/czono.hpp"
#include "zonosmooth/filter.hpp"
#include "zonosmooth/model.hpp"
#include "zonosmooth/rts.hpp"
#include "zonosmooth/smoother.hpp"

namespace zonosmooth::experiment {

struct RtsGridSpec {
    std::vector<double> q_grid;
    std::vector<double> r_grid;
    int trials = 100;
};

struct LinearConfig {
    model::LinearSystem sys;
    int horizon = 50;
    int trials = 200;
    std::uint64_t seed = 1;
    bool compress = true;  // low-order set representations between steps
    int hull_window = 10;  // steps exported to hulls_trial0.csv
    double oracle_delta = 0.05;
    RtsGridSpec rts;
    std::string out_dir = "out";

    LinearConfig();
    void validate() const;
};

struct ScalarConfig {
    model::ScalarAffineSystem sys;
    int horizon = 50;
    int trials = 200;
    std::uint64_t seed = 1;
    int hull_window = 10;
    double oracle_delta = 0.002;
    std::string out_dir = "out";

    ScalarConfig();
    void validate() const;
};

/// Per-trial, per-step records of one Monte-Carlo run.
struct TrialRecord {
    std::vector<double> filtered_diam;          // k = 0..T
    std::vector<double> smoothed_diam;
    std::vector<cz::IntervalBox> filtered_hull;
    std::vector<cz::IntervalBox> smoothed_hull;
    std::vector<double> sms_sq_error;           // |hull center - x_k|^2
    std::vector<double> rts_sq_error;           // |rts smoothed mean - x_k|^2
    std::vector<char> filtered_contains;        // membership of the true state
    std::vector<char> smoothed_contains;
};

struct LinearRunResult {
    std::vector<TrialRecord> trials;
    std::vector<double> avg_filtered_diam;  // per k, mean over trials
    std::vector<double> avg_smoothed_diam;
    std::vector<double> mse_sms;            // per k
    std::vector<double> mse_rts;            // per k (zeros when RTS disabled)
    std::vector<Eigen::VectorXd> states_trial0;
};

struct ScalarTrialRecord {
    std::vector<double> filtered_width;
    std::vector<double> smoothed_width;
    std::vector<model::Interval> filtered_iv;
    std::vector<model::Interval> smoothed_iv;
    std::vector<char> filtered_contains;
    std::vector<char> smoothed_contains;
};

struct ScalarRunResult {
    std::vector<ScalarTrialRecord> trials;
    std::vector<double> avg_filtered_width;
    std::vector<double> avg_smoothed_width;
    std::vector<double> states_trial0;
};

/// Simulates cfg.trials trajectories, runs filter + smoother on each, and
/// collects diameters, hulls, membership checks, and point-estimate errors.
/// When rts_params is given, the Gaussian baseline runs on the same
/// trajectories and its per-step MSE is recorded. Deterministic per seed;
/// trials run concurrently when hardware allows.
LinearRunResult run_linear_experiment(const LinearConfig& cfg,
                                      const rts::RtsConfig* rts_params = nullptr);

ScalarRunResult run_scalar_experiment(const ScalarConfig& cfg);

/// Hull-center point estimate of a bounded nonempty set.
Eigen::VectorXd point_estimate(const cz::ConstrainedZonotope& Z);

struct MseSeries {
    std::vector<double> per_k;
    double aggregate = 0.0;  // mean of per_k
};

/// Mean squared Euclidean error per step, averaged over trials.
/// estimates[trial][k] must align with truths[trial][k].
MseSeries mse_series(const std::vector<std::vector<Eigen::VectorXd>>& estimates,
                     const std::vector<std::vector<Eigen::VectorXd>>& truths);

// --- CSV emission (all files carry the `# zonosmooth-csv v1` header) ---
void write_diameters_csv(const LinearRunResult& r, const std::string& path);
void write_diameters_csv(const ScalarRunResult& r, const std::string& path);
void write_mse_csv(const LinearRunResult& r, const std::string& path);
void write_hulls_csv(const LinearRunResult& r, int window, const std::string& path);
void write_hulls_csv(const ScalarRunResult& r, int window, const std::string& path);
void write_rts_grid_csv(const rts::TuneResult& t, const std::string& path);

// --- configuration files ---
LinearConfig linear_config_from_json(const nlohmann::json& j);
ScalarConfig scalar_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LinearConfig& cfg);
nlohmann::json to_json(const ScalarConfig& cfg);

/// Reads either kind of config; "type" selects "linear" or "scalar".
nlohmann::json load_config_file(const std::string& path);

}  // namespace zonosmooth::experiment

#endif
