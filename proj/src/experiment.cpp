#include "zonosmooth/experiment.hpp"

#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "zonosmooth/interval1d.hpp"
#include "zonosmooth/serialization.hpp"

namespace zonosmooth::experiment {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_csv(const std::string& path) {
    const auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "# zonosmooth-csv v1\n";
    return out;
}

// Deterministic parallel map over trial indices: results land in
// index-addressed slots, so scheduling cannot affect the outcome.
template <typename Fn>
void for_each_trial(int trials, Fn&& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers <= 1 || trials <= 1) {
        for (int t = 0; t < trials; ++t) fn(t);
        return;
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) {
        pool.emplace_back([&] {
            try {
                for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                next.store(trials);  // drain remaining work
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

nlohmann::json box_to_json(const cz::ConstrainedZonotope& Z) {
    return serialization::to_json(Z);
}

cz::ConstrainedZonotope range_from_json(const nlohmann::json& j, const char* field) {
    try {
        if (j.is_object() && j.contains("box")) {
            const auto& b = j.at("box");
            const auto lo = b.at("lower").get<std::vector<double>>();
            const auto hi = b.at("upper").get<std::vector<double>>();
            Eigen::VectorXd l = Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size());
            Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(hi.data(), hi.size());
            return cz::ConstrainedZonotope::from_box({l, u});
        }
        return serialization::zonotope_from_json(j);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config field '") + field +
                                    "': " + e.what());
    }
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument(std::string("config field '") + field +
                                    "': expected an array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            throw std::invalid_argument(std::string("config field '") + field +
                                        "': ragged rows");
        for (int c = 0; c < cols; ++c) M(i, c) = j[i][c].get<double>();
    }
    return M;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

model::Interval interval_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument(std::string("config field '") + field +
                                    "': expected [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

LinearConfig::LinearConfig() : sys(model::default_linear_system()) {
    for (int i = 0; i < 8; ++i) rts.q_grid.push_back(0.01 + i * 0.02);
    for (int i = 0; i < 8; ++i) rts.r_grid.push_back(0.01 + i * 0.02);
}

void LinearConfig::validate() const {
    sys.validate();
    if (horizon < 0) throw std::invalid_argument("config: horizon must be >= 0");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (hull_window < 0) throw std::invalid_argument("config: hull_window must be >= 0");
    if (oracle_delta <= 0.0) throw std::invalid_argument("config: oracle_delta must be > 0");
}

ScalarConfig::ScalarConfig() : sys(model::default_scalar_system()) {}

void ScalarConfig::validate() const {
    sys.validate();
    if (horizon < 0) throw std::invalid_argument("config: horizon must be >= 0");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (oracle_delta <= 0.0) throw std::invalid_argument("config: oracle_delta must be > 0");
}

Eigen::VectorXd point_estimate(const cz::ConstrainedZonotope& Z) {
    return cz::interval_hull(Z).center();
}

MseSeries mse_series(const std::vector<std::vector<Eigen::VectorXd>>& estimates,
                     const std::vector<std::vector<Eigen::VectorXd>>& truths) {
    if (estimates.size() != truths.size())
        throw std::invalid_argument("mse_series: trial count mismatch");
    if (estimates.empty()) throw std::invalid_argument("mse_series: no trials");
    const std::size_t steps = estimates[0].size();
    MseSeries out;
    out.per_k.assign(steps, 0.0);
    for (std::size_t t = 0; t < estimates.size(); ++t) {
        if (estimates[t].size() != steps || truths[t].size() != steps)
            throw std::invalid_argument("mse_series: series length mismatch");
        for (std::size_t k = 0; k < steps; ++k)
            out.per_k[k] += (estimates[t][k] - truths[t][k]).squaredNorm();
    }
    for (auto& v : out.per_k) v /= static_cast<double>(estimates.size());
    for (double v : out.per_k) out.aggregate += v;
    out.aggregate /= static_cast<double>(steps);
    return out;
}

LinearRunResult run_linear_experiment(const LinearConfig& cfg,
                                      const rts::RtsConfig* rts_params) {
    cfg.validate();
    const int T = cfg.horizon;

    filter::FilterOptions fopt;
    fopt.compress = cfg.compress;
    smoother::SmootherOptions sopt;
    sopt.compress = cfg.compress;

    LinearRunResult res;
    res.trials.resize(cfg.trials);

    std::vector<std::vector<Eigen::VectorXd>> states(cfg.trials);
    for_each_trial(cfg.trials, [&](int trial) {
      try {
        const model::Trajectory traj =
            model::simulate_linear(cfg.sys, T, cfg.seed, trial);
        const auto fs = filter::run_filter(cfg.sys, traj, fopt);
        const auto so = smoother::run_smoother(fs, cfg.sys, sopt);

        TrialRecord rec;
        rec.filtered_diam.resize(T + 1);
        rec.smoothed_diam.resize(T + 1);
        rec.filtered_hull.resize(T + 1);
        rec.smoothed_hull.resize(T + 1);
        rec.sms_sq_error.resize(T + 1);
        rec.rts_sq_error.assign(T + 1, 0.0);
        rec.filtered_contains.resize(T + 1);
        rec.smoothed_contains.resize(T + 1);

        for (int k = 0; k <= T; ++k) {
            const auto& x = traj.states[k];
            rec.filtered_hull[k] = cz::interval_hull(fs[k].posterior);
            rec.smoothed_hull[k] = cz::interval_hull(so.smoothed[k]);
            rec.filtered_diam[k] =
                (rec.filtered_hull[k].upper - rec.filtered_hull[k].lower).maxCoeff();
            rec.smoothed_diam[k] =
                (rec.smoothed_hull[k].upper - rec.smoothed_hull[k].lower).maxCoeff();
            rec.sms_sq_error[k] =
                (rec.smoothed_hull[k].center() - x).squaredNorm();
            rec.filtered_contains[k] = cz::contains_point(fs[k].posterior, x);
            rec.smoothed_contains[k] = cz::contains_point(so.smoothed[k], x);
        }

        if (rts_params != nullptr) {
            const auto kf = rts::kalman_filter(cfg.sys, traj.measurements, *rts_params);
            const auto sm = rts::rts_smooth(kf, cfg.sys);
            for (int k = 0; k <= T; ++k)
                rec.rts_sq_error[k] = (sm[k].mean - traj.states[k]).squaredNorm();
        }

        states[trial] = traj.states;
        res.trials[trial] = std::move(rec);
      } catch (const std::exception& e) {
        // reproduction context for emptiness and solver flags
        throw std::runtime_error("trial " + std::to_string(trial) + " (seed " +
                                 std::to_string(cfg.seed) + "): " + e.what());
      }
    });

    res.states_trial0 = states[0];
    res.avg_filtered_diam.assign(T + 1, 0.0);
    res.avg_smoothed_diam.assign(T + 1, 0.0);
    res.mse_sms.assign(T + 1, 0.0);
    res.mse_rts.assign(T + 1, 0.0);
    for (const auto& rec : res.trials) {
        for (int k = 0; k <= T; ++k) {
            res.avg_filtered_diam[k] += rec.filtered_diam[k];
            res.avg_smoothed_diam[k] += rec.smoothed_diam[k];
            res.mse_sms[k] += rec.sms_sq_error[k];
            res.mse_rts[k] += rec.rts_sq_error[k];
        }
    }
    for (int k = 0; k <= T; ++k) {
        res.avg_filtered_diam[k] /= cfg.trials;
        res.avg_smoothed_diam[k] /= cfg.trials;
        res.mse_sms[k] /= cfg.trials;
        res.mse_rts[k] /= cfg.trials;
    }
    return res;
}

ScalarRunResult run_scalar_experiment(const ScalarConfig& cfg) {
    cfg.validate();
    const int T = cfg.horizon;
    ScalarRunResult res;
    res.trials.resize(cfg.trials);
    std::vector<std::vector<double>> states(cfg.trials);

    for_each_trial(cfg.trials, [&](int trial) {
        const model::Trajectory traj =
            model::simulate_scalar(cfg.sys, T, cfg.seed, trial);
        const auto fs = interval1d::run_filter_1d(cfg.sys, traj);
        const auto sm = interval1d::run_smoother_1d(fs, cfg.sys);

        ScalarTrialRecord rec;
        rec.filtered_width.resize(T + 1);
        rec.smoothed_width.resize(T + 1);
        rec.filtered_iv.resize(T + 1);
        rec.smoothed_iv.resize(T + 1);
        rec.filtered_contains.resize(T + 1);
        rec.smoothed_contains.resize(T + 1);
        std::vector<double> xs(T + 1);
        for (int k = 0; k <= T; ++k) {
            const double x = traj.states[k](0);
            xs[k] = x;
            rec.filtered_iv[k] = fs[k].posterior;
            rec.smoothed_iv[k] = sm[k];
            rec.filtered_width[k] = fs[k].posterior.width();
            rec.smoothed_width[k] = sm[k].width();
            rec.filtered_contains[k] = fs[k].posterior.contains(x, 1e-9);
            rec.smoothed_contains[k] = sm[k].contains(x, 1e-9);
        }
        states[trial] = std::move(xs);
        res.trials[trial] = std::move(rec);
    });

    res.states_trial0 = states[0];
    res.avg_filtered_width.assign(T + 1, 0.0);
    res.avg_smoothed_width.assign(T + 1, 0.0);
    for (const auto& rec : res.trials) {
        for (int k = 0; k <= T; ++k) {
            res.avg_filtered_width[k] += rec.filtered_width[k];
            res.avg_smoothed_width[k] += rec.smoothed_width[k];
        }
    }
    for (int k = 0; k <= T; ++k) {
        res.avg_filtered_width[k] /= cfg.trials;
        res.avg_smoothed_width[k] /= cfg.trials;
    }
    return res;
}

void write_diameters_csv(const LinearRunResult& r, const std::string& path) {
    auto out = open_csv(path);
    out << "k,avg_filtered_diam,avg_smoothed_diam\n";
    for (std::size_t k = 0; k < r.avg_filtered_diam.size(); ++k)
        out << k << ',' << fmt(r.avg_filtered_diam[k]) << ','
            << fmt(r.avg_smoothed_diam[k]) << "\n";
}

void write_diameters_csv(const ScalarRunResult& r, const std::string& path) {
    auto out = open_csv(path);
    out << "k,avg_filtered_diam,avg_smoothed_diam\n";
    for (std::size_t k = 0; k < r.avg_filtered_width.size(); ++k)
        out << k << ',' << fmt(r.avg_filtered_width[k]) << ','
            << fmt(r.avg_smoothed_width[k]) << "\n";
}

void write_mse_csv(const LinearRunResult& r, const std::string& path) {
    auto out = open_csv(path);
    out << "k,mse_sms_center,mse_rts\n";
    for (std::size_t k = 0; k < r.mse_sms.size(); ++k)
        out << k << ',' << fmt(r.mse_sms[k]) << ',' << fmt(r.mse_rts[k]) << "\n";
}

void write_hulls_csv(const LinearRunResult& r, int window, const std::string& path) {
    auto out = open_csv(path);
    out << "k,x1,x2,filt_lo1,filt_hi1,filt_lo2,filt_hi2,"
           "smooth_lo1,smooth_hi1,smooth_lo2,smooth_hi2\n";
    if (r.trials.empty()) return;
    const auto& rec = r.trials[0];
    const int T = static_cast<int>(rec.filtered_hull.size()) - 1;
    const int last = std::min(window, T);
    for (int k = 0; k <= last; ++k) {
        const auto& f = rec.filtered_hull[k];
        const auto& s = rec.smoothed_hull[k];
        out << k << ',' << fmt(r.states_trial0[k](0)) << ',' << fmt(r.states_trial0[k](1));
        out << ',' << fmt(f.lower(0)) << ',' << fmt(f.upper(0)) << ',' << fmt(f.lower(1))
            << ',' << fmt(f.upper(1));
        out << ',' << fmt(s.lower(0)) << ',' << fmt(s.upper(0)) << ',' << fmt(s.lower(1))
            << ',' << fmt(s.upper(1)) << "\n";
    }
}

void write_hulls_csv(const ScalarRunResult& r, int window, const std::string& path) {
    auto out = open_csv(path);
    out << "k,x,filt_lo,filt_hi,smooth_lo,smooth_hi\n";
    if (r.trials.empty()) return;
    const auto& rec = r.trials[0];
    const int T = static_cast<int>(rec.filtered_iv.size()) - 1;
    const int last = std::min(window, T);
    for (int k = 0; k <= last; ++k) {
        out << k << ',' << fmt(r.states_trial0[k]);
        out << ',' << fmt(rec.filtered_iv[k].a) << ',' << fmt(rec.filtered_iv[k].b);
        out << ',' << fmt(rec.smoothed_iv[k].a) << ',' << fmt(rec.smoothed_iv[k].b) << "\n";
    }
}

void write_rts_grid_csv(const rts::TuneResult& t, const std::string& path) {
    auto out = open_csv(path);
    out << "q,r,mse\n";
    for (const auto& row : t.table)
        out << fmt(row[0]) << ',' << fmt(row[1]) << ',' << fmt(row[2]) << "\n";
}

LinearConfig linear_config_from_json(const nlohmann::json& j) {
    LinearConfig cfg;
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<int>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("compress")) cfg.compress = j.at("compress").get<bool>();
    if (j.contains("hull_window")) cfg.hull_window = j.at("hull_window").get<int>();
    if (j.contains("oracle_delta")) cfg.oracle_delta = j.at("oracle_delta").get<double>();
    if (j.contains("output_dir")) cfg.out_dir = j.at("output_dir").get<std::string>();
    if (j.contains("system")) {
        const auto& s = j.at("system");
        if (s.contains("Phi")) cfg.sys.phi = {matrix_from_json(s.at("Phi"), "Phi")};
        if (s.contains("Gamma")) cfg.sys.gamma = {matrix_from_json(s.at("Gamma"), "Gamma")};
        if (s.contains("Xi")) cfg.sys.xi = {matrix_from_json(s.at("Xi"), "Xi")};
        if (s.contains("Psi")) cfg.sys.psi = {matrix_from_json(s.at("Psi"), "Psi")};
        if (s.contains("w_range")) cfg.sys.w_range = range_from_json(s.at("w_range"), "w_range");
        if (s.contains("v_range")) cfg.sys.v_range = range_from_json(s.at("v_range"), "v_range");
        if (s.contains("x0_range"))
            cfg.sys.x0_range = range_from_json(s.at("x0_range"), "x0_range");
    }
    if (j.contains("rts")) {
        const auto& s = j.at("rts");
        if (s.contains("q_grid")) cfg.rts.q_grid = s.at("q_grid").get<std::vector<double>>();
        if (s.contains("r_grid")) cfg.rts.r_grid = s.at("r_grid").get<std::vector<double>>();
        if (s.contains("trials")) cfg.rts.trials = s.at("trials").get<int>();
    }
    cfg.validate();
    return cfg;
}

ScalarConfig scalar_config_from_json(const nlohmann::json& j) {
    ScalarConfig cfg;
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<int>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("hull_window")) cfg.hull_window = j.at("hull_window").get<int>();
    if (j.contains("oracle_delta")) cfg.oracle_delta = j.at("oracle_delta").get<double>();
    if (j.contains("output_dir")) cfg.out_dir = j.at("output_dir").get<std::string>();
    if (j.contains("system")) {
        const auto& s = j.at("system");
        double alpha = cfg.sys.meas_gain;
        model::Interval w = cfg.sys.w_range, v = cfg.sys.v_range, x0 = cfg.sys.x0_range;
        if (s.contains("alpha")) alpha = s.at("alpha").get<double>();
        if (s.contains("w_range")) w = interval_from_json(s.at("w_range"), "w_range");
        if (s.contains("v_range")) v = interval_from_json(s.at("v_range"), "v_range");
        if (s.contains("x0_range")) x0 = interval_from_json(s.at("x0_range"), "x0_range");
        model::MonotoneMap eta = cfg.sys.eta;
        if (s.contains("eta")) {
            const std::string name = s.at("eta").get<std::string>();
            if (name == "cbrt_plus_identity")
                eta = model::cbrt_plus_identity();
            else if (name == "identity")
                eta = model::MonotoneMap([](double x) { return x; }, true, -100, 100,
                                         "identity");
            else
                throw std::invalid_argument("config field 'eta': unknown map '" + name +
                                            "' (expected cbrt_plus_identity or identity)");
        }
        cfg.sys = model::ScalarAffineSystem{eta, alpha, w, v, x0};
    }
    cfg.validate();
    return cfg;
}

nlohmann::json to_json(const LinearConfig& cfg) {
    nlohmann::json j;
    j["type"] = "linear";
    j["horizon"] = cfg.horizon;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["compress"] = cfg.compress;
    j["hull_window"] = cfg.hull_window;
    j["oracle_delta"] = cfg.oracle_delta;
    j["output_dir"] = cfg.out_dir;
    j["system"]["Phi"] = matrix_to_json(cfg.sys.phi_at(0));
    j["system"]["Gamma"] = matrix_to_json(cfg.sys.gamma_at(0));
    j["system"]["Xi"] = matrix_to_json(cfg.sys.xi_at(0));
    j["system"]["Psi"] = matrix_to_json(cfg.sys.psi_at(0));
    j["system"]["w_range"] = box_to_json(cfg.sys.w_range);
    j["system"]["v_range"] = box_to_json(cfg.sys.v_range);
    j["system"]["x0_range"] = box_to_json(cfg.sys.x0_range);
    j["rts"]["q_grid"] = cfg.rts.q_grid;
    j["rts"]["r_grid"] = cfg.rts.r_grid;
    j["rts"]["trials"] = cfg.rts.trials;
    return j;
}

nlohmann::json to_json(const ScalarConfig& cfg) {
    nlohmann::json j;
    j["type"] = "scalar";
    j["horizon"] = cfg.horizon;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["hull_window"] = cfg.hull_window;
    j["oracle_delta"] = cfg.oracle_delta;
    j["output_dir"] = cfg.out_dir;
    j["system"]["eta"] = cfg.sys.eta.name();
    j["system"]["alpha"] = cfg.sys.meas_gain;
    j["system"]["w_range"] = {cfg.sys.w_range.a, cfg.sys.w_range.b};
    j["system"]["v_range"] = {cfg.sys.v_range.a, cfg.sys.v_range.b};
    j["system"]["x0_range"] = {cfg.sys.x0_range.a, cfg.sys.x0_range.b};
    return j;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    return j;
}

}  // namespace zonosmooth::experiment
