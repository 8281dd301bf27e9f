#include "zonosmooth/rts.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace zonosmooth::rts {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& P) {
    return 0.5 * (P + P.transpose());
}

}  // namespace

void RtsConfig::validate() const {
    if (q < 0.0 || r < 0.0)
        throw std::invalid_argument("RtsConfig: q and r must be nonnegative");
    if (P0.size() > 0 && (P0 - P0.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("RtsConfig: P0 must be symmetric");
}

KalmanOutput kalman_filter(const model::LinearSystem& sys,
                           const std::vector<Eigen::VectorXd>& measurements,
                           const RtsConfig& cfg) {
    sys.validate();
    cfg.validate();
    const int n = sys.state_dim();
    const int m = sys.meas_dim();
    const int T = static_cast<int>(measurements.size()) - 1;
    if (T < 0) throw std::invalid_argument("kalman_filter: no measurements");

    Eigen::VectorXd mean = cfg.m0.size() > 0 ? cfg.m0 : Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd cov = cfg.P0.size() > 0 ? cfg.P0 : Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd R = cfg.r * Eigen::MatrixXd::Identity(m, m);

    KalmanOutput out;
    out.filtered.reserve(T + 1);
    out.predicted.reserve(T + 1);
    for (int k = 0; k <= T; ++k) {
        out.predicted.push_back({mean, cov});

        const Eigen::MatrixXd& Xi = sys.xi_at(k);
        const Eigen::MatrixXd S = Xi * cov * Xi.transpose() + R;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
        if (!lu.isInvertible())
            throw std::runtime_error("kalman_filter: singular innovation covariance");
        const Eigen::MatrixXd K = cov * Xi.transpose() * lu.inverse();
        mean = mean + K * (measurements[k] - Xi * mean);
        const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) - K * Xi;
        cov = symmetrized(J * cov * J.transpose() + K * R * K.transpose());
        out.filtered.push_back({mean, cov});

        if (k < T) {
            const Eigen::MatrixXd& Phi = sys.phi_at(k);
            const Eigen::MatrixXd& Gamma = sys.gamma_at(k);
            mean = Phi * mean;
            cov = symmetrized(Phi * cov * Phi.transpose() +
                              cfg.q * Gamma * Gamma.transpose());
        }
    }
    return out;
}

std::vector<GaussianEstimate> rts_smooth(const KalmanOutput& kf,
                                         const model::LinearSystem& sys) {
    const int T = static_cast<int>(kf.filtered.size()) - 1;
    if (T < 0 || kf.predicted.size() != kf.filtered.size())
        throw std::invalid_argument("rts_smooth: incomplete filter output");
    const int n = static_cast<int>(kf.filtered[0].mean.size());

    std::vector<GaussianEstimate> smoothed(T + 1);
    smoothed[T] = kf.filtered[T];
    for (int k = T - 1; k >= 0; --k) {
        const Eigen::MatrixXd& Phi = sys.phi_at(k);
        Eigen::MatrixXd Ppred = kf.predicted[k + 1].covariance;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Ppred);
        if (!lu.isInvertible()) {
            Ppred += 1e-12 * Eigen::MatrixXd::Identity(n, n);
            lu.compute(Ppred);
        }
        const Eigen::MatrixXd C =
            kf.filtered[k].covariance * Phi.transpose() * lu.inverse();
        smoothed[k].mean = kf.filtered[k].mean +
                           C * (smoothed[k + 1].mean - kf.predicted[k + 1].mean);
        smoothed[k].covariance = symmetrized(
            kf.filtered[k].covariance +
            C * (smoothed[k + 1].covariance - kf.predicted[k + 1].covariance) *
                C.transpose());
    }
    return smoothed;
}

double average_mse(const model::LinearSystem& sys, int T, int trials,
                   const RtsConfig& cfg, std::uint64_t seed) {
    double total = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const model::Trajectory traj = model::simulate_linear(sys, T, seed, trial);
        const KalmanOutput kf = kalman_filter(sys, traj.measurements, cfg);
        const auto smoothed = rts_smooth(kf, sys);
        double acc = 0.0;
        for (int k = 0; k <= T; ++k)
            acc += (smoothed[k].mean - traj.states[k]).squaredNorm();
        total += acc / (T + 1);
    }
    return total / trials;
}

TuneResult tune_grid(const model::LinearSystem& sys, int T, int trials,
                     const std::vector<double>& q_grid,
                     const std::vector<double>& r_grid, std::uint64_t seed) {
    if (q_grid.empty() || r_grid.empty())
        throw std::invalid_argument("tune_grid: empty parameter grid");

    // trajectories are shared across parameter pairs, so simulate once
    std::vector<model::Trajectory> trajs;
    trajs.reserve(trials);
    for (int trial = 0; trial < trials; ++trial)
        trajs.push_back(model::simulate_linear(sys, T, seed, trial));

    TuneResult res;
    res.best_mse = std::numeric_limits<double>::infinity();
    for (double q : q_grid) {
        for (double r : r_grid) {
            RtsConfig cfg;
            cfg.q = q;
            cfg.r = r;
            double total = 0.0;
            for (const auto& traj : trajs) {
                const KalmanOutput kf = kalman_filter(sys, traj.measurements, cfg);
                const auto smoothed = rts_smooth(kf, sys);
                double acc = 0.0;
                for (int k = 0; k <= T; ++k)
                    acc += (smoothed[k].mean - traj.states[k]).squaredNorm();
                total += acc / (T + 1);
            }
            const double mse = total / trials;
            res.table.push_back({q, r, mse});
            if (mse < res.best_mse) {
                res.best_mse = mse;
                res.best_q = q;
                res.best_r = r;
            }
        }
    }
    return res;
}

}  // namespace zonosmooth::rts
