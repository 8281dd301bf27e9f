#ifndef ZONOSMOOTH_RTS_HPP_
#define ZONOSMOOTH_RTS_HPP_

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "zonosmooth/model.hpp"

namespace zonosmooth::rts {

/// Scalar (q, r) noise parameterization of the Gaussian baseline:
/// process covariance Gamma q Gamma^T, measurement covariance r I.
struct RtsConfig {
    double q = 0.0;
    double r = 1.0;
    Eigen::VectorXd m0;  // empty = zeros
    Eigen::MatrixXd P0;  // empty = identity

    void validate() const;
};

struct GaussianEstimate {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

struct KalmanOutput {
    std::vector<GaussianEstimate> filtered;   // k = 0..T
    std::vector<GaussianEstimate> predicted;  // k = 0..T; predicted[0] is the prior
};

/// Standard Kalman recursion with Joseph-form updates.
/// Throws std::runtime_error on a singular innovation covariance.
KalmanOutput kalman_filter(const model::LinearSystem& sys,
                           const std::vector<Eigen::VectorXd>& measurements,
                           const RtsConfig& cfg);

/// Fixed-interval backward pass; smoothed[T] = filtered[T]. Near-singular
/// predicted covariances are regularized with 1e-12 I.
std::vector<GaussianEstimate> rts_smooth(const KalmanOutput& kf,
                                         const model::LinearSystem& sys);

struct TuneResult {
    double best_q = 0.0;
    double best_r = 0.0;
    double best_mse = 0.0;
    // rows (q, r, mse), grid-major in the given order
    std::vector<std::array<double, 3>> table;
};

/// Average smoothed-mean MSE over seeded trials for every (q, r) pair;
/// returns the grid argmin. Deterministic per seed.
TuneResult tune_grid(const model::LinearSystem& sys, int T, int trials,
                     const std::vector<double>& q_grid,
                     const std::vector<double>& r_grid, std::uint64_t seed);

/// Average smoothed-mean MSE of one (q, r) pair over seeded trials.
double average_mse(const model::LinearSystem& sys, int T, int trials,
                   const RtsConfig& cfg, std::uint64_t seed);

}  // namespace zonosmooth::rts

#endif
