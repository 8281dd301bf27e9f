#ifndef ZONOSMOOTH_MODEL_HPP_
#define ZONOSMOOTH_MODEL_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zonosmooth/czono.hpp"

namespace zonosmooth::model {

/// x_{k+1} = Phi_k x_k + Gamma_k w_k,  y_k = Xi_k x_k + Psi_k v_k,
/// with w, v, x0 ranging over constrained zonotopes. Matrices may be given
/// per step; a table of length one means time-invariant.
struct LinearSystem {
    std::vector<Eigen::MatrixXd> phi;    // n x n
    std::vector<Eigen::MatrixXd> gamma;  // n x p
    std::vector<Eigen::MatrixXd> xi;     // m x n
    std::vector<Eigen::MatrixXd> psi;    // m x q
    cz::ConstrainedZonotope w_range;     // p
    cz::ConstrainedZonotope v_range;     // q
    cz::ConstrainedZonotope x0_range;    // n

    const Eigen::MatrixXd& phi_at(int k) const { return at(phi, k); }
    const Eigen::MatrixXd& gamma_at(int k) const { return at(gamma, k); }
    const Eigen::MatrixXd& xi_at(int k) const { return at(xi, k); }
    const Eigen::MatrixXd& psi_at(int k) const { return at(psi, k); }

    int state_dim() const { return static_cast<int>(phi.front().rows()); }
    int meas_dim() const { return static_cast<int>(xi.front().rows()); }

    /// Throws std::invalid_argument on inconsistent dimensions.
    void validate() const;

  private:
    static const Eigen::MatrixXd& at(const std::vector<Eigen::MatrixXd>& t, int k) {
        return t[static_cast<std::size_t>(k) < t.size() ? k : t.size() - 1];
    }
};

/// Strictly monotone continuous scalar map with a known inverse bracket.
class MonotoneMap {
  public:
    /// Monotonicity is spot-checked on a sampled grid of [probe_lo, probe_hi];
    /// throws std::invalid_argument when the samples are not strictly ordered.
    MonotoneMap(std::function<double(double)> forward, bool increasing,
                double probe_lo = -100.0, double probe_hi = 100.0,
                std::string name = "custom");

    double operator()(double x) const { return forward_(x); }
    bool increasing() const { return increasing_; }
    const std::string& name() const { return name_; }

    /// x with forward(x) = y to 1e-12 relative accuracy, by bisection on an
    /// auto-expanding bracket. Throws std::domain_error when y is outside
    /// the reachable image.
    double inverse(double y) const;

  private:
    std::function<double(double)> forward_;
    bool increasing_;
    std::string name_;
};

/// Scalar interval. Empty intervals are representable explicitly.
struct Interval {
    double a = 0.0;
    double b = 0.0;
    bool empty = false;

    Interval() = default;
    Interval(double lo, double hi);
    static Interval make_empty();

    double width() const { return empty ? 0.0 : b - a; }
    double mid() const { return 0.5 * (a + b); }
    bool contains(double x, double tol = 0.0) const {
        return !empty && x >= a - tol && x <= b + tol;
    }
    Interval intersect(const Interval& other) const;
};

/// x_{k+1} = eta(x_k) + w_k,  y_k = alpha x_k + v_k (alpha != 0).
struct ScalarAffineSystem {
    MonotoneMap eta;
    double meas_gain = 1.0;
    Interval w_range;
    Interval v_range;
    Interval x0_range;

    void validate() const;
};

/// A simulated run: states x_0..x_T, measurements y_0..y_T, and the drawn
/// noises (kept for test-side verification).
struct Trajectory {
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> measurements;
    std::vector<Eigen::VectorXd> process_noise;  // w_0..w_{T-1}
    std::vector<Eigen::VectorXd> meas_noise;     // v_0..v_T
    std::uint64_t seed = 0;

    int horizon() const { return static_cast<int>(states.size()) - 1; }
};

/// Draws x0, w_k, v_k uniformly from their (axis-box) ranges and applies the
/// dynamics exactly; bit-reproducible per (seed, trial) substream.
/// Throws std::invalid_argument when a noise range is not an axis box.
Trajectory simulate_linear(const LinearSystem& sys, int T, std::uint64_t seed,
                           std::uint64_t trial = 0);

Trajectory simulate_scalar(const ScalarAffineSystem& sys, int T, std::uint64_t seed,
                           std::uint64_t trial = 0);

/// Debug export: columns k, x..., y...
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// The benchmark rotation system (state dim 2, scalar process noise).
LinearSystem default_linear_system();

/// The benchmark scalar system x^{1/3} + x dynamics, y = 2x + v.
ScalarAffineSystem default_scalar_system();

/// Map eta(x) = cbrt(x) + x (real odd cube root, defined on all of R).
MonotoneMap cbrt_plus_identity();

}  // namespace zonosmooth::model

#endif
