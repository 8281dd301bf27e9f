#include "zonosmooth/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "zonosmooth/rng.hpp"

namespace zonosmooth::model {

namespace {

// A range usable for simulation must be an axis box: diagonal generators,
// no constraints, finite half-widths.
cz::IntervalBox box_of(const cz::ConstrainedZonotope& Z, const char* what) {
    if (Z.num_constraints() != 0)
        throw std::invalid_argument(std::string(what) +
                                    ": simulation requires an unconstrained box range");
    const int n = Z.dim();
    Eigen::VectorXd rad = Eigen::VectorXd::Zero(n);
    const Eigen::MatrixXd& G = Z.generators();
    for (int j = 0; j < Z.num_generators(); ++j) {
        int nz = -1;
        for (int i = 0; i < n; ++i) {
            if (G(i, j) != 0.0) {
                if (nz >= 0)
                    throw std::invalid_argument(std::string(what) +
                                                ": generator couples coordinates; not a box");
                nz = i;
            }
        }
        if (nz < 0) continue;
        if (!std::isfinite(Z.half_widths()(j)))
            throw std::invalid_argument(std::string(what) + ": infinite simulation range");
        rad(nz) += std::abs(G(nz, j)) * Z.half_widths()(j);
    }
    return {Z.center() - rad, Z.center() + rad};
}

Eigen::VectorXd draw_uniform(const cz::IntervalBox& box, rng::Stream& stream) {
    Eigen::VectorXd x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x(i) = stream.uniform(box.lower(i), box.upper(i));
    return x;
}

}  // namespace

void LinearSystem::validate() const {
    if (phi.empty() || gamma.empty() || xi.empty() || psi.empty())
        throw std::invalid_argument("LinearSystem: empty matrix table");
    const int n = state_dim();
    const int m = meas_dim();
    const int p = static_cast<int>(gamma.front().cols());
    const int q = static_cast<int>(psi.front().cols());
    for (const auto& M : phi)
        if (M.rows() != n || M.cols() != n)
            throw std::invalid_argument("LinearSystem: Phi shape");
    for (const auto& M : gamma)
        if (M.rows() != n || M.cols() != p)
            throw std::invalid_argument("LinearSystem: Gamma shape");
    for (const auto& M : xi)
        if (M.rows() != m || M.cols() != n)
            throw std::invalid_argument("LinearSystem: Xi shape");
    for (const auto& M : psi)
        if (M.rows() != m || M.cols() != q)
            throw std::invalid_argument("LinearSystem: Psi shape");
    if (w_range.dim() != p) throw std::invalid_argument("LinearSystem: w_range dim");
    if (v_range.dim() != q) throw std::invalid_argument("LinearSystem: v_range dim");
    if (x0_range.dim() != n) throw std::invalid_argument("LinearSystem: x0_range dim");
}

MonotoneMap::MonotoneMap(std::function<double(double)> forward, bool increasing,
                         double probe_lo, double probe_hi, std::string name)
    : forward_(std::move(forward)), increasing_(increasing), name_(std::move(name)) {
    const int kProbes = 64;
    double prev = forward_(probe_lo);
    for (int i = 1; i <= kProbes; ++i) {
        const double x = probe_lo + (probe_hi - probe_lo) * i / kProbes;
        const double fx = forward_(x);
        const bool ok = increasing_ ? fx > prev : fx < prev;
        if (!ok)
            throw std::invalid_argument("MonotoneMap: samples are not strictly monotone");
        prev = fx;
    }
}

double MonotoneMap::inverse(double y) const {
    // auto-expanding bracket around 0
    double lo = -1.0, hi = 1.0;
    auto value = [&](double x) { return increasing_ ? forward_(x) - y : y - forward_(x); };
    int expansions = 0;
    while (value(lo) > 0.0) {
        lo = lo * 2.0 - 1.0;
        if (++expansions > 200 || !std::isfinite(lo))
            throw std::domain_error("MonotoneMap::inverse: value below reachable image");
    }
    expansions = 0;
    while (value(hi) < 0.0) {
        hi = hi * 2.0 + 1.0;
        if (++expansions > 200 || !std::isfinite(hi))
            throw std::domain_error("MonotoneMap::inverse: value above reachable image");
    }
    const double tol = 1e-12 * (1.0 + std::abs(y));
    // bisection; monotonicity guarantees the bracket stays valid
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = value(mid);
        if (std::abs(v) <= tol || hi - lo <= 1e-15 * (1.0 + std::abs(mid))) return mid;
        if (v > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

Interval::Interval(double lo, double hi) : a(lo), b(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("Interval: lower > upper");
}

Interval Interval::make_empty() {
    Interval iv;
    iv.empty = true;
    return iv;
}

Interval Interval::intersect(const Interval& other) const {
    if (empty || other.empty) return make_empty();
    const double lo = std::max(a, other.a);
    const double hi = std::min(b, other.b);
    if (lo > hi) return make_empty();
    return {lo, hi};
}

void ScalarAffineSystem::validate() const {
    if (meas_gain == 0.0)
        throw std::invalid_argument("ScalarAffineSystem: measurement gain must be nonzero");
    if (w_range.empty || v_range.empty || x0_range.empty)
        throw std::invalid_argument("ScalarAffineSystem: empty range");
}

Trajectory simulate_linear(const LinearSystem& sys, int T, std::uint64_t seed,
                           std::uint64_t trial) {
    sys.validate();
    if (T < 0) throw std::invalid_argument("simulate_linear: negative horizon");
    const cz::IntervalBox w_box = box_of(sys.w_range, "w_range");
    const cz::IntervalBox v_box = box_of(sys.v_range, "v_range");
    const cz::IntervalBox x0_box = box_of(sys.x0_range, "x0_range");

    rng::Stream stream(seed, trial);
    Trajectory traj;
    traj.seed = seed;
    traj.states.reserve(T + 1);
    traj.measurements.reserve(T + 1);

    Eigen::VectorXd x = draw_uniform(x0_box, stream);
    for (int k = 0; k <= T; ++k) {
        traj.states.push_back(x);
        Eigen::VectorXd v = draw_uniform(v_box, stream);
        traj.meas_noise.push_back(v);
        traj.measurements.push_back(sys.xi_at(k) * x + sys.psi_at(k) * v);
        if (k < T) {
            Eigen::VectorXd w = draw_uniform(w_box, stream);
            traj.process_noise.push_back(w);
            x = sys.phi_at(k) * x + sys.gamma_at(k) * w;
        }
    }
    return traj;
}

Trajectory simulate_scalar(const ScalarAffineSystem& sys, int T, std::uint64_t seed,
                           std::uint64_t trial) {
    sys.validate();
    if (T < 0) throw std::invalid_argument("simulate_scalar: negative horizon");
    rng::Stream stream(seed, trial);
    Trajectory traj;
    traj.seed = seed;

    auto vec1 = [](double v) { return Eigen::VectorXd::Constant(1, v); };
    double x = stream.uniform(sys.x0_range.a, sys.x0_range.b);
    for (int k = 0; k <= T; ++k) {
        traj.states.push_back(vec1(x));
        const double v = stream.uniform(sys.v_range.a, sys.v_range.b);
        traj.meas_noise.push_back(vec1(v));
        traj.measurements.push_back(vec1(sys.meas_gain * x + v));
        if (k < T) {
            const double w = stream.uniform(sys.w_range.a, sys.w_range.b);
            traj.process_noise.push_back(vec1(w));
            x = sys.eta(x) + w;
        }
    }
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "# zonosmooth-csv v1\n";
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
    const int m = traj.measurements.empty() ? 0 : static_cast<int>(traj.measurements[0].size());
    out << "k";
    for (int i = 0; i < n; ++i) out << ",x" << i + 1;
    for (int i = 0; i < m; ++i) out << ",y" << i + 1;
    out << "\n";
    char buf[32];
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out << k;
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", traj.states[k](i));
            out << ',' << buf;
        }
        for (int i = 0; i < m; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", traj.measurements[k](i));
            out << ',' << buf;
        }
        out << "\n";
    }
}

LinearSystem default_linear_system() {
    LinearSystem sys;
    Eigen::MatrixXd phi(2, 2);
    phi << std::sin(1.0), std::cos(1.0), -std::cos(1.0), std::sin(1.0);
    Eigen::MatrixXd gamma(2, 1);
    gamma << 0.5, 1.0;
    Eigen::MatrixXd xi(2, 2);
    xi << 0.5, 0.5, 1.0, 0.3;
    Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(2, 2);
    sys.phi = {phi};
    sys.gamma = {gamma};
    sys.xi = {xi};
    sys.psi = {psi};
    sys.w_range = cz::ConstrainedZonotope::from_box(
        {Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)});
    sys.v_range = cz::ConstrainedZonotope::from_box(
        {Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0)});
    sys.x0_range = cz::ConstrainedZonotope::from_box(
        {Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0)});
    return sys;
}

MonotoneMap cbrt_plus_identity() {
    return MonotoneMap([](double x) { return std::cbrt(x) + x; }, /*increasing=*/true,
                       -100.0, 100.0, "cbrt_plus_identity");
}

ScalarAffineSystem default_scalar_system() {
    ScalarAffineSystem sys{cbrt_plus_identity(), 2.0, Interval(-1.0, 1.0),
                           Interval(1.0, 3.0), Interval(-1.0, 1.0)};
    return sys;
}

}  // namespace zonosmooth::model
