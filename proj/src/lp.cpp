#include "zonosmooth/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zonosmooth::lp {

namespace {

enum class VarState : char { kBasic, kAtLower, kAtUpper, kFreeZero };

// Bounded-variable two-phase simplex over the column-extended system
// [A | signed artificials]. Dantzig pricing with a Bland fallback once
// degeneracy stalls progress. The basis is refactorized at every pivot,
// which is the right trade-off for the small dense systems this solver
// is built for.
class Simplex {
  public:
    Simplex(const Problem& p, const Options& opt)
        : p_(p),
          opt_(opt),
          m_(p.num_rows()),
          n_(p.num_vars()),
          ntot_(m_ + p.num_vars()) {
        cost_ = (p.sense == Sense::kMaximize) ? (-p.objective).eval() : p.objective;
        lo_.resize(ntot_);
        up_.resize(ntot_);
        lo_.head(n_) = p.lower;
        up_.head(n_) = p.upper;
        lo_.tail(m_).setZero();
        up_.tail(m_).setConstant(kInf);
        art_sign_.assign(m_, 1.0);
        x_ = Eigen::VectorXd::Zero(ntot_);
        state_.assign(ntot_, VarState::kAtLower);
        basic_.assign(m_, -1);
        max_iters_ = opt.max_iterations > 0 ? opt.max_iterations
                                            : 200 * (m_ + ntot_) + 1000;
    }

    // Runs phase 1 (and phase 2 unless feasibility_only). Returns the result;
    // phase-1 optimum is stored in infeasibility_.
    Result run(bool feasibility_only, const Basis* warm) {
        if (m_ == 0) {
            infeasibility_ = 0.0;
            return feasibility_only ? make_feasible_only() : solve_boxonly();
        }

        bool warm_ok = warm != nullptr && warm->valid && try_warm_start(*warm);
        if (!warm_ok) {
            cold_start();
            Result r = iterate(/*phase1=*/true);
            if (r.status == Status::kInfeasible) return r;
        } else {
            infeasibility_ = 0.0;
        }
        if (feasibility_only) return make_feasible_only();

        // pin artificials so phase 2 cannot reuse them
        for (int j = n_; j < ntot_; ++j) up_(j) = 0.0;
        return iterate(/*phase1=*/false);
    }

    double infeasibility() const { return infeasibility_; }

    void export_basis(Basis& b) const {
        b.basic = basic_;
        b.at_upper.assign(n_, 0);
        for (int j = 0; j < n_; ++j)
            if (state_[j] == VarState::kAtUpper) b.at_upper[j] = 1;
        b.valid = true;
    }

  private:
    Eigen::VectorXd column(int j) const {
        if (j < n_) return p_.eq_matrix.col(j);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
        e(j - n_) = art_sign_[j - n_];
        return e;
    }

    void place_nonbasic(int j) {
        const double l = lo_(j), u = up_(j);
        if (std::isfinite(l) && std::isfinite(u)) {
            if (std::abs(u) < std::abs(l)) {
                state_[j] = VarState::kAtUpper;
                x_(j) = u;
            } else {
                state_[j] = VarState::kAtLower;
                x_(j) = l;
            }
        } else if (std::isfinite(l)) {
            state_[j] = VarState::kAtLower;
            x_(j) = l;
        } else if (std::isfinite(u)) {
            state_[j] = VarState::kAtUpper;
            x_(j) = u;
        } else {
            state_[j] = VarState::kFreeZero;
            x_(j) = 0.0;
        }
    }

    void cold_start() {
        for (int j = 0; j < n_; ++j) place_nonbasic(j);
        Eigen::VectorXd r = p_.eq_rhs;
        if (n_ > 0) r -= p_.eq_matrix * x_.head(n_);
        for (int i = 0; i < m_; ++i) {
            art_sign_[i] = (r(i) >= 0.0) ? 1.0 : -1.0;
            basic_[i] = n_ + i;
            state_[n_ + i] = VarState::kBasic;
            x_(n_ + i) = std::abs(r(i));
        }
    }

    bool try_warm_start(const Basis& warm) {
        if (static_cast<int>(warm.basic.size()) != m_ ||
            static_cast<int>(warm.at_upper.size()) != n_)
            return false;
        std::vector<char> used(ntot_, 0);
        for (int idx : warm.basic) {
            if (idx < 0 || idx >= ntot_ || used[idx]) return false;
            used[idx] = 1;
        }
        for (int j = 0; j < n_; ++j) {
            if (used[j]) {
                state_[j] = VarState::kBasic;
                continue;
            }
            place_nonbasic(j);
            if (warm.at_upper[j] && std::isfinite(up_(j))) {
                state_[j] = VarState::kAtUpper;
                x_(j) = up_(j);
            }
        }
        for (int j = n_; j < ntot_; ++j) {
            state_[j] = used[j] ? VarState::kBasic : VarState::kAtLower;
            x_(j) = 0.0;
            if (used[j]) up_(j) = 0.0;  // stale artificials stay pinned
        }
        basic_ = warm.basic;
        if (!factorize()) return false;
        if (!compute_basics()) return false;
        // accept only if the warmed basis is already primal feasible
        for (int i = 0; i < m_; ++i) {
            const int j = basic_[i];
            const double slack = opt_.feas_tol * (1.0 + std::abs(x_(j)));
            if (x_(j) < lo_(j) - slack || x_(j) > up_(j) + slack) return false;
        }
        return true;
    }

    bool factorize() {
        Eigen::MatrixXd B(m_, m_);
        for (int i = 0; i < m_; ++i) B.col(i) = column(basic_[i]);
        lu_.compute(B);
        const auto& d = lu_.matrixLU().diagonal();
        double dmax = 0.0, dmin = kInf;
        for (int i = 0; i < m_; ++i) {
            dmax = std::max(dmax, std::abs(d(i)));
            dmin = std::min(dmin, std::abs(d(i)));
        }
        return dmax > 0.0 && dmin > 1e-13 * dmax;
    }

    bool compute_basics() {
        Eigen::VectorXd rhs = p_.eq_rhs;
        for (int j = 0; j < ntot_; ++j) {
            if (state_[j] == VarState::kBasic || x_(j) == 0.0) continue;
            rhs -= column(j) * x_(j);
        }
        Eigen::VectorXd xb = lu_.solve(rhs);
        if (!xb.allFinite()) return false;
        for (int i = 0; i < m_; ++i) x_(basic_[i]) = xb(i);
        return true;
    }

    Result iterate(bool phase1) {
        Eigen::VectorXd cost(ntot_);
        if (phase1) {
            cost.setZero();
            cost.tail(m_).setOnes();
        } else {
            cost.head(n_) = cost_;
            cost.tail(m_).setZero();
        }

        bool bland = false;
        int stall = 0;
        for (int iter = 0; iter <= max_iters_; ++iter) {
            if (iter == max_iters_)
                throw SolverFailure("simplex: iteration limit exceeded");
            if (!factorize())
                throw SolverFailure("simplex: basis became numerically singular");
            if (!compute_basics())
                throw SolverFailure("simplex: basic solution not finite");

            Eigen::VectorXd cb(m_);
            for (int i = 0; i < m_; ++i) cb(i) = cost(basic_[i]);
            Eigen::VectorXd y = lu_.transpose().solve(cb);
            Eigen::VectorXd red = cost.head(n_) - p_.eq_matrix.transpose() * y;

            int enter = -1;
            double dir = 0.0, best = opt_.opt_tol;
            for (int j = 0; j < ntot_; ++j) {
                if (state_[j] == VarState::kBasic) continue;
                if (up_(j) - lo_(j) == 0.0) continue;  // fixed, cannot move
                const double d =
                    j < n_ ? red(j) : cost(j) - art_sign_[j - n_] * y(j - n_);
                double viol = 0.0, t = 0.0;
                if ((state_[j] == VarState::kAtLower || state_[j] == VarState::kFreeZero) &&
                    d < -opt_.opt_tol) {
                    viol = -d;
                    t = 1.0;
                }
                if ((state_[j] == VarState::kAtUpper || state_[j] == VarState::kFreeZero) &&
                    d > opt_.opt_tol) {
                    viol = d;
                    t = -1.0;
                }
                if (t == 0.0) continue;
                if (bland) {
                    enter = j;
                    dir = t;
                    break;
                }
                if (viol > best) {
                    best = viol;
                    enter = j;
                    dir = t;
                }
            }
            if (enter < 0) {  // optimal for this phase
                double obj = 0.0;
                for (int j = 0; j < ntot_; ++j) obj += cost(j) * x_(j);
                if (phase1) {
                    infeasibility_ = obj;
                    if (obj > opt_.feas_tol) {
                        Result r;
                        r.status = Status::kInfeasible;
                        return r;
                    }
                    Result r;
                    r.status = Status::kOptimal;  // placeholder: phase 1 done
                    return r;
                }
                return finish(obj);
            }

            Eigen::VectorXd w = lu_.solve(column(enter));

            // ratio test: how far can the entering variable move
            double theta = up_(enter) - lo_(enter);  // own-range bound flip
            int leave = -1;                          // -1 = bound flip
            bool leave_to_upper = false;
            double tie = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double delta = -dir * w(i);  // d x_basic[i] / d theta
                if (std::abs(delta) <= opt_.pivot_tol) continue;
                const int bj = basic_[i];
                double limit;
                bool to_upper;
                if (delta > 0.0) {
                    if (!std::isfinite(up_(bj))) continue;
                    limit = (up_(bj) - x_(bj)) / delta;
                    to_upper = true;
                } else {
                    if (!std::isfinite(lo_(bj))) continue;
                    limit = (lo_(bj) - x_(bj)) / delta;
                    to_upper = false;
                }
                limit = std::max(limit, 0.0);
                const bool better =
                    bland ? (limit < theta - 1e-15 ||
                             (leave >= 0 && limit <= theta + 1e-15 && bj < basic_[leave]))
                          : (limit < theta - 1e-15 ||
                             (leave >= 0 && limit <= theta + 1e-15 &&
                              std::abs(w(i)) > tie));
                if (leave < 0 ? (limit < theta) : better) {
                    theta = std::min(theta, limit);
                    leave = i;
                    leave_to_upper = to_upper;
                    tie = std::abs(w(i));
                }
            }

            if (!std::isfinite(theta)) {
                if (phase1)
                    throw SolverFailure("simplex: unbounded ray in phase 1");
                Result r;
                r.status = Status::kUnbounded;
                return r;
            }

            if (theta <= opt_.feas_tol) {
                if (++stall > 64) bland = true;
            } else {
                stall = 0;
            }

            if (theta > 0.0) {
                for (int i = 0; i < m_; ++i) x_(basic_[i]) -= dir * w(i) * theta;
            }
            if (leave < 0) {  // entering flips to its other bound
                if (dir > 0.0) {
                    state_[enter] = VarState::kAtUpper;
                    x_(enter) = up_(enter);
                } else {
                    state_[enter] = VarState::kAtLower;
                    x_(enter) = lo_(enter);
                }
                continue;
            }
            const int out = basic_[leave];
            x_(enter) = (state_[enter] == VarState::kFreeZero ? 0.0 : x_(enter)) +
                        dir * theta;
            state_[enter] = VarState::kBasic;
            state_[out] = leave_to_upper ? VarState::kAtUpper : VarState::kAtLower;
            x_(out) = leave_to_upper ? up_(out) : lo_(out);
            basic_[leave] = enter;
        }
        throw SolverFailure("simplex: unreachable");
    }

    Result make_feasible_only() const {
        Result r;
        r.status = (infeasibility_ <= opt_.feas_tol) ? Status::kOptimal
                                                     : Status::kInfeasible;
        return r;
    }

    // m == 0: optimum is attained at bounds independently per coordinate.
    Result solve_boxonly() {
        Result r;
        Eigen::VectorXd x(n_);
        for (int j = 0; j < n_; ++j) {
            const double c = cost_(j);
            if (c > 0.0) {
                if (!std::isfinite(lo_(j))) return unbounded();
                x(j) = lo_(j);
            } else if (c < 0.0) {
                if (!std::isfinite(up_(j))) return unbounded();
                x(j) = up_(j);
            } else {
                x(j) = std::isfinite(lo_(j)) ? lo_(j)
                                             : (std::isfinite(up_(j)) ? up_(j) : 0.0);
            }
        }
        r.status = Status::kOptimal;
        r.argmin = x;
        const double v = cost_.dot(x);
        r.value = (p_.sense == Sense::kMaximize) ? -v : v;
        return r;
    }

    static Result unbounded() {
        Result r;
        r.status = Status::kUnbounded;
        return r;
    }

    Result finish(double obj_internal) {
        Result r;
        r.status = Status::kOptimal;
        r.argmin = x_.head(n_);
        r.value = (p_.sense == Sense::kMaximize) ? -obj_internal : obj_internal;
        verify(r.argmin);
        return r;
    }

    // Post-hoc feasibility of the reported argmin; never trust the tableau.
    void verify(const Eigen::VectorXd& x) const {
        double bscale = 1.0;
        if (m_ > 0) bscale += p_.eq_rhs.lpNorm<Eigen::Infinity>();
        double xscale = 1.0;
        if (n_ > 0) xscale += x.lpNorm<Eigen::Infinity>();
        double amax = 0.0;
        if (m_ > 0 && n_ > 0) amax = p_.eq_matrix.cwiseAbs().maxCoeff();
        const double row_tol = opt_.feas_tol * (bscale + amax * xscale) * 10.0;
        if (m_ > 0) {
            Eigen::VectorXd resid = p_.eq_matrix * x - p_.eq_rhs;
            // basic artificials resting at ~0 contribute only noise here
            if (resid.lpNorm<Eigen::Infinity>() > row_tol + infeasibility_ * 1.001)
                throw SolverFailure("simplex: optimal point violates equalities");
        }
        for (int j = 0; j < n_; ++j) {
            const double s = opt_.feas_tol * (1.0 + std::abs(x(j))) * 10.0;
            if (x(j) < lo_(j) - s || x(j) > up_(j) + s)
                throw SolverFailure("simplex: optimal point violates bounds");
        }
    }

    const Problem& p_;
    const Options opt_;
    int m_, n_, ntot_;
    int max_iters_;
    Eigen::VectorXd cost_;
    Eigen::VectorXd lo_, up_;
    Eigen::VectorXd x_;
    std::vector<double> art_sign_;
    std::vector<VarState> state_;
    std::vector<int> basic_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double infeasibility_ = 0.0;
};

// All-zero row with a rhs beyond tolerance can never be satisfied.
bool has_contradictory_zero_row(const Problem& p, const Options& opt) {
    for (int i = 0; i < p.num_rows(); ++i) {
        double rowmax = 0.0;
        if (p.num_vars() > 0) rowmax = p.eq_matrix.row(i).cwiseAbs().maxCoeff();
        if (rowmax == 0.0 && std::abs(p.eq_rhs(i)) > opt.feas_tol) return true;
    }
    return false;
}

}  // namespace

void Problem::validate() const {
    const auto n = objective.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("lp: bound lengths do not match objective");
    if (eq_matrix.rows() != eq_rhs.size())
        throw std::invalid_argument("lp: eq_matrix rows do not match eq_rhs");
    if (eq_rhs.size() > 0 && eq_matrix.cols() != n)
        throw std::invalid_argument("lp: eq_matrix columns do not match objective");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j))
            throw std::invalid_argument("lp: crossed or NaN bounds");
    }
}

Result solve(const Problem& p, const Options& opt) {
    p.validate();
    if (has_contradictory_zero_row(p, opt)) {
        Result r;
        r.status = Status::kInfeasible;
        return r;
    }
    Simplex s(p, opt);
    return s.run(/*feasibility_only=*/false, nullptr);
}

Result solve(const Problem& p, const Options& opt, Basis& warm) {
    p.validate();
    if (has_contradictory_zero_row(p, opt)) {
        Result r;
        r.status = Status::kInfeasible;
        return r;
    }
    Simplex s(p, opt);
    Result r = s.run(/*feasibility_only=*/false, &warm);
    if (r.status == Status::kOptimal) s.export_basis(warm);
    return r;
}

double infeasibility(const Problem& p, const Options& opt) {
    p.validate();
    if (p.num_rows() == 0) return 0.0;
    Simplex s(p, opt);
    s.run(/*feasibility_only=*/true, nullptr);
    return s.infeasibility();
}

bool is_feasible(const Problem& p, const Options& opt) {
    return infeasibility(p, opt) <= opt.feas_tol;
}

}  // namespace zonosmooth::lp
