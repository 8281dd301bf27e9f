#ifndef ZONOSMOOTH_LP_HPP_
#define ZONOSMOOTH_LP_HPP_

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <vector>

namespace zonosmooth::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };

enum class Status { kOptimal, kInfeasible, kUnbounded };

/// Thrown on numerical breakdown (tiny pivots, iteration blow-up, or a
/// solution that fails post-hoc verification). Never a silent wrong answer.
class SolverFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Solver tolerances. The defaults are tuned for the small dense systems
/// produced by constrained-zonotope queries.
struct Options {
    double feas_tol = 1e-9;    // phase-1 acceptance and post-hoc row residuals
    double pivot_tol = 1e-11;  // smallest admissible pivot magnitude
    double opt_tol = 1e-9;     // reduced-cost optimality threshold
    int max_iterations = 0;    // 0 = automatic (scales with problem size)
};

/// Bounded-variable linear program:
///   optimize objective . x  subject to  eq_matrix x = eq_rhs,
///   lower <= x <= upper (entries may be -inf / +inf).
struct Problem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Sense sense = Sense::kMinimize;

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(eq_rhs.size()); }

    /// Throws std::invalid_argument on inconsistent dimensions or crossed bounds.
    void validate() const;
};

struct Result {
    Status status = Status::kInfeasible;
    double value = 0.0;            // defined iff status == kOptimal
    Eigen::VectorXd argmin;        // defined iff status == kOptimal
};

/// Opaque warm-start state. Only meaningful when reused with a problem of
/// identical shape (same rows/columns); the solver falls back to a cold
/// start whenever the stored basis is unusable.
struct Basis {
    std::vector<int> basic;      // column index per row (artificials >= n)
    std::vector<char> at_upper;  // nonbasic rest position per structural column
    bool valid = false;
};

/// Global optimum of the LP, or a correct infeasible/unbounded verdict.
/// Deterministic for fixed input. Reported optima are re-verified against
/// the constraints before returning; a violation throws SolverFailure.
Result solve(const Problem& p, const Options& opt = {});

/// Same as solve() but reuses (and updates) a warm-start basis.
Result solve(const Problem& p, const Options& opt, Basis& warm);

/// Minimum total row infeasibility (phase-1 optimum). Zero up to tolerance
/// iff the feasible set is nonempty.
double infeasibility(const Problem& p, const Options& opt = {});

/// True iff the feasible set is nonempty (phase-1 optimum <= feas_tol).
bool is_feasible(const Problem& p, const Options& opt = {});

}  // namespace zonosmooth::lp

#endif
