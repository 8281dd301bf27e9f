#ifndef ZONOSMOOTH_CZONO_HPP_
#define ZONOSMOOTH_CZONO_HPP_

#include <Eigen/Dense>

#include <vector>

#include "zonosmooth/lp.hpp"

namespace zonosmooth::cz {

/// Axis-aligned box [lower, upper], componentwise.
struct IntervalBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    IntervalBox() = default;
    IntervalBox(Eigen::VectorXd lo, Eigen::VectorXd up);

    int dim() const { return static_cast<int>(lower.size()); }
    Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
    Eigen::VectorXd radius() const { return 0.5 * (upper - lower); }
    double max_width() const { return (upper - lower).maxCoeff(); }
    bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
    bool contains(const IntervalBox& other, double tol = 0.0) const;
    IntervalBox inflated(double eps) const;
};

/// The set {G xi + c : A xi = b, |xi_j| <= h_j}. Half-widths h may be +inf.
/// Values are immutable after construction; all operations are pure.
class ConstrainedZonotope {
  public:
    ConstrainedZonotope() = default;
    ConstrainedZonotope(Eigen::MatrixXd G, Eigen::VectorXd c, Eigen::MatrixXd A,
                        Eigen::VectorXd b, Eigen::VectorXd h);

    /// Zonotope without constraints (A, b empty).
    ConstrainedZonotope(Eigen::MatrixXd G, Eigen::VectorXd c, Eigen::VectorXd h);

    static ConstrainedZonotope from_box(const IntervalBox& box);
    static ConstrainedZonotope singleton(const Eigen::VectorXd& point);

    int dim() const { return static_cast<int>(c_.size()); }
    int num_generators() const { return static_cast<int>(G_.cols()); }
    int num_constraints() const { return static_cast<int>(A_.rows()); }

    const Eigen::MatrixXd& generators() const { return G_; }
    const Eigen::VectorXd& center() const { return c_; }
    const Eigen::MatrixXd& constraint_matrix() const { return A_; }
    const Eigen::VectorXd& constraint_rhs() const { return b_; }
    const Eigen::VectorXd& half_widths() const { return h_; }

  private:
    Eigen::MatrixXd G_;  // n x ng
    Eigen::VectorXd c_;  // n
    Eigen::MatrixXd A_;  // nc x ng
    Eigen::VectorXd b_;  // nc
    Eigen::VectorXd h_;  // ng, entries in [0, +inf]
};

/// F Z = Z(F G, F c, A, b, h).
ConstrainedZonotope linear_map(const Eigen::MatrixXd& F, const ConstrainedZonotope& Z);

/// Z + W = {z + w}; block-diagonal constraint stacking.
ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& Z, const ConstrainedZonotope& W);

/// {z in Z : R z in Y}.
ConstrainedZonotope generalized_intersection(const ConstrainedZonotope& Z,
                                             const Eigen::MatrixXd& R,
                                             const ConstrainedZonotope& Y);

/// True iff some xi satisfies G xi = x - c within tol_scale*(1+|x|_inf),
/// the equality constraints, and the half-width box (phase-1 LP).
bool contains_point(const ConstrainedZonotope& Z, const Eigen::VectorXd& x,
                    double tol_scale = 1e-7, const lp::Options& opt = {});

/// True iff the xi-polytope {A xi = b, xi in box} is empty.
bool is_empty(const ConstrainedZonotope& Z, const lp::Options& opt = {});

/// max over z in Z of direction.z; +inf when unbounded in that direction.
/// Throws std::runtime_error on an empty set.
double support_value(const ConstrainedZonotope& Z, const Eigen::VectorXd& direction,
                     const lp::Options& opt = {});

/// Repeated support queries against one set, with warm-started LP bases.
class SupportOracle {
  public:
    explicit SupportOracle(const ConstrainedZonotope& Z, const lp::Options& opt = {});

    struct Eval {
        double value = 0.0;            // +inf when unbounded
        Eigen::VectorXd maximizer;     // a point of Z attaining value (if bounded)
    };
    Eval eval(const Eigen::VectorXd& direction);

  private:
    const ConstrainedZonotope& Z_;
    lp::Problem prob_;
    lp::Options opt_;
    lp::Basis basis_;
};

/// Tightest axis-aligned box containing Z (2n support LPs).
IntervalBox interval_hull(const ConstrainedZonotope& Z, const lp::Options& opt = {});

/// sup over s, s' in Z of |s - s'|_inf == widest coordinate of the hull.
double diameter_inf(const ConstrainedZonotope& Z, const lp::Options& opt = {});

struct CompressOptions {
    double trace_tol = 1e-11;   // relative chord-refinement stopping tolerance
    double push = 5e-11;        // relative outward inflation of certified faces
    int max_vertices = 2048;
    lp::Options lp;
};

/// Exact direction-refined boundary polygon of a bounded 2-D set, counter-
/// clockwise. Each returned point is a member of Z.
std::vector<Eigen::Vector2d> trace_polygon(const ConstrainedZonotope& Z,
                                           const CompressOptions& opt = {});

/// Replaces a bounded 2-D set by a low-order representation of the same set.
/// The result covers Z exactly and exceeds it by at most ~push*scale per
/// face; its generator count is vertex count + 2. Throws on dim != 2 or an
/// unbounded input; an empty input is returned unchanged.
ConstrainedZonotope compress_polygon(const ConstrainedZonotope& Z,
                                     const CompressOptions& opt = {});

}  // namespace zonosmooth::cz

#endif
