#include "zonosmooth/czono.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zonosmooth::cz {

namespace {

lp::Problem xi_polytope(const ConstrainedZonotope& Z) {
    lp::Problem p;
    const int ng = Z.num_generators();
    p.objective = Eigen::VectorXd::Zero(ng);
    p.eq_matrix = Z.constraint_matrix();
    p.eq_rhs = Z.constraint_rhs();
    p.lower = -Z.half_widths();
    p.upper = Z.half_widths();
    return p;
}

}  // namespace

IntervalBox::IntervalBox(Eigen::VectorXd lo, Eigen::VectorXd up)
    : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.size() != upper.size())
        throw std::invalid_argument("IntervalBox: length mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        if (!(lower(i) <= upper(i)))
            throw std::invalid_argument("IntervalBox: lower > upper");
}

bool IntervalBox::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
    return true;
}

bool IntervalBox::contains(const IntervalBox& other, double tol) const {
    return contains(other.lower, tol) && contains(other.upper, tol);
}

IntervalBox IntervalBox::inflated(double eps) const {
    IntervalBox out;
    out.lower = lower.array() - eps;
    out.upper = upper.array() + eps;
    return out;
}

ConstrainedZonotope::ConstrainedZonotope(Eigen::MatrixXd G, Eigen::VectorXd c,
                                         Eigen::MatrixXd A, Eigen::VectorXd b,
                                         Eigen::VectorXd h)
    : G_(std::move(G)), c_(std::move(c)), A_(std::move(A)), b_(std::move(b)), h_(std::move(h)) {
    if (G_.rows() != c_.size())
        throw std::invalid_argument("ConstrainedZonotope: G rows != c length");
    if (G_.cols() != h_.size())
        throw std::invalid_argument("ConstrainedZonotope: G cols != h length");
    if (A_.rows() != b_.size())
        throw std::invalid_argument("ConstrainedZonotope: A rows != b length");
    if (A_.rows() > 0 && A_.cols() != G_.cols())
        throw std::invalid_argument("ConstrainedZonotope: A cols != G cols");
    if (A_.rows() == 0 && A_.cols() != G_.cols()) A_.resize(0, G_.cols());
    for (Eigen::Index j = 0; j < h_.size(); ++j)
        if (std::isnan(h_(j)) || h_(j) < 0.0)
            throw std::invalid_argument("ConstrainedZonotope: negative half-width");
}

ConstrainedZonotope::ConstrainedZonotope(Eigen::MatrixXd G, Eigen::VectorXd c,
                                         Eigen::VectorXd h) {
    const Eigen::Index ng = G.cols();
    *this = ConstrainedZonotope(std::move(G), std::move(c), Eigen::MatrixXd(0, ng),
                                Eigen::VectorXd(0), std::move(h));
}

ConstrainedZonotope ConstrainedZonotope::from_box(const IntervalBox& box) {
    const int n = box.dim();
    Eigen::MatrixXd G = box.radius().asDiagonal();
    return ConstrainedZonotope(G, box.center(), Eigen::MatrixXd(0, n),
                               Eigen::VectorXd(0), Eigen::VectorXd::Ones(n));
}

ConstrainedZonotope ConstrainedZonotope::singleton(const Eigen::VectorXd& point) {
    const int n = static_cast<int>(point.size());
    return ConstrainedZonotope(Eigen::MatrixXd(n, 0), point, Eigen::MatrixXd(0, 0),
                               Eigen::VectorXd(0), Eigen::VectorXd(0));
}

ConstrainedZonotope linear_map(const Eigen::MatrixXd& F, const ConstrainedZonotope& Z) {
    if (F.cols() != Z.dim())
        throw std::invalid_argument("linear_map: F cols != dim(Z)");
    return ConstrainedZonotope(F * Z.generators(), F * Z.center(),
                               Z.constraint_matrix(), Z.constraint_rhs(),
                               Z.half_widths());
}

ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& Z, const ConstrainedZonotope& W) {
    if (Z.dim() != W.dim())
        throw std::invalid_argument("minkowski_sum: ambient dimension mismatch");
    const int n = Z.dim();
    const int gz = Z.num_generators(), gw = W.num_generators();
    const int cz = Z.num_constraints(), cw = W.num_constraints();

    Eigen::MatrixXd G(n, gz + gw);
    G << Z.generators(), W.generators();

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cz + cw, gz + gw);
    A.topLeftCorner(cz, gz) = Z.constraint_matrix();
    A.bottomRightCorner(cw, gw) = W.constraint_matrix();

    Eigen::VectorXd b(cz + cw);
    b << Z.constraint_rhs(), W.constraint_rhs();

    Eigen::VectorXd h(gz + gw);
    h << Z.half_widths(), W.half_widths();

    return ConstrainedZonotope(G, Z.center() + W.center(), A, b, h);
}

ConstrainedZonotope generalized_intersection(const ConstrainedZonotope& Z,
                                             const Eigen::MatrixXd& R,
                                             const ConstrainedZonotope& Y) {
    if (R.cols() != Z.dim())
        throw std::invalid_argument("generalized_intersection: R cols != dim(Z)");
    if (R.rows() != Y.dim())
        throw std::invalid_argument("generalized_intersection: R rows != dim(Y)");
    const int n = Z.dim(), m = Y.dim();
    const int gz = Z.num_generators(), gy = Y.num_generators();
    const int cz = Z.num_constraints(), cy = Y.num_constraints();

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, gz + gy);
    G.leftCols(gz) = Z.generators();

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cz + cy + m, gz + gy);
    A.topLeftCorner(cz, gz) = Z.constraint_matrix();
    A.block(cz, gz, cy, gy) = Y.constraint_matrix();
    A.block(cz + cy, 0, m, gz) = R * Z.generators();
    A.block(cz + cy, gz, m, gy) = -Y.generators();

    Eigen::VectorXd b(cz + cy + m);
    b << Z.constraint_rhs(), Y.constraint_rhs(), Y.center() - R * Z.center();

    Eigen::VectorXd h(gz + gy);
    h << Z.half_widths(), Y.half_widths();

    return ConstrainedZonotope(G, Z.center(), A, b, h);
}

bool contains_point(const ConstrainedZonotope& Z, const Eigen::VectorXd& x,
                    double tol_scale, const lp::Options& opt) {
    if (x.size() != Z.dim())
        throw std::invalid_argument("contains_point: dimension mismatch");
    lp::Problem p = xi_polytope(Z);
    const int n = Z.dim(), nc = Z.num_constraints();
    Eigen::MatrixXd A(n + nc, Z.num_generators());
    A.topRows(n) = Z.generators();
    A.bottomRows(nc) = Z.constraint_matrix();
    Eigen::VectorXd b(n + nc);
    b.head(n) = x - Z.center();
    b.tail(nc) = Z.constraint_rhs();
    p.eq_matrix = A;
    p.eq_rhs = b;
    // phase-1 optimum is the summed row violation, which dominates the
    // max-norm residual; acceptance is therefore (conservatively) tighter
    // than the stated per-row relaxation
    const double tol = tol_scale * (1.0 + x.lpNorm<Eigen::Infinity>());
    return lp::infeasibility(p, opt) <= tol;
}

bool is_empty(const ConstrainedZonotope& Z, const lp::Options& opt) {
    return !lp::is_feasible(xi_polytope(Z), opt);
}

SupportOracle::SupportOracle(const ConstrainedZonotope& Z, const lp::Options& opt)
    : Z_(Z), prob_(xi_polytope(Z)), opt_(opt) {
    prob_.sense = lp::Sense::kMaximize;
}

SupportOracle::Eval SupportOracle::eval(const Eigen::VectorXd& direction) {
    if (direction.size() != Z_.dim())
        throw std::invalid_argument("support: direction dimension mismatch");
    prob_.objective = Z_.generators().transpose() * direction;
    lp::Result r = lp::solve(prob_, opt_, basis_);
    Eval out;
    if (r.status == lp::Status::kUnbounded) {
        out.value = lp::kInf;
        return out;
    }
    if (r.status == lp::Status::kInfeasible)
        throw std::runtime_error("support: set is empty");
    out.value = r.value + direction.dot(Z_.center());
    out.maximizer = Z_.generators() * r.argmin + Z_.center();
    return out;
}

double support_value(const ConstrainedZonotope& Z, const Eigen::VectorXd& direction,
                     const lp::Options& opt) {
    SupportOracle oracle(Z, opt);
    return oracle.eval(direction).value;
}

IntervalBox interval_hull(const ConstrainedZonotope& Z, const lp::Options& opt) {
    const int n = Z.dim();
    SupportOracle oracle(Z, opt);
    Eigen::VectorXd lo(n), up(n);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        dir(i) = 1.0;
        up(i) = oracle.eval(dir).value;
        dir(i) = -1.0;
        lo(i) = -oracle.eval(dir).value;
        dir(i) = 0.0;
    }
    IntervalBox out;
    out.lower = lo;
    out.upper = up;
    return out;
}

double diameter_inf(const ConstrainedZonotope& Z, const lp::Options& opt) {
    const IntervalBox hull = interval_hull(Z, opt);
    return (hull.upper - hull.lower).maxCoeff();
}

namespace {

Eigen::Vector2d rot90cw(const Eigen::Vector2d& v) { return {v.y(), -v.x()}; }

struct TraceState {
    SupportOracle* oracle;
    double tol;
    int budget;
    std::vector<Eigen::Vector2d> points;
};

// Refine between two support results whose directions are < pi apart.
void refine(TraceState& st, const Eigen::Vector2d& d1, const Eigen::Vector2d& p1,
            const Eigen::Vector2d& d2, const Eigen::Vector2d& p2, int depth) {
    if (st.budget <= 0 || depth > 48) return;
    Eigen::Vector2d chord = p2 - p1;
    Eigen::Vector2d dn;
    if (chord.norm() < st.tol) return;  // no vertex strictly between
    dn = rot90cw(chord).normalized();
    Eigen::Vector2d mid = (d1 + d2).normalized();
    if (dn.dot(mid) <= 0.0) dn = mid;  // numerical fallback
    auto ev = st.oracle->eval(Eigen::Vector2d(dn));
    const double gain = ev.value - std::max(dn.dot(p1), dn.dot(p2));
    if (gain <= st.tol) return;
    Eigen::Vector2d p = ev.maximizer;
    st.points.push_back(p);
    --st.budget;
    refine(st, d1, p1, dn, p, depth + 1);
    refine(st, dn, p, d2, p2, depth + 1);
}

// Andrew's monotone chain; returns CCW hull without the closing point.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts, double tol) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [tol](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                              return (a - b).lpNorm<Eigen::Infinity>() <= tol;
                          }),
              pts.end());
    const int n = static_cast<int>(pts.size());
    if (n <= 2) return pts;
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                    const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (int i = n - 2, t = k + 1; i >= 0; --i) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

std::vector<Eigen::Vector2d> trace_polygon(const ConstrainedZonotope& Z,
                                           const CompressOptions& opt) {
    if (Z.dim() != 2)
        throw std::invalid_argument("trace_polygon: requires a 2-D set");
    SupportOracle oracle(Z, opt.lp);

    // eight seed directions; also establishes boundedness
    std::vector<Eigen::Vector2d> dirs, pts;
    for (int i = 0; i < 8; ++i) {
        const double a = 2.0 * M_PI * i / 8.0;
        Eigen::Vector2d d(std::cos(a), std::sin(a));
        auto ev = oracle.eval(Eigen::Vector2d(d));
        if (!std::isfinite(ev.value))
            throw std::invalid_argument("trace_polygon: set is unbounded");
        dirs.push_back(d);
        pts.push_back(ev.maximizer);
    }
    double scale = 1.0;
    for (const auto& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());

    TraceState st;
    st.oracle = &oracle;
    st.tol = opt.trace_tol * scale;
    st.budget = opt.max_vertices;
    st.points = pts;
    for (int i = 0; i < 8; ++i)
        refine(st, dirs[i], pts[i], dirs[(i + 1) % 8], pts[(i + 1) % 8], 0);

    return convex_hull(std::move(st.points), st.tol);
}

ConstrainedZonotope compress_polygon(const ConstrainedZonotope& Z,
                                     const CompressOptions& opt) {
    if (Z.dim() != 2)
        throw std::invalid_argument("compress_polygon: requires a 2-D set");
    if (is_empty(Z, opt.lp)) return Z;

    std::vector<Eigen::Vector2d> verts = trace_polygon(Z, opt);
    SupportOracle oracle(Z, opt.lp);

    double scale = 1.0;
    for (const auto& v : verts) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
    const double push = opt.push * scale;

    // certified bounding box (the traced points already attain the hull)
    IntervalBox hull = interval_hull(Z, opt.lp).inflated(push);
    const Eigen::Vector2d mid = hull.center();
    const Eigen::Vector2d rad = hull.radius().cwiseMax(push);

    // fewer than three vertices: the set is (numerically) a point or segment;
    // its inflated bounding box is a faithful stand-in at this tolerance
    if (verts.size() < 3) return ConstrainedZonotope::from_box(hull);

    // one certified halfspace per hull edge
    const int V = static_cast<int>(verts.size());
    Eigen::MatrixXd N(V, 2);
    Eigen::VectorXd k(V);
    for (int i = 0; i < V; ++i) {
        const Eigen::Vector2d e = verts[(i + 1) % V] - verts[i];
        const Eigen::Vector2d nrm = rot90cw(e).normalized();  // outward for CCW
        N.row(i) = nrm.transpose();
        k(i) = oracle.eval(Eigen::Vector2d(nrm)).value + push;
    }

    // {x in box : N x <= k} as a constrained zonotope: slack generators with
    // ranges wide enough that the lower side is vacuous inside the box
    Eigen::VectorXd smax(V);
    for (int i = 0; i < V; ++i) {
        const Eigen::Vector2d ni = N.row(i).transpose();
        const double lo_over_box = ni.dot(mid) - ni.cwiseAbs().dot(rad);
        smax(i) = std::max(k(i) - lo_over_box, 1e-12 * scale);
    }
    const Eigen::VectorXd sigma = 0.5 * smax;

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 2 + V);
    G(0, 0) = rad(0);
    G(1, 1) = rad(1);
    Eigen::MatrixXd A(V, 2 + V);
    A.leftCols(2) = N * rad.asDiagonal();
    A.rightCols(V) = Eigen::MatrixXd(sigma.asDiagonal());
    Eigen::VectorXd b = k - N * mid - sigma;
    return ConstrainedZonotope(G, mid, A, b, Eigen::VectorXd::Ones(2 + V));
}

}  // namespace zonosmooth::cz
