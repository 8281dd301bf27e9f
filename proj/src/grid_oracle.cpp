#include "zonosmooth/grid_oracle.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace zonosmooth::grid_oracle {

namespace {

constexpr long kMaxCells = 10'000'000;

// Internal refinement factor. Evaluating on a finer lattice keeps the
// discretization slack a small fraction of the reported spacing; plain
// one-cell slack would otherwise compound through the dynamics.
constexpr int kRefine = 8;

// The oracle works on boxes directly so that it stays independent of the
// LP-backed set machinery it is used to cross-check.
cz::IntervalBox box_range(const cz::ConstrainedZonotope& Z, const char* what) {
    if (Z.num_constraints() != 0)
        throw std::invalid_argument(std::string(what) + ": oracle requires box ranges");
    const int n = Z.dim();
    Eigen::VectorXd rad = Eigen::VectorXd::Zero(n);
    const Eigen::MatrixXd& G = Z.generators();
    for (int j = 0; j < Z.num_generators(); ++j) {
        int nz = -1;
        for (int i = 0; i < n; ++i) {
            if (G(i, j) != 0.0) {
                if (nz >= 0)
                    throw std::invalid_argument(std::string(what) +
                                                ": oracle requires box ranges");
                nz = i;
            }
        }
        if (nz >= 0) rad(nz) += std::abs(G(nz, j)) * Z.half_widths()(j);
    }
    return {Z.center() - rad, Z.center() + rad};
}

double inf_row_norm(const Eigen::MatrixXd& M) {
    return M.size() == 0 ? 0.0 : M.cwiseAbs().rowwise().sum().maxCoeff();
}

// Row-major fine lattice over the domain.
struct FineGrid {
    Eigen::VectorXd origin;
    double step = 0.0;
    Eigen::VectorXi shape;

    int dim() const { return static_cast<int>(shape.size()); }
    long cells() const {
        long c = 1;
        for (int i = 0; i < dim(); ++i) c *= shape(i);
        return c;
    }
    Eigen::VectorXd center_of(long flat) const {
        Eigen::VectorXd x(dim());
        for (int i = dim() - 1; i >= 0; --i) {
            x(i) = origin(i) + step * static_cast<double>(flat % shape(i));
            flat /= shape(i);
        }
        return x;
    }
    // flat index of the cell containing x, or -1 outside the lattice
    long locate(const Eigen::VectorXd& x) const {
        long flat = 0;
        for (int i = 0; i < dim(); ++i) {
            const long idx = std::lround((x(i) - origin(i)) / step);
            if (idx < 0 || idx >= shape(i)) return -1;
            flat = flat * shape(i) + idx;
        }
        return flat;
    }
    // marks the 3^n neighborhood of the cell containing x
    void mark_ring(const Eigen::VectorXd& x, std::vector<char>& mask) const {
        std::vector<long> idx(dim());
        for (int i = 0; i < dim(); ++i) {
            idx[i] = std::lround((x(i) - origin(i)) / step);
            if (idx[i] < -1 || idx[i] > shape(i)) return;
        }
        const int n = dim();
        std::vector<long> cur(n);
        long total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        for (long code = 0; code < total; ++code) {
            long c = code;
            bool ok = true;
            long flat = 0;
            for (int i = 0; i < n; ++i) {
                cur[i] = idx[i] + (c % 3) - 1;
                c /= 3;
                if (cur[i] < 0 || cur[i] >= shape(i)) {
                    ok = false;
                    break;
                }
                flat = flat * shape(i) + cur[i];
            }
            if (ok) mask[flat] = 1;
        }
    }
};

FineGrid make_fine(const cz::IntervalBox& domain, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("grid oracle: delta must be positive");
    FineGrid f;
    const int n = domain.dim();
    f.origin = domain.lower;
    f.step = delta / kRefine;
    f.shape.resize(n);
    long coarse = 1, fine = 1;
    for (int i = 0; i < n; ++i) {
        const int cells = static_cast<int>(std::floor((domain.upper(i) - domain.lower(i)) / delta)) + 1;
        coarse *= cells;
        f.shape(i) = (cells - 1) * kRefine + 1;
        fine *= f.shape(i);
        if (coarse > kMaxCells || fine > 64L * kMaxCells)
            throw std::invalid_argument("grid oracle: more than 10^7 cells");
    }
    return f;
}

// Coarse reported lattice with the fine evaluation mask attached.
GridSet coarsen(const FineGrid& f, const std::vector<char>& fine_mask,
                const cz::IntervalBox& domain, double delta) {
    GridSet g;
    const int n = f.dim();
    g.origin = domain.lower;
    g.spacing = Eigen::VectorXd::Constant(n, delta);
    g.shape.resize(n);
    for (int i = 0; i < n; ++i) g.shape(i) = (f.shape(i) - 1) / kRefine + 1;
    g.refine = kRefine;
    g.fine_shape = f.shape;
    g.fine_mask = fine_mask;
    long coarse_cells = 1;
    for (int i = 0; i < n; ++i) coarse_cells *= g.shape(i);
    g.mask.assign(coarse_cells, 0);
    const long fine_cells = f.cells();
    std::vector<long> fidx(n);
    for (long idx = 0; idx < fine_cells; ++idx) {
        if (!fine_mask[idx]) continue;
        long rem = idx;
        for (int i = n - 1; i >= 0; --i) {
            fidx[i] = rem % f.shape(i);
            rem /= f.shape(i);
        }
        // nearest coarse cell of this fine center
        long flat = 0;
        for (int i = 0; i < n; ++i) {
            long ci = (fidx[i] + kRefine / 2) / kRefine;
            if (ci >= g.shape(i)) ci = g.shape(i) - 1;
            flat = flat * g.shape(i) + ci;
        }
        g.mask[flat] = 1;
    }
    return g;
}

// Measurement predicate: y - Xi x in the Psi v-box, with slack scaled to
// half a fine step through the row sums.
struct MeasTest {
    Eigen::MatrixXd Xi;
    Eigen::MatrixXd Psi;
    cz::IntervalBox v_box;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    double slack;

    MeasTest(const Eigen::MatrixXd& Xi_, const Eigen::MatrixXd& Psi_,
             const cz::IntervalBox& vb, double fine_step)
        : Xi(Xi_), Psi(Psi_), v_box(vb), cod(Psi_) {
        slack = inf_row_norm(Xi_) * 0.5 * fine_step + 1e-9;
    }

    bool pass(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const {
        Eigen::VectorXd r = y - Xi * x;
        Eigen::VectorXd v = cod.solve(r);
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) = std::min(std::max(v(i), v_box.lower(i)), v_box.upper(i));
        return (Psi * v - r).lpNorm<Eigen::Infinity>() <= slack;
    }
};

// Forward reach rasterizer: paints the 1-ring of Phi x' + Gamma w for every
// marked source and a fine walk of the w-box.
void raster_forward(const FineGrid& f, const std::vector<char>& src_mask,
                    const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& Gamma,
                    const cz::IntervalBox& w_box, std::vector<char>& out) {
    const double gnorm = std::max(1.0, inf_row_norm(Gamma));
    const double wstep = f.step / (2.0 * gnorm);
    const int p = w_box.dim();

    std::vector<long> counts(p);
    long total = 1;
    for (int i = 0; i < p; ++i) {
        counts[i] = std::max<long>(1, std::lround((w_box.upper(i) - w_box.lower(i)) / wstep) + 1);
        total *= counts[i];
    }

    const long cells = f.cells();
    Eigen::VectorXd w(p);
    for (long s = 0; s < cells; ++s) {
        if (!src_mask[s]) continue;
        const Eigen::VectorXd base = Phi * f.center_of(s);
        for (long code = 0; code < total; ++code) {
            long c = code;
            for (int i = 0; i < p; ++i) {
                const long ci = c % counts[i];
                c /= counts[i];
                w(i) = counts[i] == 1
                           ? 0.5 * (w_box.lower(i) + w_box.upper(i))
                           : w_box.lower(i) + (w_box.upper(i) - w_box.lower(i)) * ci /
                                                 (counts[i] - 1);
            }
            f.mark_ring(base + Gamma * w, out);
        }
    }
}

}  // namespace

long GridSet::cell_count() const {
    long c = 1;
    for (int i = 0; i < dim(); ++i) c *= shape(i);
    return c;
}

Eigen::VectorXd GridSet::center_of(long flat) const {
    Eigen::VectorXd x(dim());
    for (int i = dim() - 1; i >= 0; --i) {
        x(i) = origin(i) + spacing(i) * static_cast<double>(flat % shape(i));
        flat /= shape(i);
    }
    return x;
}

long GridSet::num_marked() const {
    long c = 0;
    for (char v : mask) c += (v != 0);
    return c;
}

std::vector<GridSet> grid_filter(const model::LinearSystem& sys,
                                 const std::vector<Eigen::VectorXd>& measurements,
                                 const cz::IntervalBox& domain, double delta) {
    sys.validate();
    const cz::IntervalBox x0_box = box_range(sys.x0_range, "x0_range");
    const cz::IntervalBox w_box = box_range(sys.w_range, "w_range");
    const cz::IntervalBox v_box = box_range(sys.v_range, "v_range");
    const int T = static_cast<int>(measurements.size()) - 1;
    if (T < 0) throw std::invalid_argument("grid_filter: no measurements");

    const FineGrid f = make_fine(domain, delta);
    const long cells = f.cells();

    std::vector<GridSet> sets;
    sets.reserve(T + 1);
    std::vector<char> prev;
    for (int k = 0; k <= T; ++k) {
        const MeasTest meas(sys.xi_at(k), sys.psi_at(k), v_box, f.step);

        std::vector<char> feasible(cells, 0);
        if (k == 0) {
            for (long idx = 0; idx < cells; ++idx)
                if (x0_box.contains(f.center_of(idx), 0.5 * f.step + 1e-12))
                    feasible[idx] = 1;
        } else {
            raster_forward(f, prev, sys.phi_at(k - 1), sys.gamma_at(k - 1), w_box,
                           feasible);
        }

        std::vector<char> marked(cells, 0);
        for (long idx = 0; idx < cells; ++idx)
            if (feasible[idx] && meas.pass(measurements[k], f.center_of(idx)))
                marked[idx] = 1;

        prev = marked;
        sets.push_back(coarsen(f, marked, domain, delta));
    }
    return sets;
}

std::vector<GridSet> grid_smooth(const std::vector<GridSet>& filter_sets,
                                 const model::LinearSystem& sys, double delta) {
    if (filter_sets.empty()) throw std::invalid_argument("grid_smooth: empty input");
    if (filter_sets[0].fine_mask.empty())
        throw std::invalid_argument("grid_smooth: filter sets lack the fine masks");
    const cz::IntervalBox w_box = box_range(sys.w_range, "w_range");
    const int T = static_cast<int>(filter_sets.size()) - 1;

    FineGrid f;
    f.origin = filter_sets[0].origin;
    f.step = delta / filter_sets[0].refine;
    f.shape = filter_sets[0].fine_shape;
    const long cells = f.cells();

    cz::IntervalBox domain{filter_sets[0].origin,
                           filter_sets[0].origin +
                               (filter_sets[0].shape.cast<double>() -
                                Eigen::VectorXd::Ones(f.dim()))
                                       .cwiseProduct(filter_sets[0].spacing) +
                               filter_sets[0].spacing * 0.0};

    std::vector<GridSet> smoothed(filter_sets);
    std::vector<char> next_fine = filter_sets[T].fine_mask;
    for (int k = T - 1; k >= 0; --k) {
        const Eigen::MatrixXd& Phi = sys.phi_at(k);

        // backward reach set of the next smoothed mask
        std::vector<char> back(cells, 0);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Phi);
        if (lu.isInvertible()) {
            const Eigen::MatrixXd Phinv = lu.inverse();
            raster_forward(f, next_fine, Phinv, -Phinv * sys.gamma_at(k), w_box, back);
        } else {
            // rank-deficient dynamics: direct pairwise scan at fine resolution
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.gamma_at(k));
            const double slack = (1.0 + inf_row_norm(Phi)) * 0.5 * f.step + 1e-9;
            std::vector<Eigen::VectorXd> nexts;
            for (long idx = 0; idx < cells; ++idx)
                if (next_fine[idx]) nexts.push_back(f.center_of(idx));
            for (long idx = 0; idx < cells; ++idx) {
                if (!filter_sets[k].fine_mask[idx]) continue;
                const Eigen::VectorXd px = Phi * f.center_of(idx);
                for (const auto& xn : nexts) {
                    Eigen::VectorXd r = xn - px;
                    Eigen::VectorXd w = cod.solve(r);
                    for (Eigen::Index i = 0; i < w.size(); ++i)
                        w(i) = std::min(std::max(w(i), w_box.lower(i)), w_box.upper(i));
                    if ((sys.gamma_at(k) * w - r).lpNorm<Eigen::Infinity>() <= slack) {
                        back[idx] = 1;
                        break;
                    }
                }
            }
        }

        std::vector<char> cur(cells, 0);
        for (long idx = 0; idx < cells; ++idx)
            cur[idx] = filter_sets[k].fine_mask[idx] && back[idx];
        smoothed[k] = coarsen(f, cur, domain, delta);
        next_fine = std::move(cur);
    }
    return smoothed;
}

std::vector<GridSet> grid_filter_scalar(const model::ScalarAffineSystem& sys,
                                        const std::vector<double>& measurements,
                                        double dom_lo, double dom_hi, double delta) {
    sys.validate();
    const int T = static_cast<int>(measurements.size()) - 1;
    if (T < 0) throw std::invalid_argument("grid_filter_scalar: no measurements");
    cz::IntervalBox domain{Eigen::VectorXd::Constant(1, dom_lo),
                           Eigen::VectorXd::Constant(1, dom_hi)};
    const FineGrid f = make_fine(domain, delta);
    const long cells = f.cells();
    const double meas_slack = std::abs(sys.meas_gain) * 0.5 * f.step + 1e-12;

    auto in_interval = [](double v, const model::Interval& iv, double tol) {
        return v >= iv.a - tol && v <= iv.b + tol;
    };

    std::vector<GridSet> sets;
    std::vector<char> prev;
    for (int k = 0; k <= T; ++k) {
        std::vector<char> feasible(cells, 0);
        if (k == 0) {
            for (long idx = 0; idx < cells; ++idx)
                if (in_interval(f.center_of(idx)(0), sys.x0_range, 0.5 * f.step + 1e-12))
                    feasible[idx] = 1;
        } else {
            // forward image of a fine cell is an interval; paint it directly
            for (long s = 0; s < cells; ++s) {
                if (!prev[s]) continue;
                const double fx = sys.eta(f.center_of(s)(0));
                const double lo = fx + sys.w_range.a - f.step;
                const double hi = fx + sys.w_range.b + f.step;
                long i0 = std::lround(std::floor((lo - f.origin(0)) / f.step));
                long i1 = std::lround(std::ceil((hi - f.origin(0)) / f.step));
                i0 = std::max<long>(i0, 0);
                i1 = std::min<long>(i1, f.shape(0) - 1);
                for (long i = i0; i <= i1; ++i) feasible[i] = 1;
            }
        }
        std::vector<char> marked(cells, 0);
        for (long idx = 0; idx < cells; ++idx) {
            if (!feasible[idx]) continue;
            const double resid = measurements[k] - sys.meas_gain * f.center_of(idx)(0);
            if (in_interval(resid, sys.v_range, meas_slack)) marked[idx] = 1;
        }
        prev = marked;
        sets.push_back(coarsen(f, marked, domain, delta));
    }
    return sets;
}

std::vector<GridSet> grid_smooth_scalar(const std::vector<GridSet>& filter_sets,
                                        const model::ScalarAffineSystem& sys,
                                        double delta) {
    if (filter_sets.empty()) throw std::invalid_argument("grid_smooth_scalar: empty input");
    if (filter_sets[0].fine_mask.empty())
        throw std::invalid_argument("grid_smooth_scalar: filter sets lack the fine masks");
    const int T = static_cast<int>(filter_sets.size()) - 1;

    FineGrid f;
    f.origin = filter_sets[0].origin;
    f.step = delta / filter_sets[0].refine;
    f.shape = filter_sets[0].fine_shape;
    const long cells = f.cells();
    cz::IntervalBox domain{
        filter_sets[0].origin,
        filter_sets[0].origin + filter_sets[0].spacing * (filter_sets[0].shape(0) - 1)};

    std::vector<GridSet> smoothed(filter_sets);
    std::vector<char> next_fine = filter_sets[T].fine_mask;
    for (int k = T - 1; k >= 0; --k) {
        // eta(x) must reach [xn - w_hi, xn - w_lo] for some marked successor;
        // monotonicity turns that into one interval of x per successor
        std::vector<char> back(cells, 0);
        for (long s = 0; s < cells; ++s) {
            if (!next_fine[s]) continue;
            const double xn = f.center_of(s)(0);
            double ylo = xn - sys.w_range.b - f.step;
            double yhi = xn - sys.w_range.a + f.step;
            double xlo, xhi;
            try {
                xlo = sys.eta.inverse(ylo);
                xhi = sys.eta.inverse(yhi);
            } catch (const std::domain_error&) {
                continue;
            }
            if (!sys.eta.increasing()) std::swap(xlo, xhi);
            long i0 = std::lround(std::floor((xlo - f.origin(0)) / f.step)) - 1;
            long i1 = std::lround(std::ceil((xhi - f.origin(0)) / f.step)) + 1;
            i0 = std::max<long>(i0, 0);
            i1 = std::min<long>(i1, f.shape(0) - 1);
            for (long i = i0; i <= i1; ++i) back[i] = 1;
        }
        std::vector<char> cur(cells, 0);
        for (long idx = 0; idx < cells; ++idx)
            cur[idx] = filter_sets[k].fine_mask[idx] && back[idx];
        smoothed[k] = coarsen(f, cur, domain, delta);
        next_fine = std::move(cur);
    }
    return smoothed;
}

cz::IntervalBox hull_of_grid(const GridSet& g) {
    const long cells = g.cell_count();
    bool found = false;
    Eigen::VectorXd lo, hi;
    for (long idx = 0; idx < cells; ++idx) {
        if (!g.marked(idx)) continue;
        const Eigen::VectorXd x = g.center_of(idx);
        if (!found) {
            lo = x;
            hi = x;
            found = true;
        } else {
            lo = lo.cwiseMin(x);
            hi = hi.cwiseMax(x);
        }
    }
    if (!found) throw std::runtime_error("hull_of_grid: empty grid set");
    return {lo - 0.5 * g.spacing, hi + 0.5 * g.spacing};
}

void write_grid_csv(const GridSet& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "# zonosmooth-csv v1\n";
    for (int i = 0; i < g.dim(); ++i) out << (i ? ",x" : "x") << i + 1;
    out << "\n";
    char buf[32];
    const long cells = g.cell_count();
    for (long idx = 0; idx < cells; ++idx) {
        if (!g.marked(idx)) continue;
        const Eigen::VectorXd x = g.center_of(idx);
        for (int i = 0; i < g.dim(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", x(i));
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

}  // namespace zonosmooth::grid_oracle
