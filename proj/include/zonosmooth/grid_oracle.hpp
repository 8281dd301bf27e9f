#ifndef ZONOSMOOTH_GRID_ORACLE_HPP_
#define ZONOSMOOTH_GRID_ORACLE_HPP_

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "zonosmooth/czono.hpp"
#include "zonosmooth/model.hpp"

namespace zonosmooth::grid_oracle {

/// Membership mask over a finite lattice: cell (i1,..,in) has center
/// origin + spacing .* index. Used as a brute-force stand-in for the exact
/// filtered/smoothed ranges on small instances.
///
/// The evaluation runs on an internally refined lattice (factor `refine`)
/// and is coarsened to the requested spacing; the fine mask rides along so
/// the backward pass can prune at full resolution.
struct GridSet {
    Eigen::VectorXd origin;
    Eigen::VectorXd spacing;
    Eigen::VectorXi shape;
    std::vector<char> mask;  // row-major over shape

    int refine = 1;
    Eigen::VectorXi fine_shape;
    std::vector<char> fine_mask;

    int dim() const { return static_cast<int>(shape.size()); }
    long cell_count() const;
    bool marked(long flat) const { return mask[flat] != 0; }
    Eigen::VectorXd center_of(long flat) const;
    long num_marked() const;
    bool any() const { return num_marked() > 0; }
};

/// Direct lattice evaluation of the forward filter: a cell survives the
/// update iff y - Xi x lies in the Psi v-box (with one-cell slack), and
/// survives the prediction iff it is reachable from some marked predecessor.
/// Noise ranges must be axis boxes. Grids above 10^7 cells are refused.
std::vector<GridSet> grid_filter(const model::LinearSystem& sys,
                                 const std::vector<Eigen::VectorXd>& measurements,
                                 const cz::IntervalBox& domain, double delta);

/// Direct lattice evaluation of the backward smoothing recursion over the
/// filtered sets: keep x_k iff some marked x_{k+1} is reachable through the
/// dynamics and the w-box (one-cell slack).
std::vector<GridSet> grid_smooth(const std::vector<GridSet>& filter_sets,
                                 const model::LinearSystem& sys, double delta);

/// 1-D variants for the scalar nonlinear system.
std::vector<GridSet> grid_filter_scalar(const model::ScalarAffineSystem& sys,
                                        const std::vector<double>& measurements,
                                        double dom_lo, double dom_hi, double delta);
std::vector<GridSet> grid_smooth_scalar(const std::vector<GridSet>& filter_sets,
                                        const model::ScalarAffineSystem& sys,
                                        double delta);

/// Tight box over marked cell centers, inflated by half a cell per side.
/// Throws std::runtime_error on an empty grid set.
cz::IntervalBox hull_of_grid(const GridSet& g);

/// Marked-cell centers as CSV (one row per cell).
void write_grid_csv(const GridSet& g, const std::string& path);

}  // namespace zonosmooth::grid_oracle

#endif
