#ifndef ZONOSMOOTH_FILTER_HPP_
#define ZONOSMOOTH_FILTER_HPP_

#include <vector>

#include "zonosmooth/czono.hpp"
#include "zonosmooth/model.hpp"

namespace zonosmooth::filter {

/// Prior and posterior state ranges at one time step.
struct FilterState {
    int k = 0;
    cz::ConstrainedZonotope prior;      // range of x_k given y_{0:k-1}
    cz::ConstrainedZonotope posterior;  // range of x_k given y_{0:k}
};

struct FilterOptions {
    /// Replace each posterior by a set-equal low-order representation
    /// (2-D systems only). Keeps long-horizon runs tractable; the default
    /// keeps the literal block recursion.
    bool compress = false;
    cz::CompressOptions compress_opt;
};

/// Exact prior range: Phi_k . posterior + Gamma_k . w_range.
cz::ConstrainedZonotope predict(const cz::ConstrainedZonotope& posterior_prev,
                                const model::LinearSystem& sys, int k);

/// Exact posterior range {x in prior : Xi_k x in {y} + Psi_k.(-v_range)}.
/// An inconsistent measurement yields an empty set (detect with is_empty),
/// never an exception.
cz::ConstrainedZonotope update(const cz::ConstrainedZonotope& prior,
                               const Eigen::VectorXd& y,
                               const model::LinearSystem& sys, int k);

/// Full forward pass: prior_0 = x0_range, update at every k (including 0),
/// predict between steps. Emptiness is not checked here; consumers decide.
std::vector<FilterState> run_filter(const model::LinearSystem& sys,
                                    const model::Trajectory& traj,
                                    const FilterOptions& opt = {});

}  // namespace zonosmooth::filter

#endif
