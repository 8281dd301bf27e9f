#ifndef ZONOSMOOTH_INTERVAL1D_HPP_
#define ZONOSMOOTH_INTERVAL1D_HPP_

#include <utility>
#include <vector>

#include "zonosmooth/model.hpp"

namespace zonosmooth::interval1d {

using model::Interval;
using model::MonotoneMap;

/// Filter ranges at one step of the scalar system.
struct FilterState1d {
    int k = 0;
    Interval prior;
    Interval posterior;
};

/// x with eta(x) = y; bisection to 1e-12 relative accuracy.
double eta_inverse(const MonotoneMap& m, double y);

/// One predict/update of the exact interval filter:
/// prior = eta(posterior_prev) + w_range, posterior = prior cut by the
/// measurement strip (y - v_range) / alpha. Empty posteriors are flagged
/// on the returned interval.
std::pair<Interval, Interval> filter_step_1d(const Interval& posterior_prev, double y,
                                             const model::ScalarAffineSystem& sys);

/// Full forward pass over a scalar trajectory (update at every k).
std::vector<FilterState1d> run_filter_1d(const model::ScalarAffineSystem& sys,
                                         const model::Trajectory& traj);

/// One backward smoothing step: pull smoothed_next back through the
/// dynamics (the extrema of eta^{-1}(x_next - w) sit at interval endpoints
/// because eta is monotone), then clamp to posterior_k.
Interval smooth_step_1d(const Interval& posterior_k, const Interval& smoothed_next,
                        const Interval& w_range, const MonotoneMap& m);

/// Backward recursion; smoothed[T] = posterior_T.
std::vector<Interval> run_smoother_1d(const std::vector<FilterState1d>& filter_out,
                                      const model::ScalarAffineSystem& sys);

}  // namespace zonosmooth::interval1d

#endif
