#ifndef ZONOSMOOTH_SMOOTHER_HPP_
#define ZONOSMOOTH_SMOOTHER_HPP_

#include <vector>

#include "zonosmooth/czono.hpp"
#include "zonosmooth/filter.hpp"
#include "zonosmooth/model.hpp"

namespace zonosmooth::smoother {

/// Smoothed ranges of x_k given y_{0:T}, k = 0..T; smoothed[T] equals the
/// final filter posterior.
struct SmootherOutput {
    std::vector<cz::ConstrainedZonotope> smoothed;
};

struct SmootherOptions {
    /// Replace each smoothed range by a set-equal low-order representation
    /// between backward steps (2-D systems only); the default keeps the
    /// literal block recursion.
    bool compress = false;
    cz::CompressOptions compress_opt;
};

/// One backward step: the set of x_k in posterior_k whose successor
/// Phi_k x_k + Gamma_k w_k can land in smoothed_next for some admissible
/// w_k. Composed as
///   generalized_intersection(posterior_k, Phi_k,
///                            smoothed_next + (-Gamma_k).w_range),
/// which assembles the closed-form block quintuple exactly.
cz::ConstrainedZonotope smooth_step(const cz::ConstrainedZonotope& posterior_k,
                                    const cz::ConstrainedZonotope& smoothed_next,
                                    const model::LinearSystem& sys, int k);

/// Backward recursion over a complete filter pass. Throws std::runtime_error
/// when a smoothed range comes out empty (impossible on consistent data).
SmootherOutput run_smoother(const std::vector<filter::FilterState>& filter_out,
                            const model::LinearSystem& sys,
                            const SmootherOptions& opt = {});

}  // namespace zonosmooth::smoother

#endif
