#include "zonosmooth/interval1d.hpp"

#include <algorithm>
#include <stdexcept>

namespace zonosmooth::interval1d {

double eta_inverse(const MonotoneMap& m, double y) { return m.inverse(y); }

std::pair<Interval, Interval> filter_step_1d(const Interval& posterior_prev, double y,
                                             const model::ScalarAffineSystem& sys) {
    if (posterior_prev.empty)
        throw std::invalid_argument("filter_step_1d: empty previous posterior");

    // forward image of an interval under monotone eta, plus noise
    double lo = sys.eta(posterior_prev.a);
    double hi = sys.eta(posterior_prev.b);
    if (!sys.eta.increasing()) std::swap(lo, hi);
    const Interval prior(lo + sys.w_range.a, hi + sys.w_range.b);

    // measurement strip: y = alpha x + v  =>  x in (y - v_range) / alpha
    const double alpha = sys.meas_gain;
    double ma = (y - sys.v_range.b) / alpha;
    double mb = (y - sys.v_range.a) / alpha;
    if (alpha < 0.0) std::swap(ma, mb);
    const Interval posterior = prior.intersect(Interval(ma, mb));
    return {prior, posterior};
}

std::vector<FilterState1d> run_filter_1d(const model::ScalarAffineSystem& sys,
                                         const model::Trajectory& traj) {
    sys.validate();
    const int T = traj.horizon();
    std::vector<FilterState1d> out;
    out.reserve(T + 1);

    Interval prior = sys.x0_range;
    for (int k = 0; k <= T; ++k) {
        FilterState1d st;
        st.k = k;
        st.prior = prior;
        const double y = traj.measurements[k](0);
        const double alpha = sys.meas_gain;
        double ma = (y - sys.v_range.b) / alpha;
        double mb = (y - sys.v_range.a) / alpha;
        if (alpha < 0.0) std::swap(ma, mb);
        st.posterior = prior.intersect(Interval(ma, mb));
        if (k < T) {
            if (st.posterior.empty)
                throw std::runtime_error("run_filter_1d: empty posterior at k=" +
                                         std::to_string(k));
            double lo = sys.eta(st.posterior.a);
            double hi = sys.eta(st.posterior.b);
            if (!sys.eta.increasing()) std::swap(lo, hi);
            prior = Interval(lo + sys.w_range.a, hi + sys.w_range.b);
        }
        out.push_back(st);
    }
    return out;
}

Interval smooth_step_1d(const Interval& posterior_k, const Interval& smoothed_next,
                        const Interval& w_range, const MonotoneMap& m) {
    if (posterior_k.empty || smoothed_next.empty || w_range.empty)
        throw std::invalid_argument("smooth_step_1d: empty input interval");

    // extrema of eta^{-1}(x_next - w) over the rectangle are at its corners
    double back_lo, back_hi;
    if (m.increasing()) {
        back_lo = m.inverse(smoothed_next.a - w_range.b);
        back_hi = m.inverse(smoothed_next.b - w_range.a);
    } else {
        back_lo = m.inverse(smoothed_next.b - w_range.a);
        back_hi = m.inverse(smoothed_next.a - w_range.b);
    }
    const double lo = std::max(back_lo, posterior_k.a);
    const double hi = std::min(back_hi, posterior_k.b);
    if (lo > hi) return Interval::make_empty();
    return {lo, hi};
}

std::vector<Interval> run_smoother_1d(const std::vector<FilterState1d>& filter_out,
                                      const model::ScalarAffineSystem& sys) {
    if (filter_out.empty())
        throw std::invalid_argument("run_smoother_1d: empty filter output");
    const int T = static_cast<int>(filter_out.size()) - 1;
    std::vector<Interval> smoothed(T + 1);
    smoothed[T] = filter_out[T].posterior;
    for (int k = T - 1; k >= 0; --k) {
        smoothed[k] = smooth_step_1d(filter_out[k].posterior, smoothed[k + 1],
                                     sys.w_range, sys.eta);
        if (smoothed[k].empty)
            throw std::runtime_error("run_smoother_1d: empty smoothed range at k=" +
                                     std::to_string(k));
    }
    return smoothed;
}

}  // namespace zonosmooth::interval1d
