#include "zonosmooth/smoother.hpp"

#include <stdexcept>
#include <string>

namespace zonosmooth::smoother {

cz::ConstrainedZonotope smooth_step(const cz::ConstrainedZonotope& posterior_k,
                                    const cz::ConstrainedZonotope& smoothed_next,
                                    const model::LinearSystem& sys, int k) {
    const cz::ConstrainedZonotope reach = cz::minkowski_sum(
        smoothed_next, cz::linear_map(-sys.gamma_at(k), sys.w_range));
    return cz::generalized_intersection(posterior_k, sys.phi_at(k), reach);
}

SmootherOutput run_smoother(const std::vector<filter::FilterState>& filter_out,
                            const model::LinearSystem& sys,
                            const SmootherOptions& opt) {
    if (filter_out.empty())
        throw std::invalid_argument("run_smoother: empty filter output");
    const int T = static_cast<int>(filter_out.size()) - 1;

    SmootherOutput out;
    out.smoothed.resize(T + 1);
    out.smoothed[T] = filter_out[T].posterior;
    for (int k = T - 1; k >= 0; --k) {
        cz::ConstrainedZonotope s =
            smooth_step(filter_out[k].posterior, out.smoothed[k + 1], sys, k);
        if (opt.compress) {
            if (cz::is_empty(s, opt.compress_opt.lp))
                throw std::runtime_error("run_smoother: empty smoothed range at k=" +
                                         std::to_string(k));
            s = cz::compress_polygon(s, opt.compress_opt);
        }
        out.smoothed[k] = std::move(s);
    }
    return out;
}

}  // namespace zonosmooth::smoother
