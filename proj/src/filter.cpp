#include "zonosmooth/filter.hpp"

#include <stdexcept>

namespace zonosmooth::filter {

cz::ConstrainedZonotope predict(const cz::ConstrainedZonotope& posterior_prev,
                                const model::LinearSystem& sys, int k) {
    return cz::minkowski_sum(cz::linear_map(sys.phi_at(k), posterior_prev),
                             cz::linear_map(sys.gamma_at(k), sys.w_range));
}

cz::ConstrainedZonotope update(const cz::ConstrainedZonotope& prior,
                               const Eigen::VectorXd& y,
                               const model::LinearSystem& sys, int k) {
    if (y.size() != sys.meas_dim())
        throw std::invalid_argument("update: measurement dimension mismatch");
    const cz::ConstrainedZonotope& v = sys.v_range;
    // measurement-consistent set {y} + Psi.(-v_range) for Xi x
    cz::ConstrainedZonotope consistent(-sys.psi_at(k) * v.generators(),
                                       y - sys.psi_at(k) * v.center(),
                                       v.constraint_matrix(), v.constraint_rhs(),
                                       v.half_widths());
    return cz::generalized_intersection(prior, sys.xi_at(k), consistent);
}

std::vector<FilterState> run_filter(const model::LinearSystem& sys,
                                    const model::Trajectory& traj,
                                    const FilterOptions& opt) {
    sys.validate();
    const int T = traj.horizon();
    if (T < 0) throw std::invalid_argument("run_filter: empty trajectory");

    std::vector<FilterState> out;
    out.reserve(T + 1);
    cz::ConstrainedZonotope prior = sys.x0_range;
    for (int k = 0; k <= T; ++k) {
        FilterState st;
        st.k = k;
        st.prior = prior;
        st.posterior = update(prior, traj.measurements[k], sys, k);
        if (opt.compress)
            st.posterior = cz::compress_polygon(st.posterior, opt.compress_opt);
        if (k < T) prior = predict(st.posterior, sys, k);
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace zonosmooth::filter
