#include <doctest.h>

#include "cz_random.hpp"
#include "zonosmooth/filter.hpp"
#include "zonosmooth/model.hpp"
#include "zonosmooth/rng.hpp"
#include "zonosmooth/smoother.hpp"

using namespace zonosmooth;
using cz::ConstrainedZonotope;
using testsupport::find_feasible_xi;
using testsupport::random_cz;
using testsupport::sample_member;

namespace {

// The closed-form quintuple the backward step must assemble, written out
// independently of the composition order used by the implementation.
ConstrainedZonotope expected_step_blocks(const ConstrainedZonotope& post,
                                         const ConstrainedZonotope& next,
                                         const ConstrainedZonotope& w,
                                         const Eigen::MatrixXd& Phi,
                                         const Eigen::MatrixXd& Gamma) {
    const int n = post.dim();
    const int gp = post.num_generators(), gn = next.num_generators(),
              gw = w.num_generators();
    const int cp = post.num_constraints(), cn = next.num_constraints(),
              cw = w.num_constraints();

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, gp + gn + gw);
    G.leftCols(gp) = post.generators();

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cp + cn + cw + n, gp + gn + gw);
    A.topLeftCorner(cp, gp) = post.constraint_matrix();
    A.block(cp, gp, cn, gn) = next.constraint_matrix();
    A.block(cp + cn, gp + gn, cw, gw) = w.constraint_matrix();
    A.block(cp + cn + cw, 0, n, gp) = Phi * post.generators();
    A.block(cp + cn + cw, gp, n, gn) = -next.generators();
    A.block(cp + cn + cw, gp + gn, n, gw) = Gamma * w.generators();

    Eigen::VectorXd b(cp + cn + cw + n);
    b << post.constraint_rhs(), next.constraint_rhs(), w.constraint_rhs(),
        next.center() - Gamma * w.center() - Phi * post.center();

    Eigen::VectorXd h(gp + gn + gw);
    h << post.half_widths(), next.half_widths(), w.half_widths();

    return ConstrainedZonotope(G, post.center(), A, b, h);
}

}  // namespace

TEST_CASE("smooth_step with an uninformative future returns the posterior") {
    auto sys = model::default_linear_system();
    rng::Stream rng(31, 1);
    auto post = random_cz(rng, 2, 4, 1);
    auto next = filter::predict(post, sys, 0);  // exactly the reachable tube
    auto sm = smoother::smooth_step(post, next, sys, 0);

    auto hp = cz::interval_hull(post);
    auto hs = cz::interval_hull(sm);
    CHECK((hp.lower - hs.lower).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((hp.upper - hs.upper).lpNorm<Eigen::Infinity>() <= 1e-9);

    const Eigen::VectorXd ap = find_feasible_xi(post);
    const Eigen::VectorXd as = find_feasible_xi(sm);
    for (int s = 0; s < 50; ++s) {
        CHECK(cz::contains_point(sm, sample_member(post, rng, ap), 1e-6));
        CHECK(cz::contains_point(post, sample_member(sm, rng, as), 1e-6));
    }
}

TEST_CASE("smooth_step emits the closed-form blocks exactly") {
    rng::Stream rng(32, 1);
    for (int rep = 0; rep < 10; ++rep) {
        model::LinearSystem sys = model::default_linear_system();
        // randomized system matrices and an asymmetric, constrained noise range
        Eigen::MatrixXd Phi(2, 2), Gamma(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Phi(i, j) = rng.uniform(-1.5, 1.5);
                Gamma(i, j) = rng.uniform(-1.0, 1.0);
            }
        sys.phi = {Phi};
        sys.gamma = {Gamma};
        sys.w_range = random_cz(rng, 2, 3, 1);

        auto post = random_cz(rng, 2, 4, 2);
        auto next = random_cz(rng, 2, 5, 1);
        auto got = smoother::smooth_step(post, next, sys, 0);
        auto want = expected_step_blocks(post, next, sys.w_range, Phi, Gamma);

        CHECK(got.generators() == want.generators());
        CHECK(got.center() == want.center());
        CHECK(got.constraint_matrix() == want.constraint_matrix());
        CHECK(got.constraint_rhs() == want.constraint_rhs());
        CHECK(got.half_widths() == want.half_widths());

        CHECK(got.num_generators() ==
              post.num_generators() + next.num_generators() + sys.w_range.num_generators());
        CHECK(got.num_constraints() == post.num_constraints() + next.num_constraints() +
                                           sys.w_range.num_constraints() + 2);
    }
}

TEST_CASE("horizon zero smoothing returns the lone posterior") {
    auto sys = model::default_linear_system();
    auto traj = model::simulate_linear(sys, 0, 77);
    auto fs = filter::run_filter(sys, traj);
    auto out = smoother::run_smoother(fs, sys);
    REQUIRE(out.smoothed.size() == 1);
    auto h0 = cz::interval_hull(out.smoothed[0]);
    auto hp = cz::interval_hull(fs[0].posterior);
    CHECK((h0.lower - hp.lower).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((h0.upper - hp.upper).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("smoothing never hurts and always contains the truth (compressed run)") {
    auto sys = model::default_linear_system();
    smoother::SmootherOptions sopt;
    sopt.compress = true;
    filter::FilterOptions fopt;
    fopt.compress = true;
    for (int trial = 0; trial < 3; ++trial) {
        auto traj = model::simulate_linear(sys, 50, 2211, trial);
        auto fs = filter::run_filter(sys, traj, fopt);
        auto out = smoother::run_smoother(fs, sys, sopt);
        for (int k = 0; k <= 50; ++k) {
            CHECK(cz::diameter_inf(out.smoothed[k]) <=
                  cz::diameter_inf(fs[k].posterior) + 1e-7);
            CHECK(cz::contains_point(out.smoothed[k], traj.states[k]));
        }
    }
}

TEST_CASE("compressed smoothing matches the literal recursion") {
    auto sys = model::default_linear_system();
    auto traj = model::simulate_linear(sys, 8, 91, 0);
    auto fs_exact = filter::run_filter(sys, traj);
    auto exact = smoother::run_smoother(fs_exact, sys);

    filter::FilterOptions fopt;
    fopt.compress = true;
    smoother::SmootherOptions sopt;
    sopt.compress = true;
    auto fs_comp = filter::run_filter(sys, traj, fopt);
    auto comp = smoother::run_smoother(fs_comp, sys, sopt);

    rng::Stream rng(33, 1);
    for (int k = 0; k <= 8; ++k) {
        auto he = cz::interval_hull(exact.smoothed[k]);
        auto hc = cz::interval_hull(comp.smoothed[k]);
        CHECK((he.lower - hc.lower).lpNorm<Eigen::Infinity>() <= 1e-7);
        CHECK((he.upper - hc.upper).lpNorm<Eigen::Infinity>() <= 1e-7);
    }
    const auto& ex = exact.smoothed[0];
    const auto& cp = comp.smoothed[0];
    const Eigen::VectorXd ae = find_feasible_xi(ex);
    const Eigen::VectorXd ac = find_feasible_xi(cp);
    for (int s = 0; s < 50; ++s) {
        CHECK(cz::contains_point(cp, sample_member(ex, rng, ae), 1e-6));
        CHECK(cz::contains_point(ex, sample_member(cp, rng, ac), 1e-6));
    }
}

TEST_CASE("smoothed ranges nest inside posteriors (sampled, uncompressed)") {
    auto sys = model::default_linear_system();
    auto traj = model::simulate_linear(sys, 6, 404, 2);
    auto fs = filter::run_filter(sys, traj);
    auto out = smoother::run_smoother(fs, sys);
    rng::Stream rng(34, 1);
    for (int k = 0; k <= 6; ++k) {
        const Eigen::VectorXd a = find_feasible_xi(out.smoothed[k]);
        for (int s = 0; s < 25; ++s)
            CHECK(cz::contains_point(fs[k].posterior,
                                     sample_member(out.smoothed[k], rng, a), 1e-6));
    }
}

TEST_CASE("asymmetric process noise keeps guaranteed containment") {
    // one-dimensional chain with w in [0.2, 0.5]; a sign slip in the noise
    // blocks would push the backward tube the wrong way and lose the truth
    model::LinearSystem sys;
    sys.phi = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    sys.gamma = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    sys.xi = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    sys.psi = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    auto box1 = [](double lo, double hi) {
        return ConstrainedZonotope::from_box({Eigen::VectorXd::Constant(1, lo),
                                              Eigen::VectorXd::Constant(1, hi)});
    };
    sys.w_range = box1(0.2, 0.5);
    sys.v_range = box1(-0.3, 0.3);
    sys.x0_range = box1(-1.0, 1.0);

    for (int trial = 0; trial < 8; ++trial) {
        auto traj = model::simulate_linear(sys, 12, 555, trial);
        auto fs = filter::run_filter(sys, traj);
        auto out = smoother::run_smoother(fs, sys);
        for (int k = 0; k <= 12; ++k) {
            CHECK(cz::contains_point(out.smoothed[k], traj.states[k]));
            CHECK(cz::diameter_inf(out.smoothed[k]) <=
                  cz::diameter_inf(fs[k].posterior) + 1e-7);
        }
    }
}
