#include <doctest.h>

#include <cmath>

#include "cz_random.hpp"
#include "lp_vertex_oracle.hpp"
#include "zonosmooth/czono.hpp"
#include "zonosmooth/model.hpp"
#include "zonosmooth/rng.hpp"
#include "zonosmooth/serialization.hpp"

using namespace zonosmooth;
using cz::ConstrainedZonotope;
using testsupport::find_feasible_xi;
using testsupport::random_cz;
using testsupport::sample_member;
using testsupport::sample_xi;

namespace {

ConstrainedZonotope unit_box(int n) {
    return ConstrainedZonotope::from_box({Eigen::VectorXd::Constant(n, -1.0),
                                          Eigen::VectorXd::Constant(n, 1.0)});
}

Eigen::Vector2d v2(double a, double b) { return {a, b}; }

}  // namespace

TEST_CASE("linear_map identity keeps the quintuple") {
    rng::Stream rng(1, 1);
    auto Z = random_cz(rng, 2, 4, 2);
    auto M = cz::linear_map(Eigen::MatrixXd::Identity(2, 2), Z);
    CHECK(M.generators().isApprox(Z.generators()));
    CHECK(M.center().isApprox(Z.center()));
    CHECK(M.constraint_matrix().isApprox(Z.constraint_matrix()));
    CHECK(M.half_widths().isApprox(Z.half_widths()));
}

TEST_CASE("linear_map of the unit box by the benchmark rotation") {
    auto sys = model::default_linear_system();
    auto M = cz::linear_map(sys.phi_at(0), unit_box(2));
    CHECK(M.generators().isApprox(sys.phi_at(0)));
    CHECK(M.center().norm() == doctest::Approx(0.0));
}

TEST_CASE("linear_map: sampled images are members, and nothing extra appears") {
    rng::Stream rng(2, 1);
    for (int rep = 0; rep < 6; ++rep) {
        auto Z = random_cz(rng, 2, 5, 2);
        Eigen::MatrixXd F(2, 2);
        F << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
        auto M = cz::linear_map(F, Z);
        const Eigen::VectorXd anchor = find_feasible_xi(Z);
        for (int s = 0; s < 60; ++s) {
            const Eigen::VectorXd z = sample_member(Z, rng, anchor);
            CHECK(cz::contains_point(M, F * z));
        }
        // equality direction through the inverse map when it exists
        Eigen::FullPivLU<Eigen::MatrixXd> lu(F);
        if (lu.isInvertible()) {
            const Eigen::VectorXd am = find_feasible_xi(M);
            for (int s = 0; s < 30; ++s) {
                const Eigen::VectorXd m = sample_member(M, rng, am);
                CHECK(cz::contains_point(Z, lu.solve(m), 1e-6));
            }
        }
    }
}

TEST_CASE("interval hull of the rotated box matches the row-sum widths") {
    auto sys = model::default_linear_system();
    auto rotated = cz::linear_map(sys.phi_at(0), unit_box(2));
    auto h = cz::interval_hull(rotated);
    const double width = std::abs(std::sin(1.0)) + std::abs(std::cos(1.0));
    CHECK(h.upper(0) == doctest::Approx(width));
    CHECK(h.lower(0) == doctest::Approx(-width));
    CHECK(h.upper(1) == doctest::Approx(width));
}

TEST_CASE("minkowski_sum with a point translates the set") {
    rng::Stream rng(3, 1);
    auto Z = random_cz(rng, 2, 4, 1);
    auto P = ConstrainedZonotope::singleton(Eigen::VectorXd::Zero(2));
    auto S = cz::minkowski_sum(Z, P);
    auto hz = cz::interval_hull(Z);
    auto hs = cz::interval_hull(S);
    CHECK((hz.lower - hs.lower).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((hz.upper - hs.upper).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("minkowski_sum of axis boxes") {
    auto A = unit_box(2);
    auto B = ConstrainedZonotope::from_box({Eigen::VectorXd::Constant(2, -0.5),
                                            Eigen::VectorXd::Constant(2, 0.5)});
    auto S = cz::minkowski_sum(A, B);
    auto h = cz::interval_hull(S);
    CHECK(h.lower(0) == doctest::Approx(-1.5));
    CHECK(h.upper(1) == doctest::Approx(1.5));
}

TEST_CASE("minkowski_sum: sampled sums are members") {
    rng::Stream rng(4, 1);
    auto Z = random_cz(rng, 2, 4, 2);
    auto W = random_cz(rng, 2, 3, 1);
    auto S = cz::minkowski_sum(Z, W);
    const Eigen::VectorXd az = find_feasible_xi(Z), aw = find_feasible_xi(W);
    for (int s = 0; s < 120; ++s) {
        const Eigen::VectorXd z = sample_member(Z, rng, az);
        const Eigen::VectorXd w = sample_member(W, rng, aw);
        CHECK(cz::contains_point(S, z + w));
    }
}

TEST_CASE("generalized_intersection with a covering target is identity") {
    rng::Stream rng(5, 1);
    auto Z = random_cz(rng, 2, 4, 1);
    auto hull = cz::interval_hull(Z);
    auto big = ConstrainedZonotope::from_box(hull.inflated(2.0));
    auto I = cz::generalized_intersection(Z, Eigen::MatrixXd::Identity(2, 2), big);
    auto hi = cz::interval_hull(I);
    CHECK((hi.lower - hull.lower).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((hi.upper - hull.upper).lpNorm<Eigen::Infinity>() <= 1e-9);
    // two-way sampled membership
    const Eigen::VectorXd az = find_feasible_xi(Z), ai = find_feasible_xi(I);
    for (int s = 0; s < 60; ++s) {
        CHECK(cz::contains_point(I, sample_member(Z, rng, az)));
        CHECK(cz::contains_point(Z, sample_member(I, rng, ai)));
    }
}

TEST_CASE("generalized_intersection half-box example") {
    auto Z = unit_box(2);
    Eigen::MatrixXd R(1, 2);
    R << 1.0, 0.0;
    auto Y = ConstrainedZonotope::from_box({Eigen::VectorXd::Constant(1, 0.0),
                                            Eigen::VectorXd::Constant(1, 2.0)});
    auto I = cz::generalized_intersection(Z, R, Y);
    auto h = cz::interval_hull(I);
    CHECK(h.lower(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(h.upper(0) == doctest::Approx(1.0));
    CHECK(h.lower(1) == doctest::Approx(-1.0));
    CHECK(h.upper(1) == doctest::Approx(1.0));
}

TEST_CASE("generalized_intersection: membership matches the direct predicate") {
    rng::Stream rng(6, 1);
    for (int rep = 0; rep < 5; ++rep) {
        auto Z = random_cz(rng, 2, 5, 1);
        auto Y = random_cz(rng, 1, 3, 1);
        Eigen::MatrixXd R(1, 2);
        R << rng.uniform(-1, 1), rng.uniform(-1, 1);
        auto I = cz::generalized_intersection(Z, R, Y);
        const Eigen::VectorXd az = find_feasible_xi(Z);
        for (int s = 0; s < 40; ++s) {
            const Eigen::VectorXd z = sample_member(Z, rng, az);
            const bool direct = cz::contains_point(Y, R * z);
            const bool via_set = cz::contains_point(I, z);
            if (direct) CHECK(via_set);   // one-sided up to membership tolerance
            if (via_set) CHECK(cz::contains_point(Y, R * z, 1e-5));
        }
    }
}

TEST_CASE("contains_point basics") {
    auto Z = unit_box(2);
    CHECK(cz::contains_point(Z, Eigen::Vector2d(0, 0)));
    CHECK_FALSE(cz::contains_point(Z, Eigen::Vector2d(2, 0)));

    rng::Stream rng(7, 1);
    auto W = random_cz(rng, 2, 4, 2);  // b = A * witness, so c need not be a member
    // center is a member whenever b = 0
    auto W0 = ConstrainedZonotope(W.generators(), W.center(), W.constraint_matrix(),
                                  Eigen::VectorXd::Zero(W.num_constraints()),
                                  W.half_widths());
    CHECK(cz::contains_point(W0, W0.center()));
}

TEST_CASE("constructive xi samples are always contained") {
    rng::Stream rng(8, 1);
    for (int rep = 0; rep < 4; ++rep) {
        auto Z = random_cz(rng, 3, 6, 2);
        const Eigen::VectorXd anchor = find_feasible_xi(Z);
        for (int s = 0; s < 50; ++s) {
            const Eigen::VectorXd xi = sample_xi(Z, rng, anchor);
            CHECK((Z.constraint_matrix() * xi - Z.constraint_rhs()).lpNorm<Eigen::Infinity>() <=
                  1e-9);
            CHECK(cz::contains_point(Z, Z.generators() * xi + Z.center()));
        }
    }
}

TEST_CASE("is_empty") {
    CHECK_FALSE(cz::is_empty(unit_box(2)));

    Eigen::MatrixXd A(1, 2);
    A << 1.0, 1.0;
    auto Z = ConstrainedZonotope(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(0, 0),
                                 A, Eigen::VectorXd::Constant(1, 3.0),
                                 Eigen::Vector2d(1, 1));
    CHECK(cz::is_empty(Z));

    rng::Stream rng(9, 1);
    for (int rep = 0; rep < 40; ++rep) {
        auto W = random_cz(rng, 2, 4, 2);
        CHECK_FALSE(cz::is_empty(W));  // interior witness by construction
    }
}

TEST_CASE("support_value basics and vertex-enumeration agreement") {
    auto Z = unit_box(2);
    CHECK(cz::support_value(Z, v2(1, 0)) == doctest::Approx(1.0));
    CHECK(cz::support_value(Z, v2(0, 0)) == doctest::Approx(0.0));

    rng::Stream rng(10, 1);
    for (int rep = 0; rep < 25; ++rep) {
        auto W = random_cz(rng, 2, 5, 2);
        Eigen::Vector2d d(rng.uniform(-1, 1), rng.uniform(-1, 1));
        lp::Problem p;
        p.objective = W.generators().transpose() * d;
        p.eq_matrix = W.constraint_matrix();
        p.eq_rhs = W.constraint_rhs();
        p.lower = -W.half_widths();
        p.upper = W.half_widths();
        auto truth = testsupport::enumerate_lp(p);
        REQUIRE(truth.feasible);
        const double expect = truth.max_value + d.dot(W.center());
        CHECK(std::abs(cz::support_value(W, d) - expect) <= 1e-8);
    }
}

TEST_CASE("support reports unbounded directions explicitly") {
    Eigen::VectorXd h(1);
    h << lp::kInf;
    auto Z = ConstrainedZonotope(Eigen::MatrixXd::Identity(1, 1),
                                 Eigen::VectorXd::Zero(1), h);
    CHECK(std::isinf(cz::support_value(Z, Eigen::VectorXd::Ones(1))));
}

TEST_CASE("interval_hull and diameter") {
    auto B = unit_box(2);
    auto h = cz::interval_hull(B);
    CHECK(h.lower(0) == doctest::Approx(-1.0));
    CHECK(h.upper(1) == doctest::Approx(1.0));
    CHECK(cz::diameter_inf(B) == doctest::Approx(2.0));

    // sheared box: x1 = xi1 + xi2 ranges over [-2, 2]
    Eigen::MatrixXd G(2, 2);
    G << 1, 1, 0, 1;
    auto S = ConstrainedZonotope(G, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1));
    CHECK(cz::diameter_inf(S) == doctest::Approx(4.0));

    auto P = ConstrainedZonotope::singleton(v2(3, -2));
    auto hp = cz::interval_hull(P);
    CHECK(hp.lower(0) == doctest::Approx(3.0));
    CHECK(hp.upper(1) == doctest::Approx(-2.0));
    CHECK(cz::diameter_inf(P) == doctest::Approx(0.0));
}

TEST_CASE("diameter equals the widest hull coordinate bit-exactly") {
    rng::Stream rng(12, 1);
    for (int rep = 0; rep < 20; ++rep) {
        auto Z = random_cz(rng, 2, 5, 2);
        auto h = cz::interval_hull(Z);
        CHECK(cz::diameter_inf(Z) == (h.upper - h.lower).maxCoeff());
    }
}

TEST_CASE("hull of a linear image sits inside the interval-arithmetic image") {
    rng::Stream rng(13, 1);
    for (int rep = 0; rep < 15; ++rep) {
        auto Z = random_cz(rng, 2, 5, 2);
        Eigen::MatrixXd F(2, 2);
        F << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
        auto hull = cz::interval_hull(Z);
        auto mapped_hull = cz::interval_hull(cz::linear_map(F, Z));
        // interval arithmetic image of the hull box
        const Eigen::Vector2d mid = F * hull.center();
        const Eigen::Vector2d rad = F.cwiseAbs() * hull.radius();
        CHECK(mapped_hull.lower(0) >= mid(0) - rad(0) - 1e-9);
        CHECK(mapped_hull.upper(0) <= mid(0) + rad(0) + 1e-9);
        CHECK(mapped_hull.lower(1) >= mid(1) - rad(1) - 1e-9);
        CHECK(mapped_hull.upper(1) <= mid(1) + rad(1) + 1e-9);
    }
}

TEST_CASE("dimension mismatches are rejected across operations") {
    auto Z2 = unit_box(2);
    auto Z3 = unit_box(3);
    CHECK_THROWS_AS(cz::linear_map(Eigen::MatrixXd::Identity(3, 3), Z2),
                    std::invalid_argument);
    CHECK_THROWS_AS(cz::minkowski_sum(Z2, Z3), std::invalid_argument);
    CHECK_THROWS_AS(cz::generalized_intersection(Z2, Eigen::MatrixXd::Identity(3, 3), Z3),
                    std::invalid_argument);
    CHECK_THROWS_AS(cz::contains_point(Z2, Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
}

TEST_CASE("serialization round-trip with infinite half-widths") {
    rng::Stream rng(14, 1);
    auto Z = random_cz(rng, 2, 4, 2);
    auto back = serialization::zonotope_from_string(serialization::to_string(Z));
    CHECK(back.generators().isApprox(Z.generators()));
    CHECK(back.constraint_rhs().isApprox(Z.constraint_rhs()));

    Eigen::VectorXd h(2);
    h << 1.0, lp::kInf;
    auto U = ConstrainedZonotope(Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::VectorXd::Zero(2), h);
    auto s = serialization::to_string(U);
    CHECK(s.find("inf") != std::string::npos);
    auto U2 = serialization::zonotope_from_string(s);
    CHECK(std::isinf(U2.half_widths()(1)));
}

TEST_CASE("polygon compression preserves the set") {
    rng::Stream rng(15, 1);
    for (int rep = 0; rep < 8; ++rep) {
        auto Z = random_cz(rng, 2, 6, 3);
        auto C = cz::compress_polygon(Z);
        CHECK(C.num_generators() <= Z.num_generators() + 40);

        auto hz = cz::interval_hull(Z);
        auto hc = cz::interval_hull(C);
        CHECK((hz.lower - hc.lower).lpNorm<Eigen::Infinity>() <= 1e-7);
        CHECK((hz.upper - hc.upper).lpNorm<Eigen::Infinity>() <= 1e-7);

        const Eigen::VectorXd az = find_feasible_xi(Z);
        const Eigen::VectorXd ac = find_feasible_xi(C);
        for (int s = 0; s < 60; ++s) {
            CHECK(cz::contains_point(C, sample_member(Z, rng, az)));
            CHECK(cz::contains_point(Z, sample_member(C, rng, ac), 1e-6));
        }
    }
}

TEST_CASE("polygon compression of degenerate sets") {
    auto P = ConstrainedZonotope::singleton(v2(0.5, -0.25));
    auto C = cz::compress_polygon(P);
    CHECK(cz::diameter_inf(C) <= 1e-8);
    CHECK(cz::contains_point(C, v2(0.5, -0.25)));

    // segment
    Eigen::MatrixXd G(2, 1);
    G << 1.0, 2.0;
    auto S = ConstrainedZonotope(G, Eigen::Vector2d(0, 0), Eigen::VectorXd::Ones(1));
    auto CS = cz::compress_polygon(S);
    CHECK(cz::contains_point(CS, v2(1, 2)));
    CHECK(cz::contains_point(CS, v2(-1, -2)));
    CHECK(cz::diameter_inf(CS) <= 4.0 + 1e-7);
}

TEST_CASE("compression rejects wrong dimensions and unbounded sets") {
    CHECK_THROWS_AS(cz::compress_polygon(unit_box(3)), std::invalid_argument);
    Eigen::VectorXd h(2);
    h << lp::kInf, 1.0;
    auto U = ConstrainedZonotope(Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::VectorXd::Zero(2), h);
    CHECK_THROWS_AS(cz::compress_polygon(U), std::invalid_argument);
}
