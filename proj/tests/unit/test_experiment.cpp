#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cz_random.hpp"
#include "zonosmooth/experiment.hpp"
#include "zonosmooth/rng.hpp"

using namespace zonosmooth;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("default config encodes the benchmark system") {
    experiment::LinearConfig cfg;
    const auto& sys = cfg.sys;
    CHECK(sys.phi_at(0)(0, 0) == doctest::Approx(std::sin(1.0)));
    CHECK(sys.phi_at(0)(0, 1) == doctest::Approx(std::cos(1.0)));
    CHECK(sys.phi_at(0)(1, 0) == doctest::Approx(-std::cos(1.0)));
    CHECK(sys.gamma_at(0)(0, 0) == doctest::Approx(0.5));
    CHECK(sys.gamma_at(0)(1, 0) == doctest::Approx(1.0));
    CHECK(sys.xi_at(0)(0, 0) == doctest::Approx(0.5));
    CHECK(sys.xi_at(0)(1, 1) == doctest::Approx(0.3));
    CHECK(sys.psi_at(0).isIdentity(1e-15));
    auto wh = cz::interval_hull(sys.w_range);
    CHECK(wh.lower(0) == doctest::Approx(-1.0));
    CHECK(wh.upper(0) == doctest::Approx(1.0));
    auto vh = cz::interval_hull(sys.v_range);
    CHECK(vh.lower(1) == doctest::Approx(-1.0));
    CHECK(vh.upper(0) == doctest::Approx(1.0));
}

TEST_CASE("single trial, horizon zero: smoothed equals filtered") {
    experiment::LinearConfig cfg;
    cfg.trials = 1;
    cfg.horizon = 0;
    auto res = experiment::run_linear_experiment(cfg);
    REQUIRE(res.trials.size() == 1);
    REQUIRE(res.trials[0].filtered_diam.size() == 1);
    CHECK(res.trials[0].smoothed_diam[0] ==
          doctest::Approx(res.trials[0].filtered_diam[0]).epsilon(1e-9));
    CHECK(res.trials[0].filtered_contains[0]);
    CHECK(res.trials[0].smoothed_contains[0]);
}

TEST_CASE("small Monte-Carlo run shows the smoothing gain") {
    experiment::LinearConfig cfg;
    cfg.trials = 20;
    cfg.horizon = 15;
    cfg.seed = 99;
    auto res = experiment::run_linear_experiment(cfg);

    int strictly_better = 0;
    for (int k = 0; k < 15; ++k) {
        CHECK(res.avg_smoothed_diam[k] <= res.avg_filtered_diam[k] + 1e-7);
        if (res.avg_smoothed_diam[k] < res.avg_filtered_diam[k] - 1e-9) ++strictly_better;
    }
    CHECK(strictly_better >= 10);
    // final step gains nothing
    CHECK(res.avg_smoothed_diam[15] == doctest::Approx(res.avg_filtered_diam[15]).epsilon(1e-9));

    for (const auto& rec : res.trials)
        for (int k = 0; k <= 15; ++k) {
            CHECK(rec.filtered_contains[k]);
            CHECK(rec.smoothed_contains[k]);
        }
}

TEST_CASE("aggregates equal the mean of per-trial records") {
    experiment::LinearConfig cfg;
    cfg.trials = 7;
    cfg.horizon = 6;
    auto res = experiment::run_linear_experiment(cfg);
    for (int k = 0; k <= 6; ++k) {
        double acc = 0.0;
        for (const auto& rec : res.trials) acc += rec.smoothed_diam[k];
        CHECK(res.avg_smoothed_diam[k] == doctest::Approx(acc / 7.0).epsilon(1e-12));
        acc = 0.0;
        for (const auto& rec : res.trials) acc += rec.sms_sq_error[k];
        CHECK(res.mse_sms[k] == doctest::Approx(acc / 7.0).epsilon(1e-12));
    }
}

TEST_CASE("point estimate is the hull center") {
    auto box = cz::ConstrainedZonotope::from_box(
        {Eigen::Vector2d(-2.0, 1.0), Eigen::Vector2d(4.0, 3.0)});
    auto est = experiment::point_estimate(box);
    CHECK(est(0) == doctest::Approx(1.0));
    CHECK(est(1) == doctest::Approx(2.0));

    auto pt = cz::ConstrainedZonotope::singleton(Eigen::Vector2d(0.3, -0.7));
    CHECK(experiment::point_estimate(pt)(0) == doctest::Approx(0.3));

    rng::Stream rng(61, 1);
    auto Z = testsupport::random_cz(rng, 2, 5, 2);
    auto est2 = experiment::point_estimate(Z);
    for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d d = Eigen::Vector2d::Zero();
        d(i) = 1.0;
        const double hi = cz::support_value(Z, d);
        const double lo = -cz::support_value(Z, -d);
        CHECK(est2(i) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
    }
}

TEST_CASE("mse_series basics and independent recomputation") {
    using VecSeries = std::vector<std::vector<Eigen::VectorXd>>;
    VecSeries est(2), truth(2);
    for (int t = 0; t < 2; ++t)
        for (int k = 0; k < 3; ++k) {
            est[t].push_back(Eigen::VectorXd::Constant(1, 1.0 * k));
            truth[t].push_back(Eigen::VectorXd::Constant(1, 1.0 * k));
        }
    auto zero = experiment::mse_series(est, truth);
    for (double v : zero.per_k) CHECK(v == doctest::Approx(0.0));

    // constant offset d in one dimension gives d^2
    for (int t = 0; t < 2; ++t)
        for (int k = 0; k < 3; ++k) est[t][k](0) += 0.5;
    auto off = experiment::mse_series(est, truth);
    for (double v : off.per_k) CHECK(v == doctest::Approx(0.25));
    CHECK(off.aggregate == doctest::Approx(0.25));

    rng::Stream rng(62, 1);
    VecSeries re(3), rt(3);
    for (int t = 0; t < 3; ++t)
        for (int k = 0; k < 4; ++k) {
            re[t].push_back(Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)));
            rt[t].push_back(Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        }
    auto got = experiment::mse_series(re, rt);
    for (int k = 0; k < 4; ++k) {
        double acc = 0.0;
        for (int t = 0; t < 3; ++t) acc += (re[t][k] - rt[t][k]).squaredNorm();
        CHECK(got.per_k[k] == doctest::Approx(acc / 3.0).epsilon(1e-12));
    }

    VecSeries bad(1);
    bad[0].push_back(Eigen::Vector2d(0, 0));
    CHECK_THROWS_AS(experiment::mse_series(bad, rt), std::invalid_argument);
}

TEST_CASE("scalar experiment carries the guarantees") {
    experiment::ScalarConfig cfg;
    cfg.trials = 30;
    cfg.horizon = 20;
    cfg.seed = 4;
    auto res = experiment::run_scalar_experiment(cfg);
    for (const auto& rec : res.trials)
        for (int k = 0; k <= 20; ++k) {
            CHECK(rec.filtered_contains[k]);
            CHECK(rec.smoothed_contains[k]);
            CHECK(rec.smoothed_width[k] <= rec.filtered_width[k] + 1e-12);
        }
    for (int k = 0; k <= 20; ++k)
        CHECK(res.avg_smoothed_width[k] <= res.avg_filtered_width[k] + 1e-12);
}

TEST_CASE("csv outputs are byte-identical across reruns") {
    namespace fs = std::filesystem;
    experiment::LinearConfig cfg;
    cfg.trials = 4;
    cfg.horizon = 5;
    const auto dir = fs::temp_directory_path() / "zonosmooth_csv_test";
    fs::remove_all(dir);

    rts::RtsConfig rcfg;
    rcfg.q = 0.05;
    rcfg.r = 0.04;
    auto res1 = experiment::run_linear_experiment(cfg, &rcfg);
    experiment::write_diameters_csv(res1, (dir / "a" / "diameters.csv").string());
    experiment::write_mse_csv(res1, (dir / "a" / "mse.csv").string());
    experiment::write_hulls_csv(res1, cfg.hull_window, (dir / "a" / "hulls_trial0.csv").string());

    auto res2 = experiment::run_linear_experiment(cfg, &rcfg);
    experiment::write_diameters_csv(res2, (dir / "b" / "diameters.csv").string());
    experiment::write_mse_csv(res2, (dir / "b" / "mse.csv").string());
    experiment::write_hulls_csv(res2, cfg.hull_window, (dir / "b" / "hulls_trial0.csv").string());

    for (const char* name : {"diameters.csv", "mse.csv", "hulls_trial0.csv"}) {
        const std::string a = slurp((dir / "a" / name).string());
        const std::string b = slurp((dir / "b" / name).string());
        CHECK(a == b);
        CHECK(a.rfind("# zonosmooth-csv v1\n", 0) == 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("rts grid csv lists every parameter pair") {
    namespace fs = std::filesystem;
    auto sys = model::default_linear_system();
    auto tuned = rts::tune_grid(sys, 10, 4, {0.02, 0.08}, {0.03, 0.09}, 2);
    const auto path = fs::temp_directory_path() / "zonosmooth_rts_grid.csv";
    experiment::write_rts_grid_csv(tuned, path.string());
    std::ifstream in(path.string());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# zonosmooth-csv v1");
    std::getline(in, line);
    CHECK(line == "q,r,mse");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);
    fs::remove(path);
}

TEST_CASE("config parsing: round-trip, overrides, and diagnostics") {
    experiment::LinearConfig cfg;
    cfg.trials = 17;
    cfg.seed = 5;
    auto j = experiment::to_json(cfg);
    auto back = experiment::linear_config_from_json(j);
    CHECK(back.trials == 17);
    CHECK(back.seed == 5);
    CHECK(back.sys.phi_at(0).isApprox(cfg.sys.phi_at(0)));

    nlohmann::json bad = j;
    bad["trials"] = 0;
    CHECK_THROWS_AS(experiment::linear_config_from_json(bad), std::invalid_argument);

    nlohmann::json badfield = j;
    badfield["system"]["Phi"] = 3.0;  // not a matrix
    CHECK_THROWS_WITH_AS(experiment::linear_config_from_json(badfield),
                         doctest::Contains("Phi"), std::invalid_argument);

    // scalar config round-trip
    experiment::ScalarConfig scfg;
    auto sj = experiment::to_json(scfg);
    auto sback = experiment::scalar_config_from_json(sj);
    CHECK(sback.sys.meas_gain == doctest::Approx(2.0));
    CHECK(sback.sys.v_range.a == doctest::Approx(1.0));
    CHECK(sback.sys.eta(8.0) == doctest::Approx(10.0));

    nlohmann::json sbad = sj;
    sbad["system"]["eta"] = "unknown_map";
    CHECK_THROWS_WITH_AS(experiment::scalar_config_from_json(sbad),
                         doctest::Contains("eta"), std::invalid_argument);
}
