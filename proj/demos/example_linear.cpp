// Worked end-to-end run of the planar benchmark: Monte-Carlo filtering and
// smoothing, the never-worse check on the averaged diameters, and the CSV
// outputs for plotting hulls and diameters. Doubles as a smoke test.
//
// usage: example_linear [config.json] [output_dir]

#include <cstdio>
#include <filesystem>

#include "zonosmooth/experiment.hpp"

using namespace zonosmooth;

int main(int argc, char** argv) {
    try {
        experiment::LinearConfig cfg;
        cfg.trials = 50;
        if (argc > 1)
            cfg = experiment::linear_config_from_json(experiment::load_config_file(argv[1]));
        if (argc > 2) cfg.out_dir = argv[2];

        auto res = experiment::run_linear_experiment(cfg);

        int contained = 0, total = 0, better = 0;
        for (const auto& rec : res.trials)
            for (int k = 0; k <= cfg.horizon; ++k) {
                ++total;
                contained += rec.filtered_contains[k] && rec.smoothed_contains[k];
                if (rec.smoothed_diam[k] > rec.filtered_diam[k] + 1e-7) {
                    std::fprintf(stderr, "smoothing widened a range at k=%d\n", k);
                    return 1;
                }
            }
        for (int k = 0; k < cfg.horizon; ++k)
            if (res.avg_smoothed_diam[k] < res.avg_filtered_diam[k] - 1e-9) ++better;

        if (contained != total) {
            std::fprintf(stderr, "containment violated: %d of %d\n", contained, total);
            return 1;
        }
        if (cfg.horizon > 0 && better < (9 * cfg.horizon) / 10) {
            std::fprintf(stderr, "smoothing gain too rare: %d of %d steps\n", better,
                         cfg.horizon);
            return 1;
        }

        namespace fs = std::filesystem;
        experiment::write_diameters_csv(res, (fs::path(cfg.out_dir) / "diameters.csv").string());
        experiment::write_hulls_csv(res, cfg.hull_window,
                                    (fs::path(cfg.out_dir) / "hulls_trial0.csv").string());

        std::printf("linear example: %d trials, T=%d, containment %d/%d, "
                    "smoothing strictly better at %d/%d steps\n",
                    cfg.trials, cfg.horizon, contained, total, better, cfg.horizon);
        std::printf("wrote %s/{diameters,hulls_trial0}.csv\n", cfg.out_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
