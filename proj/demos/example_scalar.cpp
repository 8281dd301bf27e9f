// Worked end-to-end run of the scalar cube-root benchmark: interval
// filtering and smoothing with the never-worse width check and CSV outputs.
//
// usage: example_scalar [config.json] [output_dir]

#include <cstdio>
#include <filesystem>

#include "zonosmooth/experiment.hpp"

using namespace zonosmooth;

int main(int argc, char** argv) {
    try {
        experiment::ScalarConfig cfg;
        cfg.trials = 50;
        if (argc > 1)
            cfg = experiment::scalar_config_from_json(experiment::load_config_file(argv[1]));
        if (argc > 2) cfg.out_dir = argv[2];

        auto res = experiment::run_scalar_experiment(cfg);

        int contained = 0, total = 0;
        for (const auto& rec : res.trials)
            for (int k = 0; k <= cfg.horizon; ++k) {
                ++total;
                contained += rec.filtered_contains[k] && rec.smoothed_contains[k];
                if (rec.smoothed_width[k] > rec.filtered_width[k] + 1e-12) {
                    std::fprintf(stderr, "smoothing widened an interval at k=%d\n", k);
                    return 1;
                }
            }
        if (contained != total) {
            std::fprintf(stderr, "containment violated: %d of %d\n", contained, total);
            return 1;
        }

        namespace fs = std::filesystem;
        experiment::write_diameters_csv(res, (fs::path(cfg.out_dir) / "diameters.csv").string());
        experiment::write_hulls_csv(res, cfg.hull_window,
                                    (fs::path(cfg.out_dir) / "hulls_trial0.csv").string());

        std::printf("scalar example: %d trials, T=%d, containment %d/%d\n", cfg.trials,
                    cfg.horizon, contained, total);
        std::printf("wrote %s/{diameters,hulls_trial0}.csv\n", cfg.out_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
