#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "radiomap/random.hpp"
#include "radiomap/surveying.hpp"

using namespace radiomap;

namespace {

struct Scene {
  Grid grid;
  CovarianceModel model;
  Environment env;

  explicit Scene(std::uint64_t seed)
      : grid(Region(Location(0.0, 0.0), Location(20.0, 20.0)), 8, 8) {
    Transmitter tx;
    tx.location = Location(4.0, 6.0);
    tx.power_db = 10.0;
    env.transmitters.push_back(tx);
    env.shadowing = {6.0, 5.0, 0.0};
    env.seed = seed;
    model = build_covariance(env.shadowing, env.fading,
                             path_loss_mean(tx.location, tx.power_db, env.path_loss_exponent,
                                            grid.cell_diagonal(), env.shadowing, env.fading));
  }

  GridMap truth() const { return true_power_map(env, grid).to_db(); }
};

}  // namespace

TEST_SUITE("surveying") {

TEST_CASE("uncertainty map") {
  const Scene scene(5);
  const GridMap truth = scene.truth();

  SUBCASE("no measurements: constant prior variance") {
    const KrigingEstimate empty(scene.model, MeasurementSet({}, 0.0, Unit::kDb), false);
    const GridMap unc = uncertainty_map(empty, scene.grid);
    CHECK(unc.values().minCoeff() == doctest::Approx(scene.model.prior_variance()));
    CHECK(unc.values().maxCoeff() == doctest::Approx(scene.model.prior_variance()));
  }

  SUBCASE("a noiseless measurement zeroes its cell and never exceeds the prior") {
    const std::size_t g = 27;
    const MeasurementSet one =
        draw_measurements(truth, {scene.grid.point(g)}, 0.0, 3);
    const KrigingEstimate est = fit_kriging(scene.model, one);
    const GridMap unc = uncertainty_map(est, scene.grid);
    CHECK(unc.at(g) <= 1e-8);
    CHECK(unc.values().maxCoeff() <= scene.model.prior_variance() + 1e-12);
  }
}

TEST_CASE("greedy planning") {
  const Scene scene(6);
  const GridMap truth = scene.truth();
  const MeasurementSet one = draw_measurements(truth, {scene.grid.point(0)}, 0.0, 1);
  const KrigingEstimate est = fit_kriging(scene.model, one);

  SUBCASE("zero travel weight picks the global variance argmax") {
    const std::size_t choice = plan_next(est, scene.grid, scene.grid.point(0), 0.0);
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t g = 0; g < scene.grid.size(); ++g) {
      const double v = est.posterior_variance(scene.grid.point(g));
      if (v > best) {
        best = v;
        best_idx = g;
      }
    }
    CHECK(choice == best_idx);
  }

  SUBCASE("with equal variance the travel term prefers proximity") {
    const KrigingEstimate empty(scene.model, MeasurementSet({}, 0.0, Unit::kDb), false);
    const Location current = scene.grid.point(35);
    const std::size_t choice = plan_next(empty, scene.grid, current, 0.5);
    CHECK(choice == 35);
  }

  SUBCASE("a just-measured point is never chosen again under zero noise") {
    const std::size_t measured = nearest_grid_point(scene.grid, one[0].location);
    const std::size_t next = plan_next(est, scene.grid, one[0].location, 0.0);
    CHECK(next != measured);
  }
}

TEST_CASE("survey loop") {
  const Scene scene(7);
  const GridMap truth = scene.truth();

  SUBCASE("posterior variance decreases monotonically per step") {
    const SurveyResult result =
        run_survey(truth, scene.model, 0.0, scene.grid.point(0), 12, 0.1, 11);
    REQUIRE(result.steps.size() == 12);
    for (std::size_t i = 1; i < result.steps.size(); ++i) {
      CHECK(result.steps[i].total_variance < result.steps[i - 1].total_variance);
    }
  }

  SUBCASE("full budget ends at the minimum error of the run") {
    const SurveyResult result =
        run_survey(truth, scene.model, 0.0, scene.grid.point(0),
                   static_cast<int>(scene.grid.size()), 0.05, 13);
    const double final_mse = result.steps.back().mse;
    for (const SurveyStep& s : result.steps) {
      CHECK(final_mse <= s.mse + 1e-9);
    }
  }

  SUBCASE("reproducible bit for bit") {
    const SurveyResult a = run_survey(truth, scene.model, 0.01, scene.grid.point(0), 8, 0.1, 17);
    const SurveyResult b = run_survey(truth, scene.model, 0.01, scene.grid.point(0), 8, 0.1, 17);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].grid_index == b.steps[i].grid_index);
      CHECK(a.steps[i].mse == b.steps[i].mse);
    }
  }

  SUBCASE("trajectory csv") {
    const SurveyResult result =
        run_survey(truth, scene.model, 0.0, scene.grid.point(0), 3, 0.1, 19);
    save_trajectory(result, "survey_test_trajectory.csv");
    std::ifstream is("survey_test_trajectory.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "step,x,y,z,mse,total_variance");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);
  }
}

TEST_CASE("uncertainty-driven surveying beats the grid sweep at a quarter budget") {
  double survey_total = 0.0, sweep_total = 0.0;
  const int budget = 16;  // 25% of the 64-cell grid
  for (int seed = 0; seed < 20; ++seed) {
    const Scene scene(1000 + static_cast<std::uint64_t>(seed));
    const GridMap truth = scene.truth();
    const SurveyResult survey =
        run_survey(truth, scene.model, 0.25, scene.grid.point(0), budget, 0.05,
                   2000 + static_cast<std::uint64_t>(seed));
    const SurveyResult sweep =
        run_grid_sweep(truth, scene.model, 0.25, budget, 2000 + static_cast<std::uint64_t>(seed));
    survey_total += survey.steps.back().mse;
    sweep_total += sweep.steps.back().mse;
  }
  CHECK(survey_total / 20.0 < sweep_total / 20.0);
}

}  // TEST_SUITE
