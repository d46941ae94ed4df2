// gsml: command-line driver for the metric learning pipeline.
//
// Settings come from built-in defaults, then --config (JSON), then flags.

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsml/errors.hpp"
#include "gsml/parallel.hpp"
#include "gsml/pipeline.hpp"

namespace {

using gsml::PipelineConfig;
using Override = std::function<void(PipelineConfig&)>;

// Registers a flag whose value is applied after the config file is loaded.
template <typename T, typename Apply>
CLI::Option* flag(CLI::App* app, std::vector<Override>& overrides, const std::string& name, const std::string& help,
                  Apply apply) {
  return app->add_option_function<T>(
      name, [&overrides, apply](const T& value) { overrides.push_back([apply, value](PipelineConfig& c) { apply(c, value); }); },
      help);
}

void switch_flag(CLI::App* app, std::vector<Override>& overrides, const std::string& name, const std::string& help,
                 std::function<void(PipelineConfig&)> apply) {
  app->add_flag_callback(name, [&overrides, apply] { overrides.push_back(apply); }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric learning on single-chart surfaces"};
  app.set_version_flag("--version", gsml::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<Override> overrides;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  flag<std::uint64_t>(&app, overrides, "--seed", "global seed", [](PipelineConfig& c, std::uint64_t v) { c.seed = v; });
  flag<std::string>(&app, overrides, "--surface", "euclidean:<d>, hyperboloid:<d>, helicoid or monge:<name>[:<d>]",
                    [](PipelineConfig& c, const std::string& v) { c.surface = v; });
  flag<std::string>(&app, overrides, "--out-dir", "output directory",
                    [](PipelineConfig& c, const std::string& v) { c.out_dir = v; });
  flag<unsigned>(&app, overrides, "--threads", "worker threads (0 = all cores)",
                 [](PipelineConfig& c, unsigned v) { c.threads = v; });
  flag<std::string>(&app, overrides, "--dataset", "built-in graph, .gml, .csv or synthetic:helicoid-two-clusters",
                    [](PipelineConfig& c, const std::string& v) { c.dataset = v; });
  flag<int>(&app, overrides, "--n-intermediate", "geodesic waypoints",
            [](PipelineConfig& c, int v) { c.geodesic.n_intermediate = v; });
  flag<int>(&app, overrides, "--samples", "geodesic candidate samples per waypoint",
            [](PipelineConfig& c, int v) { c.geodesic.n_samples = v; });

  auto add_objective = [&](CLI::App* sub) {
    flag<std::string>(sub, overrides, "--objective", "mmc or lmnn",
                      [](PipelineConfig& c, const std::string& v) { c.objective = gsml::parse_objective(v); });
    flag<double>(sub, overrides, "--lambda", "push weight",
                 [](PipelineConfig& c, double v) { c.optimizer.lambda = v; });
    flag<int>(sub, overrides, "--max-iters", "optimizer iterations",
              [](PipelineConfig& c, int v) { c.optimizer.max_iters = v; });
  };
  auto add_mds = [&](CLI::App* sub) {
    flag<double>(sub, overrides, "--tau", "dissimilarity scale", [](PipelineConfig& c, double v) { c.mds.tau = v; });
    switch_flag(sub, overrides, "--largest-component", "embed only the largest connected component",
                [](PipelineConfig& c) { c.largest_component = true; });
  };

  CLI::App* embed = app.add_subcommand("embed", "embed a graph or dissimilarity matrix by MDS");
  add_mds(embed);
  flag<int>(embed, overrides, "--mds-iters", "MDS iterations per start",
            [](PipelineConfig& c, int v) { c.mds.max_iters = v; });

  CLI::App* learn = app.add_subcommand("learn", "learn a base-space linear transform");
  add_objective(learn);
  add_mds(learn);
  flag<std::size_t>(learn, overrides, "--per-cluster", "points per cluster for the synthetic helicoid data",
                    [](PipelineConfig& c, std::size_t v) { c.synthetic_per_cluster = v; });

  CLI::App* cluster = app.add_subcommand("cluster", "generalized k-means on surface distances");
  add_objective(cluster);
  add_mds(cluster);
  switch_flag(cluster, overrides, "--learn", "learn a transform first", [](PipelineConfig& c) { c.learn = true; });
  flag<std::string>(cluster, overrides, "--transform", "transform CSV to apply",
                    [](PipelineConfig& c, const std::string& v) { c.transform = v; });
  flag<int>(cluster, overrides, "--k", "clusters (0 = number of classes)",
            [](PipelineConfig& c, int v) { c.kmeans.k = v; });
  flag<int>(cluster, overrides, "--restarts", "k-means restarts",
            [](PipelineConfig& c, int v) { c.kmeans.restarts = v; });
  flag<std::size_t>(cluster, overrides, "--per-cluster", "points per cluster for the synthetic helicoid data",
                    [](PipelineConfig& c, std::size_t v) { c.synthetic_per_cluster = v; });

  CLI::App* knn = app.add_subcommand("knn", "kNN error table for Euclidean and hyperbolic embeddings");
  add_objective(knn);
  add_mds(knn);
  flag<int>(knn, overrides, "--k", "neighbors", [](PipelineConfig& c, int v) { c.knn.k = v; });
  flag<int>(knn, overrides, "--splits", "stratified splits", [](PipelineConfig& c, int v) { c.knn.n_splits = v; });
  flag<double>(knn, overrides, "--test-frac", "test fraction per class",
               [](PipelineConfig& c, double v) { c.knn.test_frac = v; });
  flag<int>(knn, overrides, "--dim", "embedding dimension", [](PipelineConfig& c, int v) { c.knn.dim = v; });

  CLI::App* geodesic = app.add_subcommand("geodesic", "approximate a geodesic, or sweep the distance ratio");
  flag<std::vector<double>>(geodesic, overrides, "--x", "start point, base coordinates",
                            [](PipelineConfig& c, const std::vector<double>& v) { c.query.x = v; })
      ->delimiter(',')
      ->allow_extra_args(false);
  flag<std::vector<double>>(geodesic, overrides, "--y", "end point, base coordinates",
                            [](PipelineConfig& c, const std::vector<double>& v) { c.query.y = v; })
      ->delimiter(',')
      ->allow_extra_args(false);
  switch_flag(geodesic, overrides, "--sweep", "ratio against the closed form over n_intermediate",
              [](PipelineConfig& c) { c.query.sweep = true; });
  flag<int>(geodesic, overrides, "--pairs", "random pairs in the sweep",
            [](PipelineConfig& c, int v) { c.query.sweep_pairs = v; });

  CLI::App* gap = app.add_subcommand("gap-curve", "generalization gap against training set size");
  flag<std::vector<std::size_t>>(gap, overrides, "--m", "training sizes",
                                 [](PipelineConfig& c, const std::vector<std::size_t>& v) { c.gap.m_values = v; })
      ->delimiter(',');
  flag<int>(gap, overrides, "--trials", "trials per size", [](PipelineConfig& c, int v) { c.gap.n_trials = v; });
  flag<double>(gap, overrides, "--lambda", "push weight", [](PipelineConfig& c, double v) { c.optimizer.lambda = v; });
  flag<int>(gap, overrides, "--max-iters", "optimizer iterations",
            [](PipelineConfig& c, int v) { c.optimizer.max_iters = v; });

  app.add_subcommand("dataset", "write a built-in graph as GML");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    PipelineConfig config = config_path.empty() ? PipelineConfig{} : gsml::load_pipeline_config(config_path);
    for (const Override& o : overrides) o(config);
    config.validate();
    gsml::set_thread_count(config.threads);

    const std::string command = app.get_subcommands().front()->get_name();
    std::vector<std::filesystem::path> written;
    if (command == "embed") {
      written = gsml::run_embed(config);
    } else if (command == "learn") {
      written = gsml::run_learn(config);
    } else if (command == "cluster") {
      written = gsml::run_cluster(config);
    } else if (command == "knn") {
      written = gsml::run_knn(config);
    } else if (command == "geodesic") {
      written = gsml::run_geodesic(config);
    } else if (command == "gap-curve") {
      written = gsml::run_gap_curve(config);
    } else {
      written = gsml::run_export_dataset(config);
    }
    for (const auto& p : written) std::cout << p.string() << '\n';
    return 0;
  } catch (const gsml::InputError& e) {
    std::cerr << "gsml: " << e.what() << '\n';
    return 2;
  } catch (const gsml::NumericalError& e) {
    std::cerr << "gsml: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "gsml: " << e.what() << '\n';
    return 1;
  }
}
