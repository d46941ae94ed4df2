// Acceptance gate: one PASS/FAIL line per criterion. Pass criterion ids
// (e.g. "AC2 AC4") to run a subset. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "gsml/clustering.hpp"
#include "gsml/csv.hpp"
#include "gsml/datasets.hpp"
#include "gsml/geodesic.hpp"
#include "gsml/graph_embed.hpp"
#include "gsml/metric_learning.hpp"
#include "gsml/neighbors_eval.hpp"
#include "gsml/pipeline.hpp"
#include "gsml/random.hpp"

using namespace gsml;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("gsml_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double summary_nmi(const fs::path& dir) {
  const csv::Table t = csv::read_file(dir / "cluster_summary.csv");
  return csv::to_double(t.rows.at(1).at(6), t.line_numbers.at(1));
}

// 1. Distance ratio against the closed form on the 2-d hyperboloid.
Outcome ac1() {
  Stopwatch clock;
  const auto h = hyperboloid_surface(2);
  GeodesicConfig base;
  base.n_samples = 32;
  base.quadrature_points = 16;
  base.patience = 50;
  base.max_sweeps = 8000;
  base.rel_tol = 1e-7;
  GeodesicStageConfig stage;
  stage.sweep_n = {0, 2, 4, 8, 16};
  stage.sweep_pairs = 50;
  stage.sweep_radius = 2.0;
  const auto sweep = ratio_sweep(*h, base, stage, 7);
  const double secs = clock.seconds();
  bool monotone = true;
  std::string curve;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (i > 0 && sweep[i].mean_ratio > sweep[i - 1].mean_ratio) monotone = false;
    curve += (i ? " " : "") + std::to_string(sweep[i].n_intermediate) + ":" + fmt("%.5f", sweep[i].mean_ratio);
  }
  const double at16 = sweep.back().mean_ratio;
  return {at16 >= 1.0 && at16 <= 1.01 && monotone && secs < 120.0,
          "mean ratio " + curve + (monotone ? " (non-increasing)" : " (NOT monotone)") + ", " + fmt("%.1f s", secs)};
}

// 2. Closed-form hyperboloid integrand against the generic quadratic form.
Outcome ac2() {
  Stopwatch clock;
  const auto h = hyperboloid_surface(2);
  Rng rng(2);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vector k = rng.normal_vector(2, 2.0);
    const Vector kd = rng.normal_vector(2, 2.0);
    worst = std::max(worst, std::abs(hyperboloid_integrand(k, kd) - generic_integrand(*h, k, kd)));
  }
  const double secs = clock.seconds();
  return {worst <= 1e-10 && secs < 1.0, "max |diff| " + fmt("%.3g", worst) + " over 1000 samples, " + fmt("%.3f s", secs)};
}

// 3. Euclidean surfaces reduce to Mahalanobis learning.
Outcome ac3() {
  Rng rng(3);
  GeodesicConfig geo;
  double worst_d = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int d = 2 + static_cast<int>(rng.below(3));
    const auto e = euclidean_surface(d);
    const LinearTransform L{rng.normal_vector(d * d).reshaped(d, d)};
    const Vector x = rng.normal_vector(d);
    const Vector y = rng.normal_vector(d);
    const double got = std::pow(transformed_distance(*e, L, x, y, geo), 2);
    const Vector diff = x - y;
    const double want = diff.dot(L.matrix.transpose() * L.matrix * diff);
    worst_d = std::max(worst_d, std::abs(got - want));
  }

  // Objectives with F = identity, assembled from coordinates.
  double worst_obj = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int d = 2 + t % 2;
    const auto e = euclidean_surface(d);
    const int n = 12;
    std::vector<Vector> pts;
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      labels.push_back(i % 3);
      Vector b = rng.normal_vector(d);
      b[0] += labels.back();
      pts.push_back(b);
    }
    const Matrix L = Matrix::Identity(d, d) + 0.3 * rng.normal_vector(d * d).reshaped(d, d);
    auto d2 = [&](int i, int j) { return (L * (pts[i] - pts[j])).squaredNorm(); };
    OptimizerConfig opt;
    opt.lambda = 0.8;
    opt.n_target_neighbors = 2;

    double mmc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) mmc += labels[i] == labels[j] ? d2(i, j) : -opt.lambda * d2(i, j);
    }
    // Targets: nearest same-class points under the plain metric, lower index on ties.
    double lmnn = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<int> same;
      for (int j = 0; j < n; ++j) {
        if (j != i && labels[j] == labels[i]) same.push_back(j);
      }
      std::stable_sort(same.begin(), same.end(),
                       [&](int a, int b) { return (pts[i] - pts[a]).squaredNorm() < (pts[i] - pts[b]).squaredNorm(); });
      same.resize(static_cast<std::size_t>(opt.n_target_neighbors));
      for (int j : same) {
        lmnn += d2(i, j);
        for (int l = 0; l < n; ++l) {
          if (labels[l] != labels[i]) lmnn += opt.lambda * std::max(0.0, 1.0 + d2(i, j) - d2(i, l));
        }
      }
    }
    const LinearTransform T{L};
    worst_obj = std::max(worst_obj, std::abs(objective_value(*e, T, pts, labels, ObjectiveKind::kMmc, opt, geo) - mmc));
    worst_obj =
        std::max(worst_obj, std::abs(objective_value(*e, T, pts, labels, ObjectiveKind::kLmnn, opt, geo) - lmnn));
  }
  return {worst_d <= 1e-10 && worst_obj <= 1e-9,
          "max distance^2 diff " + fmt("%.3g", worst_d) + ", max objective diff " + fmt("%.3g", worst_obj)};
}

Matrix euclidean_matrix(const std::vector<Vector>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (pts[i] - pts[j]).norm();
  }
  return d;
}

// 4. k-means cost identity and the exhaustive oracle.
Outcome ac4() {
  Rng rng(4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 5 + static_cast<int>(rng.below(26));
    const int k = 1 + static_cast<int>(rng.below(4));
    std::vector<Vector> pts;
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      pts.push_back(rng.normal_vector(3));
      labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
    }
    double centroid = 0.0;
    for (int c = 0; c < k; ++c) {
      Vector mu = Vector::Zero(3);
      int size = 0;
      for (int i = 0; i < n; ++i) {
        if (labels[i] == c) {
          mu += pts[i];
          ++size;
        }
      }
      if (size == 0) continue;
      mu /= size;
      for (int i = 0; i < n; ++i) {
        if (labels[i] == c) centroid += (pts[i] - mu).squaredNorm();
      }
    }
    worst = std::max(worst, std::abs(cost_of(labels, euclidean_matrix(pts), true) - centroid));
  }

  int matched = 0;
  bool below = false;
  for (int t = 0; t < 50; ++t) {
    const int n = 4 + static_cast<int>(rng.below(5));
    std::vector<Vector> pts;
    for (int i = 0; i < n; ++i) pts.push_back(rng.normal_vector(2));
    const Matrix d = euclidean_matrix(pts);
    double optimum = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
      std::vector<int> labels(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1U);
      optimum = std::min(optimum, cost_of(labels, d));
    }
    KMeansConfig c;
    c.k = 2;
    c.seed = static_cast<std::uint64_t>(t);
    const double got = kmeans_fit(d, c).cost;
    if (got < optimum - 1e-12) below = true;
    if (got <= optimum + 1e-9) ++matched;
  }
  return {worst <= 1e-9 && matched >= 45 && !below,
          "identity max diff " + fmt("%.3g", worst) + ", oracle matched " + std::to_string(matched) + "/50" +
              (below ? ", cost BELOW oracle" : ", never below")};
}

// 5. Every trace is non-increasing per accepted step.
Outcome ac5() {
  const double slack = 1e-12;
  int runs = 0;
  std::vector<std::string> bad;
  auto check = [&](const std::string& what, const std::vector<double>& trace, bool strict_decrease = false) {
    ++runs;
    for (std::size_t s = 1; s < trace.size(); ++s) {
      const bool ok = strict_decrease ? trace[s] < trace[s - 1] : trace[s] <= trace[s - 1] + slack;
      if (!ok) {
        bad.push_back(what);
        return;
      }
    }
  };

  Rng rng(5);
  std::vector<SurfacePtr> surfaces = {hyperboloid_surface(2), hyperboloid_surface(3), helicoid_surface()};
  for (const auto& name : monge_patch_names()) surfaces.push_back(make_surface("monge:" + name));
  for (const auto& s : surfaces) {
    for (int p = 0; p < 5; ++p) {
      auto draw = [&] {
        Vector v;
        do {
          v = rng.normal_vector(s->base_dim());
        } while (!s->in_domain(v));
        return v;
      };
      const Vector a = draw();
      const Vector b = draw();
      GeodesicConfig c;
      c.n_intermediate = 6;
      c.n_samples = 16;
      c.record_trace = true;
      check("path " + s->name(), refine_base_path(*s, a, b, c, pair_seed(p, a, b)).length_trace);
    }
  }

  for (int t = 0; t < 10; ++t) {
    std::vector<Vector> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(rng.normal_vector(2));
    KMeansConfig c;
    c.k = 2 + t % 3;
    c.seed = static_cast<std::uint64_t>(t);
    check("k-means", kmeans_fit(euclidean_matrix(pts), c).cost_trace, true);
  }

  GeodesicConfig geo;
  geo.n_intermediate = 4;
  geo.n_samples = 8;
  geo.quadrature_points = 8;
  geo.max_sweeps = 100;
  geo.patience = 5;
  geo.rel_tol = 1e-3;
  const std::vector<std::string> fit_surfaces = {"euclidean:2", "hyperboloid:2", "helicoid"};
  for (const auto& spec : fit_surfaces) {
    const auto s = make_surface(spec);
    const BasePointSet data = helicoid_two_clusters(spec == "helicoid" ? 8 : 15, 5);
    for (ObjectiveKind kind : {ObjectiveKind::kMmc, ObjectiveKind::kLmnn}) {
      OptimizerConfig opt;
      opt.max_iters = spec == "helicoid" ? 15 : 60;
      std::vector<double> values;
      for (const TraceRow& row : fit(*s, data.points, *data.labels, kind, opt, geo).trace) values.push_back(row.value);
      check("fit " + objective_name(kind) + " " + spec, values);
    }
  }

  for (const std::string spec : {"euclidean:2", "hyperboloid:2"}) {
    for (const std::string graph : {"football", "polbooks"}) {
      const GraphDataset g = builtin_graph(graph, 5);
      MdsConfig mc;
      mc.seed = 5;
      std::vector<double> values;
      for (const StressRow& row : mds_embed(*make_surface(spec), graph_distances(g), g.ids, mc, geo).trace) {
        values.push_back(row.stress);
      }
      check("mds " + graph + " " + spec, values);
    }
  }

  std::string detail = std::to_string(runs) + " traces checked";
  for (const auto& b : bad) detail += "; increase in " + b;
  return {bad.empty(), detail};
}

// 6. Helicoid two-cluster data: learned geodesic clustering against the ambient baseline.
Outcome ac6() {
  Stopwatch clock;
  double euclid = 0.0;
  double learned = 0.0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; ++seed) {
    PipelineConfig c;
    c.dataset = "synthetic:helicoid-two-clusters";
    c.seed = static_cast<std::uint64_t>(seed);
    c.surface = "euclidean:3";
    c.out_dir = scratch("ac6_e" + std::to_string(seed));
    run_cluster(c);
    euclid += summary_nmi(c.out_dir) / seeds;

    c.surface = "helicoid";
    c.learn = true;
    c.objective = ObjectiveKind::kMmc;
    c.optimizer.max_iters = 150;
    c.geodesic.n_intermediate = 4;
    c.geodesic.n_samples = 8;
    c.geodesic.quadrature_points = 8;
    c.geodesic.max_sweeps = 200;
    c.geodesic.patience = 5;
    c.geodesic.rel_tol = 1e-3;
    c.out_dir = scratch("ac6_h" + std::to_string(seed));
    run_cluster(c);
    learned += summary_nmi(c.out_dir) / seeds;
  }
  const double secs = clock.seconds();
  return {euclid <= 0.3 && learned >= 0.9 && secs < 600.0,
          "mean NMI euclidean " + fmt("%.3f", euclid) + ", helicoid+MMC " + fmt("%.3f", learned) + ", " +
              fmt("%.0f s", secs)};
}

// 7. Football kNN: hyperbolic + LMNN against Euclidean.
Outcome ac7() {
  Stopwatch clock;
  const GraphDataset g = builtin_graph("football", 0);
  bool ordered = true;
  bool bounded = true;
  std::string detail;
  for (int k : {1, 3, 5}) {
    PipelineConfig c;
    c.knn.k = k;
    const std::vector<EvalReport> r = knn_comparison(g, c);
    const double e = r[0].mean;
    const double hml = r[3].mean;
    ordered = ordered && hml < e;
    bounded = bounded && hml <= 0.40;
    detail += "k=" + std::to_string(k) + " E " + fmt("%.3f", e) + " E+ML " + fmt("%.3f", r[1].mean) + " H " +
              fmt("%.3f", r[2].mean) + " H+ML " + fmt("%.3f", hml) + "; ";
  }
  const double secs = clock.seconds();
  return {ordered && bounded && secs < 1800.0, detail + fmt("%.0f s", secs)};
}

// 8. Newsgroup stand-in: learned hyperboloid clustering against plain.
Outcome ac8() {
  double plain = 0.0;
  double learned = 0.0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; ++seed) {
    PipelineConfig c;
    c.dataset = "newsgroup";
    c.surface = "hyperboloid:2";
    c.seed = static_cast<std::uint64_t>(seed);
    c.out_dir = scratch("ac8_" + std::to_string(seed));
    run_embed(c);
    c.dataset = (c.out_dir / "embedding.csv").string();
    c.out_dir = scratch("ac8_p" + std::to_string(seed));
    run_cluster(c);
    plain += summary_nmi(c.out_dir) / seeds;
    c.learn = true;
    c.objective = ObjectiveKind::kMmc;
    c.out_dir = scratch("ac8_l" + std::to_string(seed));
    run_cluster(c);
    learned += summary_nmi(c.out_dir) / seeds;
  }
  return {learned >= plain, "mean NMI plain " + fmt("%.4f", plain) + ", learned " + fmt("%.4f", learned)};
}

// 9. Generalization gap shrinks with the training set.
Outcome ac9() {
  PipelineConfig c;
  c.surface = "euclidean:2";
  c.out_dir = scratch("ac9");
  run_gap_curve(c);
  const csv::Table t = csv::read_file(c.out_dir / "gap_curve.csv");
  std::map<long long, double> gap;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    gap[csv::to_integer(t.rows[r][0], t.line_numbers[r])] = csv::to_double(t.rows[r][1], t.line_numbers[r]);
  }
  std::string curve;
  for (const auto& [m, g] : gap) curve += (curve.empty() ? "" : " ") + std::to_string(m) + ":" + fmt("%.4f", g);
  return {gap.count(25) && gap.count(400) && gap.at(400) < gap.at(25), "mean gap " + curve};
}

// 10. Every CLI command reproduces its files bit for bit.
Outcome ac10() {
  const fs::path root = scratch("ac10");
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({
  "optimizer": {"max_iters": 20},
  "mds": {"max_iters": 200, "restarts": 2},
  "knn": {"n_splits": 3},
  "gap": {"m_values": [25, 50], "n_trials": 2},
  "query": {"x": [0.5, 0.0], "y": [-0.5, 2.0], "sweep_n": [0, 2, 4], "sweep_pairs": 5}
})";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"embed", "embed --dataset polbooks --surface hyperboloid:2"},
      {"learn", "learn --dataset synthetic:helicoid-two-clusters --surface euclidean:2 --objective lmnn"},
      {"cluster", "cluster --dataset synthetic:helicoid-two-clusters --surface euclidean:2 --learn --objective mmc"},
      {"knn", "knn --dataset polbooks"},
      {"geodesic", "geodesic --surface helicoid --n-intermediate 4"},
      {"geodesic sweep", "geodesic --surface hyperboloid:2 --sweep"},
      {"gap-curve", "gap-curve --surface euclidean:2"},
      {"dataset", "dataset --dataset adjnoun"},
  };
  std::vector<std::string> bad;
  int files = 0;
  int n = 0;
  for (const auto& [name, args] : commands) {
    fs::path dirs[2];
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      dirs[rep] = root / ("run" + std::to_string(n) + "_" + std::to_string(rep));
      const std::string cmd = std::string(GSML_BIN) + " --config " + cfg.string() + " --seed 3 --out-dir " +
                              dirs[rep].string() + " " + args + " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ran = false;
    }
    ++n;
    if (!ran) {
      bad.push_back(name + " failed to run");
      continue;
    }
    std::set<std::string> names;
    for (const auto& entry : fs::directory_iterator(dirs[0])) names.insert(entry.path().filename().string());
    for (const auto& entry : fs::directory_iterator(dirs[1])) names.insert(entry.path().filename().string());
    if (names.empty()) bad.push_back(name + " wrote nothing");
    for (const auto& f : names) {
      ++files;
      if (!fs::exists(dirs[0] / f) || !fs::exists(dirs[1] / f) || slurp(dirs[0] / f) != slurp(dirs[1] / f)) {
        bad.push_back(name + "/" + f + " differs");
      }
    }
  }
  std::string detail = std::to_string(commands.size()) + " commands, " + std::to_string(files) + " files compared";
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
  };
  std::set<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s %s\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(fs::temp_directory_path() / ("gsml_acceptance_" + std::to_string(::getpid())));
  return failures;
}
