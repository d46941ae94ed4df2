#include "gsml/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <type_traits>

#include "gsml/csv.hpp"
#include "gsml/errors.hpp"
#include "gsml/parallel.hpp"
#include "gsml/random.hpp"
#include "gsml/seeding.hpp"

namespace gsml {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string gradient_name(GradientMode mode) {
  switch (mode) {
    case GradientMode::kAuto: return "auto";
    case GradientMode::kAnalytic: return "analytic";
    case GradientMode::kFiniteDifference: return "finite-difference";
  }
  return "auto";
}

GradientMode parse_gradient(const std::string& name) {
  if (name == "auto") return GradientMode::kAuto;
  if (name == "analytic") return GradientMode::kAnalytic;
  if (name == "finite-difference") return GradientMode::kFiniteDifference;
  throw InputError("unknown gradient mode '" + name + "' (expected auto, analytic or finite-difference)");
}

// Reads the keys of one JSON object into fields, rejecting keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InputError(where_ + ": expected a JSON object");
  }

  template <typename T>
  void operator()(const char* key, T& field) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, ObjectiveKind>) {
        field = parse_objective(it->template get<std::string>());
      } else if constexpr (std::is_same_v<T, GradientMode>) {
        field = parse_gradient(it->template get<std::string>());
      } else if constexpr (std::is_same_v<T, fs::path>) {
        field = it->template get<std::string>();
      } else {
        field = it->template get<T>();
      }
    } catch (const json::exception& e) {
      throw InputError(where_ + "." + key + ": " + e.what());
    }
  }

  template <typename Fn>
  void object(const char* key, Fn&& fn) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader sub(*it, where_ + "." + key);
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw InputError(where_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

class Writer {
 public:
  explicit Writer(json& j) : j_(j) {}

  template <typename T>
  void operator()(const char* key, T& field) {
    if constexpr (std::is_same_v<T, ObjectiveKind>) {
      j_[key] = objective_name(field);
    } else if constexpr (std::is_same_v<T, GradientMode>) {
      j_[key] = gradient_name(field);
    } else if constexpr (std::is_same_v<T, fs::path>) {
      j_[key] = field.string();
    } else {
      j_[key] = field;
    }
  }

  template <typename Fn>
  void object(const char* key, Fn&& fn) {
    json sub = json::object();
    Writer w(sub);
    fn(w);
    j_[key] = std::move(sub);
  }

 private:
  json& j_;
};

// One field list serves both directions. Per-stage seeds are not listed: the
// global seed drives every stage.
template <typename V>
void visit(PipelineConfig& c, V& v) {
  v("surface", c.surface);
  v("dataset", c.dataset);
  v("out_dir", c.out_dir);
  v("seed", c.seed);
  v("threads", c.threads);
  v("objective", c.objective);
  v("transform", c.transform);
  v("learn", c.learn);
  v("largest_component", c.largest_component);
  v("synthetic_per_cluster", c.synthetic_per_cluster);
  v.object("geodesic", [&](auto& g) {
    g("n_intermediate", c.geodesic.n_intermediate);
    g("n_samples", c.geodesic.n_samples);
    g("quadrature_points", c.geodesic.quadrature_points);
    g("max_sweeps", c.geodesic.max_sweeps);
    g("rel_tol", c.geodesic.rel_tol);
    g("patience", c.geodesic.patience);
  });
  v.object("optimizer", [&](auto& o) {
    o("lambda", c.optimizer.lambda);
    o("max_iters", c.optimizer.max_iters);
    o("grad_step", c.optimizer.grad_step);
    o("learning_rate", c.optimizer.learning_rate);
    o("shrink", c.optimizer.shrink);
    o("min_step", c.optimizer.min_step);
    o("rel_tol", c.optimizer.rel_tol);
    o("n_target_neighbors", c.optimizer.n_target_neighbors);
    o("max_imposters", c.optimizer.max_imposters);
    o("gradient", c.optimizer.gradient);
  });
  v.object("mds", [&](auto& m) {
    m("tau", c.mds.tau);
    m("max_iters", c.mds.max_iters);
    m("learning_rate", c.mds.learning_rate);
    m("shrink", c.mds.shrink);
    m("min_step", c.mds.min_step);
    m("rel_tol", c.mds.rel_tol);
    m("init_sd", c.mds.init_sd);
    m("max_reinit", c.mds.max_reinit);
    m("restarts", c.mds.restarts);
  });
  v.object("knn", [&](auto& k) {
    k("k", c.knn.k);
    k("n_splits", c.knn.n_splits);
    k("test_frac", c.knn.test_frac);
    k("dim", c.knn.dim);
  });
  v.object("kmeans", [&](auto& k) {
    k("k", c.kmeans.k);
    k("restarts", c.kmeans.restarts);
    k("max_passes", c.kmeans.max_passes);
  });
  v.object("gap", [&](auto& g) {
    g("m_values", c.gap.m_values);
    g("n_trials", c.gap.n_trials);
    g("pool_size", c.gap.pool_size);
    g.object("gaussian", [&](auto& p) {
      p("dim", c.gap.gaussian.dim);
      p("separation", c.gap.gaussian.separation);
      p("along_sd", c.gap.gaussian.along_sd);
      p("across_sd", c.gap.gaussian.across_sd);
    });
  });
  v.object("query", [&](auto& q) {
    q("x", c.query.x);
    q("y", c.query.y);
    q("sweep", c.query.sweep);
    q("sweep_n", c.query.sweep_n);
    q("sweep_pairs", c.query.sweep_pairs);
    q("sweep_radius", c.query.sweep_radius);
  });
}

constexpr const char* kSynthetic = "synthetic:helicoid-two-clusters";

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_builtin_graph(const std::string& name) {
  for (const auto& n : builtin_graph_names()) {
    if (n == name) return true;
  }
  return false;
}

void require_file(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw InputError("cannot open " + path + ": no such file");
}

GeodesicConfig seeded(GeodesicConfig g, std::uint64_t seed) {
  g.seed = seed;
  return g;
}

OptimizerConfig seeded(OptimizerConfig o, std::uint64_t seed) {
  o.seed = seed;
  return o;
}

MdsConfig seeded(MdsConfig m, std::uint64_t seed) {
  m.seed = seed;
  return m;
}

struct OutputFile {
  fs::path path;
  std::ofstream stream;
};

OutputFile open_output(const PipelineConfig& config, const std::string& command, const std::string& file) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw InputError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
  OutputFile out{config.out_dir / file, {}};
  out.stream.open(out.path, std::ios::binary | std::ios::trunc);
  if (!out.stream) throw InputError("cannot write " + out.path.string());
  write_provenance(out.stream, command, config);
  return out;
}

void close_output(OutputFile& out, std::vector<fs::path>& written) {
  out.stream.close();
  if (!out.stream) throw Error("failed writing " + out.path.string());
  written.push_back(out.path);
}

std::vector<int> labels_or_zero(const BasePointSet& points) {
  return points.labels ? *points.labels : std::vector<int>(points.size(), 0);
}

int class_count(const std::vector<int>& labels) {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

GraphDataset prepared_graph(const PipelineConfig& config) {
  GraphDataset g = load_graph_dataset(config.dataset, config.seed);
  const auto components = connected_components(g);
  if (components.size() > 1) {
    if (!config.largest_component) {
      throw InputError("graph " + g.name + " has " + std::to_string(components.size()) +
                       " components; pass --largest-component to embed the largest");
    }
    g = largest_component(g);
  }
  return g;
}

MdsResult embed_graph(const Surface& surface, const GraphDataset& g, const PipelineConfig& config) {
  return mds_embed(surface, graph_distances(g), g.ids, seeded(config.mds, config.seed),
                   seeded(config.geodesic, config.seed));
}

// The transform used by cluster: learned, read from file, or none.
std::optional<LinearTransform> cluster_transform(const Surface& surface, const PointDataset& data,
                                                 const PipelineConfig& config) {
  if (config.learn) {
    const FitResult r = fit(surface, data.points.points, labels_or_zero(data.points), config.objective,
                            seeded(config.optimizer, config.seed), seeded(config.geodesic, config.seed));
    return r.transform;
  }
  if (!config.transform.empty()) {
    LinearTransform t = read_transform_csv(config.transform);
    t.validate(surface.base_dim());
    return t;
  }
  return std::nullopt;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[k];
  return out;
}

}  // namespace

std::string objective_name(ObjectiveKind kind) { return kind == ObjectiveKind::kMmc ? "mmc" : "lmnn"; }

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "mmc") return ObjectiveKind::kMmc;
  if (name == "lmnn") return ObjectiveKind::kLmnn;
  throw InputError("unknown objective '" + name + "' (expected mmc or lmnn)");
}

void PipelineConfig::merge_json(const nlohmann::json& j) {
  Reader r(j, "config");
  visit(*this, r);
  r.finish();
}

nlohmann::json PipelineConfig::to_json() const {
  json j = json::object();
  Writer w(j);
  visit(const_cast<PipelineConfig&>(*this), w);
  return j;
}

std::string PipelineConfig::hash() const {
  json j = to_json();
  j.erase("out_dir");
  j.erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

void PipelineConfig::validate() const {
  make_surface(surface);
  if (!dataset.empty() && dataset != kSynthetic && !is_builtin_graph(dataset)) require_file(dataset);
  if (!transform.empty()) require_file(transform);
  if (synthetic_per_cluster < 1) throw InputError("synthetic_per_cluster must be >= 1");
  geodesic.validate();
  optimizer.validate();
  mds.validate();
  if (knn.k < 1) throw InputError("knn.k must be >= 1");
  if (knn.n_splits < 1) throw InputError("knn.n_splits must be >= 1");
  if (!(knn.test_frac > 0.0 && knn.test_frac < 1.0)) throw InputError("knn.test_frac must be in (0, 1)");
  if (knn.dim < 1) throw InputError("knn.dim must be >= 1");
  if (kmeans.k < 0) throw InputError("kmeans.k must be >= 0");
  if (kmeans.restarts < 1) throw InputError("kmeans.restarts must be >= 1");
  if (kmeans.max_passes < 1) throw InputError("kmeans.max_passes must be >= 1");
  if (gap.m_values.empty()) throw InputError("gap.m_values must not be empty");
  for (std::size_t m : gap.m_values) {
    if (m < 2) throw InputError("gap.m_values entries must be >= 2");
  }
  if (gap.n_trials < 1) throw InputError("gap.n_trials must be >= 1");
  if (gap.gaussian.dim < 1) throw InputError("gap.gaussian.dim must be >= 1");
  if (query.x.size() != query.y.size()) throw InputError("query x and y have different dimensions");
  if (query.sweep_n.empty()) throw InputError("query.sweep_n must not be empty");
  for (int n : query.sweep_n) {
    if (n < 0) throw InputError("query.sweep_n entries must be >= 0");
  }
  if (query.sweep_pairs < 1) throw InputError("query.sweep_pairs must be >= 1");
  if (!(query.sweep_radius > 0.0)) throw InputError("query.sweep_radius must be positive");
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string() + ": no such file");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  PipelineConfig c;
  c.merge_json(j);
  return c;
}

void write_provenance(std::ostream& out, const std::string& command, const PipelineConfig& config) {
  out << "# gsml " << kVersion << '\n'
      << "# command: " << command << '\n'
      << "# config_hash: " << config.hash() << '\n'
      << "# seed: " << config.seed << '\n';
}

bool is_graph_dataset(const std::string& dataset) {
  return is_builtin_graph(dataset) || has_suffix(dataset, ".gml");
}

GraphDataset load_graph_dataset(const std::string& dataset, std::uint64_t seed) {
  if (is_builtin_graph(dataset)) return builtin_graph(dataset, seed);
  if (has_suffix(dataset, ".gml")) {
    require_file(dataset);
    return load_gml(dataset);
  }
  throw InputError("dataset '" + dataset + "' is not a graph (expected one of the built-ins or a .gml file)");
}

PointDataset load_point_dataset(const PipelineConfig& config, const Surface& surface) {
  if (config.dataset.empty()) throw InputError("no dataset given");
  PointDataset out;
  if (config.dataset == kSynthetic) {
    out.name = "helicoid-two-clusters";
    BasePointSet base = helicoid_two_clusters(config.synthetic_per_cluster, config.seed);
    if (surface.kind() == SurfaceKind::kHelicoid || surface.base_dim() == 2) {
      out.points = std::move(base);
    } else if (surface.kind() == SurfaceKind::kEuclidean && surface.base_dim() == 3) {
      // Ambient coordinates: the straight-line baseline in R^3.
      const SurfacePtr helicoid = helicoid_surface();
      out.points.labels = base.labels;
      for (const Vector& b : base.points) out.points.points.push_back(helicoid->map(b));
    } else {
      throw InputError(std::string(kSynthetic) + " needs a 2-d base space or euclidean:3, got " + surface.name());
    }
    for (std::size_t i = 0; i < out.points.size(); ++i) out.ids.push_back(static_cast<long long>(i));
  } else if (is_graph_dataset(config.dataset)) {
    const GraphDataset g = prepared_graph(config);
    out.name = g.name;
    out.ids = g.ids;
    out.points.points = embed_graph(surface, g, config).points;
    out.points.labels = g.labels;
  } else {
    require_file(config.dataset);
    Embedding e = read_embedding_csv(config.dataset);
    out.name = fs::path(config.dataset).stem().string();
    out.ids = std::move(e.ids);
    out.points = std::move(e.points);
  }
  out.points.validate(surface);
  return out;
}

std::vector<fs::path> run_embed(const PipelineConfig& config) {
  const SurfacePtr surface = make_surface(config.surface);
  std::vector<long long> ids;
  std::vector<int> labels;
  Matrix delta;
  if (is_graph_dataset(config.dataset)) {
    const GraphDataset g = prepared_graph(config);
    ids = g.ids;
    labels = g.labels;
    delta = graph_distances(g);
  } else {
    if (config.dataset.empty()) throw InputError("embed needs --dataset");
    require_file(config.dataset);
    std::tie(ids, delta) = read_dissimilarity_csv(config.dataset);
    labels.assign(ids.size(), 0);
  }
  const MdsResult r =
      mds_embed(*surface, delta, ids, seeded(config.mds, config.seed), seeded(config.geodesic, config.seed));
  std::vector<fs::path> written;
  OutputFile emb = open_output(config, "embed", "embedding.csv");
  write_embedding_csv(emb.stream, ids, r.points, labels);
  close_output(emb, written);
  OutputFile trace = open_output(config, "embed", "stress_trace.csv");
  write_stress_csv(trace.stream, r.trace);
  close_output(trace, written);
  return written;
}

std::vector<fs::path> run_learn(const PipelineConfig& config) {
  const SurfacePtr surface = make_surface(config.surface);
  const PointDataset data = load_point_dataset(config, *surface);
  if (!data.points.labels) throw InputError("learn needs labeled points");
  const FitResult r = fit(*surface, data.points.points, *data.points.labels, config.objective,
                          seeded(config.optimizer, config.seed), seeded(config.geodesic, config.seed));
  std::vector<fs::path> written;
  OutputFile t = open_output(config, "learn", "transform.csv");
  t.stream << "# objective: " << objective_name(config.objective) << '\n' << "# status: " << r.status << '\n';
  write_transform_csv(t.stream, r.transform);
  close_output(t, written);
  OutputFile trace = open_output(config, "learn", "objective_trace.csv");
  write_trace_csv(trace.stream, r.trace);
  close_output(trace, written);
  return written;
}

std::vector<fs::path> run_cluster(const PipelineConfig& config) {
  const SurfacePtr surface = make_surface(config.surface);
  const PointDataset data = load_point_dataset(config, *surface);
  const std::optional<LinearTransform> transform = cluster_transform(*surface, data, config);
  const GeodesicConfig geo = seeded(config.geodesic, config.seed);
  const Matrix dist = pairwise_distances(*surface, data.points.points, transform ? &*transform : nullptr, geo);
  KMeansConfig kc;
  kc.k = config.kmeans.k > 0 ? config.kmeans.k : class_count(labels_or_zero(data.points));
  kc.restarts = config.kmeans.restarts;
  kc.max_passes = config.kmeans.max_passes;
  kc.seed = config.seed;
  const ClusterAssignment a = kmeans_fit(dist, kc);

  std::vector<fs::path> written;
  OutputFile out = open_output(config, "cluster", "assignment.csv");
  write_assignment_csv(out.stream, a.labels);
  close_output(out, written);
  OutputFile summary = open_output(config, "cluster", "cluster_summary.csv");
  summary.stream << "dataset,surface,transform,k,cost,passes,nmi\n"
                 << data.name << ',' << surface->name() << ','
                 << (config.learn ? objective_name(config.objective) : transform ? "file" : "identity") << ','
                 << a.k << ',' << csv::format(a.cost) << ',' << a.passes << ','
                 << (data.points.labels ? csv::format(nmi(a.labels, *data.points.labels)) : std::string()) << '\n';
  close_output(summary, written);
  return written;
}

std::vector<EvalReport> knn_comparison(const GraphDataset& graph, const PipelineConfig& config) {
  const SurfacePtr surfaces[2] = {euclidean_surface(config.knn.dim), hyperboloid_surface(config.knn.dim)};
  SplitConfig sc;
  sc.n_splits = config.knn.n_splits;
  sc.test_frac = config.knn.test_frac;
  sc.seed = config.seed;
  std::vector<EvalReport> reports;
  for (int s = 0; s < 2; ++s) {
    const MdsResult emb = embed_graph(*surfaces[s], graph, config);
    for (int learn = 0; learn < 2; ++learn) {
      KnnPipelineConfig kc;
      kc.k = config.knn.k;
      kc.learn = learn == 1;
      kc.objective = config.objective;
      kc.optimizer = seeded(config.optimizer, config.seed);
      kc.geodesic = seeded(config.geodesic, config.seed);
      EvalReport r = split_eval(graph.labels, knn_pipeline(*surfaces[s], emb.points, graph.labels, kc), sc);
      r.dataset = graph.name;
      r.setting = knn_settings()[static_cast<std::size_t>(2 * s + learn)];
      r.metadata["surface"] = surfaces[s]->name();
      r.metadata["k"] = std::to_string(config.knn.k);
      r.metadata["stress"] = csv::format(emb.stress);
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

std::vector<fs::path> run_knn(const PipelineConfig& config) {
  const GraphDataset g = prepared_graph(config);
  const std::vector<EvalReport> reports = knn_comparison(g, config);
  std::vector<fs::path> written;
  OutputFile out = open_output(config, "knn", "knn_report.csv");
  out.stream << "dataset,setting,surface,k,metric,split,value\n";
  for (const EvalReport& r : reports) {
    const std::string prefix = r.dataset + ',' + r.setting + ',' + r.metadata.at("surface") + ',' +
                               r.metadata.at("k") + ',' + r.metric + ',';
    for (std::size_t s = 0; s < r.values.size(); ++s) out.stream << prefix << s << ',' << csv::format(r.values[s]) << '\n';
    out.stream << prefix << "mean," << csv::format(r.mean) << '\n';
    out.stream << prefix << "std," << csv::format(r.stddev) << '\n';
  }
  close_output(out, written);
  OutputFile table = open_output(config, "knn", "knn_table.txt");
  table.stream << format_results_table(reports, knn_settings());
  close_output(table, written);
  return written;
}

std::vector<RatioPoint> ratio_sweep(const Surface& surface, const GeodesicConfig& base,
                                    const GeodesicStageConfig& stage, std::uint64_t seed) {
  if (!surface.has_closed_form()) throw InputError("ratio sweep needs a closed-form surface, got " + surface.name());
  const int d = surface.base_dim();
  const double r = stage.sweep_radius;
  Rng rng(seed);
  auto draw = [&] {
    Vector v(d);
    do {
      for (int k = 0; k < d; ++k) v[k] = rng.uniform(-r, r);
    } while (v.norm() > r || !surface.in_domain(v));
    return v;
  };
  std::vector<std::pair<Vector, Vector>> pairs;
  for (int p = 0; p < stage.sweep_pairs; ++p) {
    Vector a = draw();
    Vector b = draw();
    pairs.emplace_back(std::move(a), std::move(b));
  }
  std::vector<RatioPoint> out;
  for (int n : stage.sweep_n) {
    GeodesicConfig c = base;
    c.n_intermediate = n;
    c.seed = seed;
    std::vector<double> ratios(pairs.size(), 1.0);
    parallel_for(pairs.size(), [&](std::size_t p) {
      const auto& [a, b] = pairs[p];
      const double exact = surface.closed_form_base_distance(a, b);
      if (exact == 0.0) return;
      ratios[p] = refine_base_path(surface, a, b, c, pair_seed(seed, a, b)).path.length / exact;
    });
    RatioPoint pt;
    pt.n_intermediate = n;
    for (double q : ratios) {
      pt.mean_ratio += q;
      pt.max_ratio = std::max(pt.max_ratio, q);
    }
    pt.mean_ratio /= static_cast<double>(ratios.size());
    out.push_back(pt);
  }
  return out;
}

void write_ratio_csv(std::ostream& out, const std::vector<RatioPoint>& sweep) {
  out << "n_intermediate,mean_ratio,max_ratio\n";
  for (const RatioPoint& p : sweep) {
    out << p.n_intermediate << ',' << csv::format(p.mean_ratio) << ',' << csv::format(p.max_ratio) << '\n';
  }
}

std::vector<fs::path> run_geodesic(const PipelineConfig& config) {
  const SurfacePtr surface = make_surface(config.surface);
  const GeodesicConfig geo = seeded(config.geodesic, config.seed);
  std::vector<fs::path> written;
  if (config.query.sweep) {
    const auto sweep = ratio_sweep(*surface, geo, config.query, config.seed);
    OutputFile out = open_output(config, "geodesic", "ratio_sweep.csv");
    out.stream << "# surface: " << surface->name() << '\n';
    write_ratio_csv(out.stream, sweep);
    close_output(out, written);
    return written;
  }
  const int d = surface->base_dim();
  if (config.query.x.size() != static_cast<std::size_t>(d) || config.query.y.size() != static_cast<std::size_t>(d)) {
    throw InputError("geodesic needs --x and --y with " + std::to_string(d) + " base coordinates each");
  }
  const Vector a = to_vector(config.query.x);
  const Vector b = to_vector(config.query.y);
  for (const Vector* p : {&a, &b}) {
    if (!surface->in_domain(*p)) throw InputError("geodesic endpoint outside the domain of " + surface->name());
  }
  const RefineResult r = refine_base_path(*surface, a, b, geo, pair_seed(geo.seed, a, b));
  OutputFile out = open_output(config, "geodesic", "geodesic_path.csv");
  out.stream << "# distance: " << csv::format(r.path.length) << '\n';
  if (surface->has_closed_form()) {
    out.stream << "# closed_form: " << csv::format(surface->closed_form_base_distance(a, b)) << '\n';
  }
  out.stream << "# sweeps: " << r.sweeps << '\n';
  write_path_csv(out.stream, *surface, r.path);
  close_output(out, written);
  return written;
}

std::vector<fs::path> run_gap_curve(const PipelineConfig& config) {
  const SurfacePtr surface = make_surface(config.surface);
  if (config.gap.gaussian.dim != surface->base_dim()) {
    throw InputError("gap.gaussian.dim is " + std::to_string(config.gap.gaussian.dim) + " but " + surface->name() +
                     " has base dimension " + std::to_string(surface->base_dim()));
  }
  const GaussianPairParams params = config.gap.gaussian;
  const LabeledSampler sampler = [params](std::size_t n, Rng& rng) { return sample_gaussian_pairs(n, rng, params); };
  GapConfig gc;
  gc.m_values = config.gap.m_values;
  gc.n_trials = config.gap.n_trials;
  gc.pool_size = config.gap.pool_size;
  gc.seed = config.seed;
  const auto curve = generalization_gap_curve(*surface, sampler, gc, seeded(config.optimizer, config.seed),
                                              seeded(config.geodesic, config.seed),
                                              mmc_pair_loss(config.optimizer.lambda));
  std::vector<fs::path> written;
  OutputFile out = open_output(config, "gap-curve", "gap_curve.csv");
  write_gap_csv(out.stream, curve);
  close_output(out, written);
  return written;
}

std::vector<fs::path> run_export_dataset(const PipelineConfig& config) {
  if (!is_builtin_graph(config.dataset)) {
    throw InputError("dataset '" + config.dataset + "' is not a built-in graph");
  }
  const GraphDataset g = builtin_graph(config.dataset, config.seed);
  std::vector<fs::path> written;
  OutputFile out = open_output(config, "dataset", g.name + ".gml");
  save_gml(out.stream, g);
  close_output(out, written);
  return written;
}

}  // namespace gsml
