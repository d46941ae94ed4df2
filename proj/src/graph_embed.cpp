#include "gsml/graph_embed.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "gsml/csv.hpp"
#include "gsml/errors.hpp"
#include "gsml/parallel.hpp"
#include "gsml/random.hpp"
#include "gsml/seeding.hpp"

namespace gsml {

namespace {

using Index = Eigen::Index;

// ---- GML ---------------------------------------------------------------

struct Token {
  enum Kind { kKey, kNumber, kString, kOpen, kClose, kEnd } kind = kEnd;
  std::string text;
  int line = 0;
};

class Lexer {
 public:
  Lexer(std::istream& in, std::string source) : source_(std::move(source)) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text_ = buffer.str();
  }

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      t.kind = Token::kOpen;
      return t;
    }
    if (c == ']') {
      ++pos_;
      t.kind = Token::kClose;
      return t;
    }
    if (c == '"') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ >= text_.size()) fail(t.line, "unterminated string");
      t.kind = Token::kString;
      t.text = text_.substr(start, pos_ - start);
      ++pos_;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      t.kind = Token::kKey;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
             text_[pos_] != '[' && text_[pos_] != ']') {
        ++pos_;
      }
      t.kind = Token::kNumber;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    fail(t.line, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw InputError(source_ + ":" + std::to_string(line) + ": " + what);
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string source_;
  std::string text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

struct Item {
  std::string key;
  int line = 0;
  bool is_list = false;
  bool quoted = false;
  std::string scalar;
  std::vector<Item> children;
};

std::vector<Item> parse_list(Lexer& lex, bool nested, int open_line) {
  std::vector<Item> items;
  while (true) {
    Token key = lex.next();
    if (key.kind == Token::kEnd) {
      if (nested) lex.fail(open_line, "unclosed '['");
      return items;
    }
    if (key.kind == Token::kClose) {
      if (!nested) lex.fail(key.line, "unmatched ']'");
      return items;
    }
    if (key.kind != Token::kKey) lex.fail(key.line, "expected a key, found '" + key.text + "'");
    Token value = lex.next();
    Item item;
    item.key = key.text;
    item.line = key.line;
    switch (value.kind) {
      case Token::kOpen:
        item.is_list = true;
        item.children = parse_list(lex, true, value.line);
        break;
      case Token::kNumber:
      case Token::kKey:  // bare words are tolerated as scalars
        item.scalar = value.text;
        break;
      case Token::kString:
        item.scalar = value.text;
        item.quoted = true;
        break;
      default:
        lex.fail(key.line, "key '" + key.text + "' has no value");
    }
    items.push_back(std::move(item));
  }
}

std::string decode_entities(std::string s) {
  auto replace_all = [&s](const std::string& from, const std::string& to) {
    for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) {
      s.replace(p, from.size(), to);
    }
  };
  replace_all("&quot;", "\"");
  replace_all("&amp;", "&");
  return s;
}

std::string encode_entities(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') {
      out += "&amp;";
    } else if (c == '"') {
      out += "&quot;";
    } else {
      out += c;
    }
  }
  return out;
}

bool parse_integer(const std::string& s, long long& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

const Item* find_child(const Item& item, const std::string& key) {
  for (const Item& c : item.children) {
    if (c.key == key && !c.is_list) return &c;
  }
  return nullptr;
}

}  // namespace

int GraphDataset::class_count() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

void GraphDataset::normalize() {
  const std::size_t n = ids.size();
  if (names.size() != n || classes.size() != n) {
    throw InputError("graph '" + name + "': node fields have inconsistent lengths");
  }
  std::set<long long> seen;
  for (long long id : ids) {
    if (!seen.insert(id).second) throw InputError("graph '" + name + "': duplicate node id " + std::to_string(id));
  }
  std::vector<std::pair<std::size_t, std::size_t>> clean;
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw InputError("graph '" + name + "': edge endpoint out of range");
    if (a == b) continue;
    clean.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(clean.begin(), clean.end());
  clean.erase(std::unique(clean.begin(), clean.end()), clean.end());
  edges = std::move(clean);

  bool numeric = true;
  std::vector<long long> values(n);
  for (std::size_t i = 0; i < n && numeric; ++i) numeric = parse_integer(classes[i], values[i]);
  labels.assign(n, 0);
  if (numeric) {
    std::vector<long long> distinct = values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), values[i]) - distinct.begin());
    }
  } else {
    std::vector<std::string> distinct = classes;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), classes[i]) - distinct.begin());
    }
  }
}

GraphDataset parse_gml(std::istream& in, const std::string& source) {
  Lexer lex(in, source);
  const std::vector<Item> top = parse_list(lex, false, 0);
  const Item* graph = nullptr;
  for (const Item& item : top) {
    if (item.key == "graph" && item.is_list) {
      graph = &item;
      break;
    }
  }
  if (!graph) throw InputError(source + ": no 'graph [ ... ]' block");

  GraphDataset g;
  g.name = std::filesystem::path(source).stem().string();
  std::map<long long, std::size_t> index_of;
  struct PendingEdge {
    long long source;
    long long target;
    int line;
  };
  std::vector<PendingEdge> pending;
  for (const Item& item : graph->children) {
    if (item.key == "label" && !item.is_list) {
      g.name = decode_entities(item.scalar);
    } else if (item.key == "node" && item.is_list) {
      const Item* id = find_child(item, "id");
      if (!id) lex.fail(item.line, "node without id");
      long long id_value = 0;
      if (!parse_integer(id->scalar, id_value)) lex.fail(id->line, "node id '" + id->scalar + "' is not an integer");
      if (index_of.count(id_value)) lex.fail(id->line, "duplicate node id " + id->scalar);
      const Item* label = find_child(item, "label");
      const Item* value = find_child(item, "value");
      if (!label && !value) lex.fail(item.line, "node " + id->scalar + " has neither value nor label");
      index_of[id_value] = g.ids.size();
      g.ids.push_back(id_value);
      g.names.push_back(label ? decode_entities(label->scalar) : std::string());
      g.classes.push_back(decode_entities(value ? value->scalar : label->scalar));
    } else if (item.key == "edge" && item.is_list) {
      const Item* s = find_child(item, "source");
      const Item* t = find_child(item, "target");
      if (!s || !t) lex.fail(item.line, "edge without source or target");
      long long sv = 0;
      long long tv = 0;
      if (!parse_integer(s->scalar, sv)) lex.fail(s->line, "edge source '" + s->scalar + "' is not an integer");
      if (!parse_integer(t->scalar, tv)) lex.fail(t->line, "edge target '" + t->scalar + "' is not an integer");
      pending.push_back({sv, tv, item.line});
    }
  }
  for (const PendingEdge& e : pending) {
    const auto a = index_of.find(e.source);
    const auto b = index_of.find(e.target);
    if (a == index_of.end()) lex.fail(e.line, "edge source " + std::to_string(e.source) + " is not a node");
    if (b == index_of.end()) lex.fail(e.line, "edge target " + std::to_string(e.target) + " is not a node");
    g.edges.emplace_back(a->second, b->second);
  }
  if (g.ids.empty()) throw InputError(source + ": graph has no nodes");
  g.normalize();
  return g;
}

GraphDataset load_gml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  GraphDataset g = parse_gml(in, path.string());
  return g;
}

void save_gml(std::ostream& out, const GraphDataset& graph) {
  out << "graph [\n  directed 0\n  label \"" << encode_entities(graph.name) << "\"\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    out << "  node [\n    id " << graph.ids[i] << '\n';
    out << "    label \"" << encode_entities(graph.names[i]) << "\"\n";
    long long v = 0;
    if (parse_integer(graph.classes[i], v) && graph.classes[i] == std::to_string(v)) {
      out << "    value " << graph.classes[i] << '\n';
    } else {
      out << "    value \"" << encode_entities(graph.classes[i]) << "\"\n";
    }
    out << "  ]\n";
  }
  for (const auto& [a, b] : graph.edges) {
    out << "  edge [\n    source " << graph.ids[a] << "\n    target " << graph.ids[b] << "\n  ]\n";
  }
  out << "]\n";
}

std::vector<std::vector<std::size_t>> connected_components(const GraphDataset& graph) {
  const std::size_t n = graph.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& [a, b] : graph.edges) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  std::vector<int> component(n, -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] >= 0) continue;
    std::vector<std::size_t> members;
    std::queue<std::size_t> q;
    q.push(s);
    component[s] = static_cast<int>(out.size());
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      members.push_back(u);
      for (std::size_t v : adjacency[u]) {
        if (component[v] < 0) {
          component[v] = static_cast<int>(out.size());
          q.push(v);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return out;
}

GraphDataset largest_component(const GraphDataset& graph) {
  const auto components = connected_components(graph);
  const std::vector<std::size_t>& keep = components.front();
  std::vector<std::size_t> new_index(graph.size(), graph.size());
  GraphDataset out;
  out.name = graph.name;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    new_index[keep[k]] = k;
    out.ids.push_back(graph.ids[keep[k]]);
    out.names.push_back(graph.names[keep[k]]);
    out.classes.push_back(graph.classes[keep[k]]);
  }
  for (const auto& [a, b] : graph.edges) {
    if (new_index[a] < graph.size() && new_index[b] < graph.size()) out.edges.emplace_back(new_index[a], new_index[b]);
  }
  out.normalize();
  return out;
}

Matrix graph_distances(const GraphDataset& graph) {
  const auto components = connected_components(graph);
  if (components.size() > 1) {
    std::string sizes;
    for (std::size_t c = 0; c < components.size() && c < 10; ++c) {
      sizes += (c ? ", " : "") + std::to_string(components[c].size());
    }
    if (components.size() > 10) sizes += ", ...";
    throw InputError("graph '" + graph.name + "' is disconnected: " + std::to_string(components.size()) +
                     " components of sizes " + sizes + " (embed the largest component or fail)");
  }
  const std::size_t n = graph.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& [a, b] : graph.edges) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  Matrix d = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  parallel_for(n, [&](std::size_t s) {
    std::vector<int> hops(n, -1);
    std::queue<std::size_t> q;
    hops[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v : adjacency[u]) {
        if (hops[v] < 0) {
          hops[v] = hops[u] + 1;
          q.push(v);
        }
      }
    }
    for (std::size_t t = 0; t < n; ++t) d(static_cast<Index>(s), static_cast<Index>(t)) = hops[t];
  });
  return d;
}

void write_dissimilarity_csv(std::ostream& out, const std::vector<long long>& ids, const Matrix& delta) {
  if (static_cast<Index>(ids.size()) != delta.rows() || delta.rows() != delta.cols()) {
    throw InputError("dissimilarity matrix does not match the id list");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
  out << '\n';
  for (Index i = 0; i < delta.rows(); ++i) {
    for (Index j = 0; j < delta.cols(); ++j) out << (j ? "," : "") << csv::format(delta(i, j));
    out << '\n';
  }
}

std::pair<std::vector<long long>, Matrix> read_dissimilarity_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  if (table.rows.empty()) throw InputError(path.string() + ": empty dissimilarity file");
  std::vector<long long> ids;
  for (const auto& field : table.rows[0]) ids.push_back(csv::to_integer(field, table.line_numbers[0]));
  const std::size_t n = ids.size();
  if (table.rows.size() != n + 1) {
    throw InputError(path.string() + ": expected " + std::to_string(n) + " matrix rows after the header, found " +
                     std::to_string(table.rows.size() - 1));
  }
  Matrix delta(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r + 1];
    const int line = table.line_numbers[r + 1];
    if (row.size() != n) {
      throw InputError(path.string() + ":" + std::to_string(line) + ": expected " + std::to_string(n) + " fields");
    }
    for (std::size_t c = 0; c < n; ++c) delta(static_cast<Index>(r), static_cast<Index>(c)) = csv::to_double(row[c], line);
  }
  for (Index i = 0; i < delta.rows(); ++i) {
    for (Index j = 0; j < delta.cols(); ++j) {
      const double v = delta(i, j);
      if (!std::isfinite(v) || v < 0.0 || v != delta(j, i) || (i == j && v != 0.0)) {
        throw InputError(path.string() + ": dissimilarity must be finite, nonnegative, symmetric with zero diagonal (row " +
                         std::to_string(i) + ", column " + std::to_string(j) + ")");
      }
    }
  }
  return {std::move(ids), std::move(delta)};
}

// ---- MDS ---------------------------------------------------------------

void MdsConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("tau must be a positive real");
  if (max_iters < 0) throw InputError("max_iters must be >= 0");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("shrink must lie in (0, 1)");
  if (!(min_step > 0.0)) throw InputError("min_step must be > 0");
  if (!(rel_tol >= 0.0)) throw InputError("rel_tol must be >= 0");
  if (!(init_sd > 0.0)) throw InputError("init_sd must be > 0");
  if (max_reinit < 0) throw InputError("max_reinit must be >= 0");
  if (restarts < 1) throw InputError("restarts must be >= 1");
}

double stress(const Surface& surface, const std::vector<Vector>& points, const Matrix& delta,
              double tau, const GeodesicConfig& geo) {
  if (delta.rows() != static_cast<Index>(points.size()) || delta.cols() != delta.rows()) {
    throw InputError("dissimilarity size does not match the point count");
  }
  const Matrix rho = pairwise_distances(surface, points, nullptr, geo);
  double total = 0.0;
  for (Index i = 0; i < rho.rows(); ++i) {
    for (Index j = i + 1; j < rho.cols(); ++j) {
      const double r = rho(i, j) - tau * delta(i, j);
      total += r * r;
    }
  }
  return total;
}

std::vector<Vector> stress_gradient(const Surface& surface, const std::vector<Vector>& points,
                                    const Matrix& delta, double tau, const GeodesicConfig& geo) {
  const std::size_t n = points.size();
  if (delta.rows() != static_cast<Index>(n) || delta.cols() != delta.rows()) {
    throw InputError("dissimilarity size does not match the point count");
  }
  // Row i holds the pair terms (i, j) for j > i; slot [i][j - i - 1].
  std::vector<std::vector<std::pair<Vector, Vector>>> parts(n);
  parallel_for(n, [&](std::size_t i) {
    parts[i].resize(n - i - 1);
    for (std::size_t j = i + 1; j < n; ++j) {
      Vector bj = points[j];
      DistanceWithGradient dg = base_distance_gradient(surface, points[i], bj, geo);
      if (dg.value < 1e-12) {
        Rng rng(combine_seed(combine_seed(geo.seed ^ 0xC01AC1DEULL, i), j));
        bj += rng.normal_vector(bj.size(), 1e-8);
        if (surface.in_domain(bj)) dg = base_distance_gradient(surface, points[i], bj, geo);
      }
      const double w = 2.0 * (dg.value - tau * delta(static_cast<Index>(i), static_cast<Index>(j)));
      parts[i][j - i - 1] = {w * dg.grad_u, w * dg.grad_v};
    }
  });
  std::vector<Vector> grad(n, Vector::Zero(surface.base_dim()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      grad[i] += parts[i][j - i - 1].first;
      grad[j] += parts[i][j - i - 1].second;
    }
  }
  return grad;
}

MdsResult mds_embed(const Surface& surface, const Matrix& delta_in, const std::vector<long long>& ids_in,
                    const MdsConfig& config, const GeodesicConfig& geo) {
  config.validate();
  geo.validate();
  const std::size_t n = ids_in.size();
  if (n == 0) throw InputError("mds_embed needs at least one node");
  if (delta_in.rows() != static_cast<Index>(n) || delta_in.cols() != delta_in.rows()) {
    throw InputError("dissimilarity size does not match the id list");
  }
  // Work in id order so that the input node order cannot change a single bit.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids_in[a] < ids_in[b]; });
  std::vector<long long> ids(n);
  Matrix delta(delta_in.rows(), delta_in.cols());
  for (std::size_t a = 0; a < n; ++a) {
    ids[a] = ids_in[order[a]];
    if (a > 0 && ids[a] == ids[a - 1]) throw InputError("duplicate node id " + std::to_string(ids[a]));
    for (std::size_t b = 0; b < n; ++b) {
      delta(static_cast<Index>(a), static_cast<Index>(b)) =
          delta_in(static_cast<Index>(order[a]), static_cast<Index>(order[b]));
    }
  }
  const int d = surface.base_dim();
  auto safe_stress = [&](const std::vector<Vector>& b) {
    try {
      return stress(surface, b, delta, config.tau, geo);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  auto run_start = [&](int restart) {
    MdsResult result;
    result.best_restart = restart;
    double value = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= config.max_reinit; ++attempt) {
      result.points.assign(n, Vector());
      // Start 0 keeps the plain seed so that a single start is unchanged.
      const std::uint64_t start_seed =
          restart == 0 ? config.seed : combine_seed(config.seed ^ 0x6d64735f72737472ULL, static_cast<std::uint64_t>(restart));
      const std::uint64_t base = combine_seed(start_seed, static_cast<std::uint64_t>(attempt));
      for (std::size_t i = 0; i < n; ++i) {
        Rng rng(combine_seed(base, static_cast<std::uint64_t>(ids[i])));
        result.points[i] = rng.normal_vector(d, config.init_sd);
      }
      value = safe_stress(result.points);
      if (std::isfinite(value)) break;
      ++result.reinitializations;
    }
    if (!std::isfinite(value)) {
      throw NumericalError("stress is not finite after " + std::to_string(config.max_reinit) + " reinitializations");
    }
    result.trace.push_back({0, value, 0.0});

    double step = config.learning_rate;
    std::vector<Vector> candidate(n);
    std::vector<Vector> prev_points;
    std::vector<Vector> prev_grad;
    for (int iter = 1; iter <= config.max_iters; ++iter) {
      const std::vector<Vector> grad = stress_gradient(surface, result.points, delta, config.tau, geo);
      double g2 = 0.0;
      for (const Vector& g : grad) g2 += g.squaredNorm();
      if (!std::isfinite(g2)) throw NumericalError("stress gradient is not finite at iteration " + std::to_string(iter));
      if (g2 == 0.0) break;
      if (!prev_grad.empty()) {
        // Barzilai-Borwein trial step; backtracking below still enforces descent.
        double ss = 0.0;
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const Vector sdiff = result.points[i] - prev_points[i];
          ss += sdiff.squaredNorm();
          sy += sdiff.dot(grad[i] - prev_grad[i]);
        }
        if (sy > 0.0 && std::isfinite(ss / sy)) step = std::clamp(ss / sy, config.min_step, 1e3 * config.learning_rate);
      }
      prev_points = result.points;
      prev_grad = grad;
      bool accepted = false;
      double candidate_value = value;
      for (; step >= config.min_step; step *= config.shrink) {
        for (std::size_t i = 0; i < n; ++i) candidate[i] = result.points[i] - step * grad[i];
        candidate_value = safe_stress(candidate);
        if (candidate_value < value) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      const double decrease = value - candidate_value;
      result.points.swap(candidate);
      value = candidate_value;
      result.trace.push_back({iter, value, step});
      if (decrease <= config.rel_tol * std::max(value, 1e-300)) break;
      step *= 2.0;
    }
    result.stress = value;
    return result;
  };

  MdsResult best = run_start(0);
  int reinitializations = best.reinitializations;
  for (int r = 1; r < config.restarts; ++r) {
    MdsResult next = run_start(r);
    reinitializations += next.reinitializations;
    if (next.stress < best.stress) best = std::move(next);
  }
  best.reinitializations = reinitializations;
  std::vector<Vector> sorted = std::move(best.points);
  best.points.assign(n, Vector());
  for (std::size_t a = 0; a < n; ++a) best.points[order[a]] = std::move(sorted[a]);
  return best;
}

void write_embedding_csv(std::ostream& out, const std::vector<long long>& ids,
                         const std::vector<Vector>& points, const std::vector<int>& labels) {
  if (points.size() != ids.size() || labels.size() != ids.size()) {
    throw InputError("embedding: ids, points and labels differ in length");
  }
  const Index d = points.empty() ? 0 : points.front().size();
  out << "node";
  for (Index k = 0; k < d; ++k) out << ",b" << k + 1;
  out << ",label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i];
    for (Index k = 0; k < d; ++k) out << ',' << csv::format(points[i][k]);
    out << ',' << labels[i] << '\n';
  }
}

Embedding read_embedding_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  Embedding out;
  std::vector<int> labels;
  std::size_t start = 0;
  if (!table.rows.empty() && !table.rows[0].empty() && table.rows[0][0] == "node") start = 1;
  std::size_t width = 0;
  for (std::size_t r = start; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    if (row.size() < 3) throw InputError(path.string() + ":" + std::to_string(line) + ": expected node, coordinates, label");
    if (width == 0) width = row.size();
    if (row.size() != width) throw InputError(path.string() + ":" + std::to_string(line) + ": inconsistent field count");
    out.ids.push_back(csv::to_integer(row[0], line));
    Vector b(static_cast<Index>(row.size() - 2));
    for (std::size_t k = 1; k + 1 < row.size(); ++k) b[static_cast<Index>(k - 1)] = csv::to_double(row[k], line);
    out.points.points.push_back(std::move(b));
    labels.push_back(static_cast<int>(csv::to_integer(row.back(), line)));
  }
  if (out.ids.empty()) throw InputError(path.string() + ": no embedding rows");
  out.points.labels = std::move(labels);
  return out;
}

void write_stress_csv(std::ostream& out, const std::vector<StressRow>& trace) {
  out << "iteration,stress,step\n";
  for (const StressRow& row : trace) {
    out << row.iteration << ',' << csv::format(row.stress) << ',' << csv::format(row.step) << '\n';
  }
}

}  // namespace gsml
