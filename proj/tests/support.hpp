#pragma once

// Generators and reference implementations shared by the test suites. The
// oracles here deliberately avoid the library's own traversal helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "arbor/problems.hpp"
#include "arbor/tree.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline std::string tip_name(std::size_t i) {
  std::string s = "t";
  if (i < 10) s += '0';
  return s + std::to_string(i);
}

// Unlabeled-internal, labeled-tip rooted shape. A leaf carries `tip`.
struct Shape {
  std::string tip;
  std::vector<Shape> kids;
  bool leaf() const { return kids.empty(); }
};

inline std::size_t shape_tips(const Shape& s) {
  if (s.leaf()) return 1;
  std::size_t n = 0;
  for (const auto& k : s.kids) n += shape_tips(k);
  return n;
}

inline std::size_t shape_height(const Shape& s) {
  std::size_t h = 0;
  for (const auto& k : s.kids) h = std::max(h, 1 + shape_height(k));
  return h;
}

// Builds a tree from a shape. `feature(i)` fills edge i (creation order).
inline arbor::LabeledTree shape_tree(const Shape& shape, const arbor::FeatureSchema& schema,
                                     const std::function<std::vector<double>()>& feature) {
  std::vector<arbor::Node> nodes;
  std::vector<arbor::Edge> edges;
  std::size_t counter = 0;
  std::function<std::string(const Shape&)> walk = [&](const Shape& s) -> std::string {
    if (s.leaf()) {
      nodes.push_back({s.tip, arbor::NodeKind::terminal, {}});
      return s.tip;
    }
    const std::string id = "n" + std::to_string(counter++);
    nodes.push_back({id, arbor::NodeKind::internal, {}});
    for (const auto& k : s.kids) {
      const auto child = walk(k);
      edges.push_back({id, child, feature()});
    }
    return id;
  };
  const auto root = walk(shape);
  return arbor::LabeledTree(root, std::move(nodes), std::move(edges), schema);
}

// Every rooted binary topology over `tips` (labeled leaves, unordered
// children), built by inserting tips one at a time into every edge.
inline std::vector<Shape> all_binary_topologies(const std::vector<std::string>& tips) {
  std::vector<Shape> out{Shape{tips.at(0), {}}};
  for (std::size_t i = 1; i < tips.size(); ++i) {
    std::vector<Shape> next;
    for (const auto& base : out) {
      // Count edge slots: every node (including root) can receive the new tip
      // as a sibling above it.
      std::function<std::size_t(const Shape&)> count = [&](const Shape& s) {
        std::size_t n = 1;
        for (const auto& k : s.kids) n += count(k);
        return n;
      };
      const auto slots = count(base);
      for (std::size_t slot = 0; slot < slots; ++slot) {
        std::size_t seen = 0;
        std::function<Shape(const Shape&)> insert = [&](const Shape& s) -> Shape {
          if (seen++ == slot) return Shape{{}, {s, Shape{tips[i], {}}}};
          Shape copy{s.tip, {}};
          for (const auto& k : s.kids) copy.kids.push_back(insert(k));
          return copy;
        };
        next.push_back(insert(base));
      }
    }
    out = std::move(next);
  }
  return out;
}

// Every unlabeled full binary shape of height ≤ h. Tips are named later.
inline std::vector<Shape> binary_shapes_up_to(std::size_t h) {
  std::vector<Shape> shapes{Shape{}};
  for (std::size_t level = 1; level <= h; ++level) {
    std::vector<Shape> next{Shape{}};
    for (std::size_t i = 0; i < shapes.size(); ++i)
      for (std::size_t j = i; j < shapes.size(); ++j) next.push_back(Shape{{}, {shapes[i], shapes[j]}});
    shapes = std::move(next);
  }
  return shapes;
}

inline Shape name_tips(Shape s, std::size_t& next) {
  if (s.leaf()) {
    s.tip = tip_name(next++);
    return s;
  }
  for (auto& k : s.kids) k = name_tips(k, next);
  return s;
}

inline Shape random_binary_shape(Rng& rng, std::size_t k) {
  std::vector<Shape> pool;
  for (std::size_t i = 0; i < k; ++i) pool.push_back(Shape{tip_name(i), {}});
  while (pool.size() > 1) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    auto a = pick(rng);
    auto b = pick(rng);
    while (b == a) b = pick(rng);
    Shape merged{{}, {pool[a], pool[b]}};
    if (a < b) std::swap(a, b);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(a));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(b));
    pool.push_back(std::move(merged));
  }
  return pool.front();
}

inline arbor::FeatureSchema length_schema(std::size_t m) {
  std::vector<arbor::Feature> f;
  for (std::size_t i = 0; i < m; ++i) f.push_back({"f" + std::to_string(i), arbor::Combinator::additive});
  return arbor::FeatureSchema(std::move(f));
}

inline arbor::FeatureSchema weight_schema() {
  return arbor::FeatureSchema({{"p", arbor::Combinator::multiplicative}});
}

inline arbor::LabeledTree random_tree(Rng& rng, std::size_t k, std::size_t m) {
  std::uniform_real_distribution<double> len(0.1, 10.0);
  return shape_tree(random_binary_shape(rng, k), length_schema(m), [&] {
    std::vector<double> v(m);
    for (auto& x : v) x = len(rng);
    return v;
  });
}

inline arbor::TreeProblem random_decision_problem(Rng& rng, std::size_t k) {
  std::uniform_real_distribution<double> w(0.05, 1.0);
  auto tree = shape_tree(random_binary_shape(rng, k), weight_schema(), [&] { return std::vector<double>{w(rng)}; });
  return arbor::make_problem(std::move(tree), arbor::ProblemKind::decision);
}

// ---------------------------------------------------------------------------
// Independent traversal oracles

// Children of each internal node ordered by smallest tip label below them.
struct Ordered {
  std::map<std::string, std::vector<std::pair<std::string, std::vector<double>>>> kids;
  std::map<std::string, std::string> min_tip;
  std::string root;
};

inline Ordered order_tree(const arbor::LabeledTree& t) {
  Ordered o;
  o.root = t.root();
  for (const auto& e : t.edges()) o.kids[e.parent].push_back({e.child, e.features});
  std::function<std::string(const std::string&)> low = [&](const std::string& u) {
    auto it = o.kids.find(u);
    std::string m = it == o.kids.end() ? u : std::string(1, '\x7f');
    if (it != o.kids.end())
      for (const auto& [c, f] : it->second) m = std::min(m, low(c));
    o.min_tip[u] = m;
    return m;
  };
  low(o.root);
  for (auto& [u, ks] : o.kids)
    std::sort(ks.begin(), ks.end(), [&](const auto& a, const auto& b) { return o.min_tip[a.first] < o.min_tip[b.first]; });
  return o;
}

// Every root→tip path as (tip, per-edge feature-0 values in root→tip order),
// listed in the canonical preorder of tips.
inline std::vector<std::pair<std::string, std::vector<double>>> enumerate_paths(const arbor::LabeledTree& t) {
  const auto o = order_tree(t);
  std::vector<std::pair<std::string, std::vector<double>>> out;
  std::vector<double> trail;
  std::function<void(const std::string&)> dfs = [&](const std::string& u) {
    auto it = o.kids.find(u);
    if (it == o.kids.end()) {
      out.push_back({u, trail});
      return;
    }
    for (const auto& [c, f] : it->second) {
      trail.push_back(f.at(0));
      dfs(c);
      trail.pop_back();
    }
  };
  dfs(o.root);
  return out;
}

// Most probable tip: largest Σ log w summed root→tip; earliest tip wins ties.
inline std::string most_probable_tip(const arbor::LabeledTree& t) {
  std::string best;
  double best_score = -INFINITY;
  for (const auto& [tip, ws] : enumerate_paths(t)) {
    double s = 0.0;
    for (double w : ws) s += std::log(w);
    if (best.empty() || s > best_score) {
      best = tip;
      best_score = s;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Mazes

// Random simply connected maze grown one cell at a time: a wall cell is opened
// only when exactly one of its neighbours is already open.
inline std::string random_maze(Rng& rng, int width, int height) {
  std::vector<std::string> g(static_cast<std::size_t>(height), std::string(static_cast<std::size_t>(width), '#'));
  auto open_neighbours = [&](int r, int c) {
    int n = 0;
    const int dr[] = {-1, 0, 0, 1}, dc[] = {0, -1, 1, 0};
    for (int d = 0; d < 4; ++d) {
      const int rr = r + dr[d], cc = c + dc[d];
      if (rr >= 0 && cc >= 0 && rr < height && cc < width && g[rr][cc] != '#') ++n;
    }
    return n;
  };
  std::uniform_int_distribution<int> row(0, height - 1), col(0, width - 1);
  const int r0 = row(rng), c0 = col(rng);
  g[r0][c0] = '.';
  std::vector<std::pair<int, int>> frontier{{r0, c0}};
  while (!frontier.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    const auto i = pick(rng);
    const auto [r, c] = frontier[i];
    std::vector<std::pair<int, int>> options;
    const int dr[] = {-1, 0, 0, 1}, dc[] = {0, -1, 1, 0};
    for (int d = 0; d < 4; ++d) {
      const int rr = r + dr[d], cc = c + dc[d];
      if (rr >= 0 && cc >= 0 && rr < height && cc < width && g[rr][cc] == '#' && open_neighbours(rr, cc) == 1)
        options.push_back({rr, cc});
    }
    if (options.empty()) {
      frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(i));
      continue;
    }
    std::uniform_int_distribution<std::size_t> opt(0, options.size() - 1);
    const auto [nr, nc] = options[opt(rng)];
    g[nr][nc] = '.';
    frontier.push_back({nr, nc});
  }
  std::vector<std::pair<int, int>> open;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (g[r][c] == '.') open.push_back({r, c});
  std::shuffle(open.begin(), open.end(), rng);
  g[open[0].first][open[0].second] = 'S';
  g[open[1].first][open[1].second] = 'G';
  std::string text;
  for (const auto& line : g) text += line + "\n";
  return text;
}

// Grid BFS distance S→G straight from the text (−1 when unreachable).
inline int bfs_distance(const std::string& text) {
  std::vector<std::string> g;
  std::string line;
  for (char ch : text) {
    if (ch == '\n') {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      g.push_back(line);
      line.clear();
    } else {
      line += ch;
    }
  }
  if (!line.empty()) g.push_back(line);
  std::pair<int, int> s{-1, -1};
  for (int r = 0; r < static_cast<int>(g.size()); ++r)
    for (int c = 0; c < static_cast<int>(g[r].size()); ++c)
      if (g[r][c] == 'S') s = {r, c};
  std::map<std::pair<int, int>, int> dist{{s, 0}};
  std::queue<std::pair<int, int>> q;
  q.push(s);
  while (!q.empty()) {
    const auto [r, c] = q.front();
    q.pop();
    if (g[r][c] == 'G') return dist[{r, c}];
    const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
      const int rr = r + dr[d], cc = c + dc[d];
      if (rr < 0 || rr >= static_cast<int>(g.size()) || cc < 0 || cc >= static_cast<int>(g[rr].size())) continue;
      if (g[rr][cc] == '#' || dist.count({rr, cc})) continue;
      dist[{rr, cc}] = dist[{r, c}] + 1;
      q.push({rr, cc});
    }
  }
  return -1;
}

inline arbor::LabeledTree sample_tree() {
  using arbor::NodeKind;
  return arbor::LabeledTree(
      "r",
      {{"r", NodeKind::internal, {}},
       {"beta", NodeKind::internal, {}},
       {"alpha", NodeKind::internal, {}},
       {"a", NodeKind::terminal, {}},
       {"b", NodeKind::terminal, {}},
       {"c", NodeKind::terminal, {}},
       {"d", NodeKind::terminal, {}}},
      {{"r", "beta", {0.4}},
       {"beta", "a", {1.2}},
       {"beta", "b", {3.1}},
       {"r", "alpha", {2.5}},
       {"alpha", "c", {5.7}},
       {"alpha", "d", {1.0}}},
      arbor::FeatureSchema({{"length", arbor::Combinator::additive}}));
}

}  // namespace testing
