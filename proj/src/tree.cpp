#include "arbor/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>
#include <utility>

#include "arbor/error.hpp"
#include "arbor/format.hpp"
#include "hash.hpp"

namespace arbor {

FeatureSchema::FeatureSchema(std::vector<Feature> features)
    : features_(std::move(features)) {
  std::unordered_set<std::string> seen;
  for (const auto& f : features_) {
    if (f.name.empty()) fail(ErrorCode::InvalidSchema, "feature name is empty");
    if (!seen.insert(f.name).second)
      fail(ErrorCode::InvalidSchema, "duplicate feature name '" + f.name + "'");
  }
}

double FeatureSchema::neutral(std::size_t i) const {
  return features_[i].combinator == Combinator::additive ? 0.0 : 1.0;
}

double FeatureSchema::combine(std::size_t i, double upper, double lower) const {
  return features_[i].combinator == Combinator::additive ? upper + lower
                                                         : upper * lower;
}

std::vector<double> FeatureSchema::combine(std::span<const double> upper,
                                           std::span<const double> lower) const {
  std::vector<double> out(features_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = combine(i, upper[i], lower[i]);
  return out;
}

LabeledTree::LabeledTree(std::string root, std::vector<Node> nodes,
                         std::vector<Edge> edges, FeatureSchema schema)
    : root_(std::move(root)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      schema_(std::move(schema)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second)
      fail(ErrorCode::DuplicateNode, "node '" + nodes_[i].id + "' declared twice");
  }
  if (!nodes_.empty()) {
    root_index_ = index_of(root_);
    if (root_index_ == npos)
      fail(ErrorCode::UnknownNode, "root '" + root_ + "' is not a declared node");
  }
  child_edges_.resize(nodes_.size());
  parent_edges_.resize(nodes_.size());
  edge_parent_.reserve(edges_.size());
  edge_child_.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto p = index_of(edges_[e].parent);
    const auto c = index_of(edges_[e].child);
    if (p == npos || c == npos) {
      fail(ErrorCode::UnknownNode, "edge " + edges_[e].parent + "→" + edges_[e].child +
                                       " references an undeclared node");
    }
    edge_parent_.push_back(p);
    edge_child_.push_back(c);
    child_edges_[p].push_back(e);
    parent_edges_[c].push_back(e);
  }
}

std::size_t LabeledTree::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? npos : it->second;
}

const Node& LabeledTree::node(std::string_view id) const {
  const auto i = index_of(id);
  if (i == npos) fail(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'");
  return nodes_[i];
}

std::vector<std::string> LabeledTree::tips() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (n.terminal()) out.push_back(n.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t LabeledTree::tip_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.terminal(); }));
}

void validate(const LabeledTree& tree) {
  if (tree.empty()) fail(ErrorCode::EmptyTree, "tree has no nodes");
  const auto m = tree.feature_arity();
  for (const auto& e : tree.edges()) {
    const auto name = e.parent + "→" + e.child;
    if (e.features.size() != m) {
      fail(ErrorCode::FeatureArityMismatch,
           "edge " + name + " has " + std::to_string(e.features.size()) +
               " features, schema declares " + std::to_string(m));
    }
    for (double v : e.features)
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteFeature, "edge " + name + " has a non-finite feature");
  }

  const auto n = tree.nodes().size();
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.parent_edges(i).size() > 1)
      fail(ErrorCode::MultipleParents, "node '" + tree.node_at(i).id + "' has more than one parent");
  }

  // Each node has at most one parent, so following parent links either ends
  // at a parentless node or loops.
  std::vector<char> state(n, 0);  // 0 unseen, 1 on current chain, 2 finished
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> chain;
    auto cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      const auto parents = tree.parent_edges(cur);
      if (parents.empty()) break;
      cur = tree.parent_index(parents.front());
    }
    if (state[cur] == 1 && !tree.parent_edges(cur).empty())
      fail(ErrorCode::CycleDetected, "cycle through node '" + tree.node_at(cur).id + "'");
    for (auto c : chain) state[c] = 2;
  }

  std::vector<char> reached(n, 0);
  std::vector<std::size_t> stack{tree.root_index()};
  reached[tree.root_index()] = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto e : tree.child_edges(u)) {
      const auto c = tree.child_index(e);
      if (!reached[c]) {
        reached[c] = 1;
        stack.push_back(c);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!reached[i])
      fail(ErrorCode::UnreachableNode, "node '" + tree.node_at(i).id + "' is not reachable from the root");
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = tree.node_at(i);
    const bool has_children = !tree.child_edges(i).empty();
    if (node.terminal() && has_children)
      fail(ErrorCode::TerminalHasChild, "terminal node '" + node.id + "' has children");
    if (!node.terminal() && !has_children)
      fail(ErrorCode::InternalWithoutChild, "internal node '" + node.id + "' has no children");
  }
}

namespace {

std::size_t parent_of(const LabeledTree& tree, std::size_t node) {
  const auto parents = tree.parent_edges(node);
  return parents.empty() ? LabeledTree::npos : tree.parent_index(parents.front());
}

std::size_t require_tip(const LabeledTree& tree, std::string_view id) {
  const auto i = tree.index_of(id);
  if (i == LabeledTree::npos || !tree.node_at(i).terminal())
    fail(ErrorCode::NotATerminal, "'" + std::string(id) + "' is not a terminal node");
  return i;
}

// Postorder list of node indices reachable from the root.
std::vector<std::size_t> postorder(const LabeledTree& tree) {
  std::vector<std::size_t> order;
  order.reserve(tree.nodes().size());
  std::vector<std::pair<std::size_t, std::size_t>> stack{{tree.root_index(), 0}};
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    const auto kids = tree.child_edges(u);
    if (next < kids.size()) {
      const auto c = tree.child_index(kids[next++]);
      stack.emplace_back(c, 0);
    } else {
      order.push_back(u);
      stack.pop_back();
    }
  }
  return order;
}

// Sorted tip labels below every node.
std::vector<Cluster> clusters_by_node(const LabeledTree& tree) {
  std::vector<Cluster> below(tree.nodes().size());
  for (auto u : postorder(tree)) {
    if (tree.node_at(u).terminal()) {
      below[u] = {tree.node_at(u).id};
      continue;
    }
    Cluster merged;
    for (auto e : tree.child_edges(u)) {
      const auto& part = below[tree.child_index(e)];
      merged.insert(merged.end(), part.begin(), part.end());
    }
    std::sort(merged.begin(), merged.end());
    below[u] = std::move(merged);
  }
  return below;
}

// Smallest tip label below every node.
std::vector<std::string> min_tip_by_node(const LabeledTree& tree) {
  std::vector<std::string> best(tree.nodes().size());
  for (auto u : postorder(tree)) {
    if (tree.node_at(u).terminal()) {
      best[u] = tree.node_at(u).id;
      continue;
    }
    bool first = true;
    for (auto e : tree.child_edges(u)) {
      const auto& cand = best[tree.child_index(e)];
      if (first || cand < best[u]) best[u] = cand;
      first = false;
    }
  }
  return best;
}

}  // namespace

std::string mrca(const LabeledTree& tree, std::string_view tip_i, std::string_view tip_j) {
  const auto i = require_tip(tree, tip_i);
  const auto j = require_tip(tree, tip_j);
  if (i == j) fail(ErrorCode::SameTip, "mrca needs two distinct tips, got '" + std::string(tip_i) + "' twice");
  std::unordered_set<std::size_t> ancestors;
  for (auto u = i; u != LabeledTree::npos; u = parent_of(tree, u)) ancestors.insert(u);
  for (auto u = j; u != LabeledTree::npos; u = parent_of(tree, u))
    if (ancestors.count(u)) return tree.node_at(u).id;
  return tree.root();
}

std::size_t depth(const LabeledTree& tree, std::string_view id) {
  auto u = tree.index_of(id);
  if (u == LabeledTree::npos) fail(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'");
  std::size_t d = 0;
  for (u = parent_of(tree, u); u != LabeledTree::npos; u = parent_of(tree, u)) ++d;
  return d;
}

std::vector<Cluster> nontrivial_clusters(const LabeledTree& tree) {
  const auto below = clusters_by_node(tree);
  const auto k = tree.tip_count();
  std::set<Cluster> unique;
  for (std::size_t e = 0; e < tree.edges().size(); ++e) {
    const auto& c = below[tree.child_index(e)];
    if (c.size() >= 2 && c.size() < k) unique.insert(c);
  }
  return {unique.begin(), unique.end()};
}

bool same_topology(const LabeledTree& a, const LabeledTree& b) {
  if (a.tips() != b.tips()) return false;
  return nontrivial_clusters(a) == nontrivial_clusters(b);
}

namespace {

// Cluster below each edge → feature vectors of the edges carrying it, top
// to bottom (several edges share a cluster only along unary chains).
std::map<Cluster, std::vector<std::vector<double>>> labelled_edges(const LabeledTree& tree) {
  const auto below = clusters_by_node(tree);
  std::map<Cluster, std::vector<std::vector<double>>> out;
  for (auto e : canonical_edge_indices(tree))
    out[below[tree.child_index(e)]].push_back(tree.edges()[e].features);
  return out;
}

}  // namespace

bool tree_equal(const LabeledTree& a, const LabeledTree& b) {
  if (!same_topology(a, b)) return false;
  return labelled_edges(a) == labelled_edges(b);
}

bool is_binary(const LabeledTree& tree) {
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    if (!tree.node_at(i).terminal() && tree.child_edges(i).size() != 2) return false;
  }
  return true;
}

LabeledTree binarize(const LabeledTree& tree) {
  if (tree.empty()) fail(ErrorCode::EmptyTree, "cannot binarize an empty tree");
  validate(tree);
  if (tree.node_at(tree.root_index()).terminal())
    fail(ErrorCode::RootIsTerminal, "root '" + tree.root() + "' is a terminal node");

  const auto& schema = tree.schema();
  const auto min_tip = min_tip_by_node(tree);

  struct Branch {
    std::size_t node;
    std::vector<double> features;
  };

  // Follows an edge through unary internal nodes, folding their features.
  auto resolve = [&](std::size_t edge) {
    Branch b{tree.child_index(edge), tree.edges()[edge].features};
    while (!tree.node_at(b.node).terminal() && tree.child_edges(b.node).size() == 1) {
      const auto next = tree.child_edges(b.node).front();
      b.features = schema.combine(b.features, tree.edges()[next].features);
      b.node = tree.child_index(next);
    }
    return b;
  };
  auto branches = [&](std::size_t node) {
    std::vector<Branch> out;
    for (auto e : tree.child_edges(node)) out.push_back(resolve(e));
    std::sort(out.begin(), out.end(),
              [&](const Branch& x, const Branch& y) { return min_tip[x.node] < min_tip[y.node]; });
    return out;
  };

  std::unordered_set<std::string> taken;
  for (const auto& n : tree.nodes()) taken.insert(n.id);
  auto fresh_id = [&](const std::string& base, std::size_t ordinal) {
    auto id = base + "/" + std::to_string(ordinal);
    while (taken.count(id)) id += "'";
    taken.insert(id);
    return id;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<double> neutral(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) neutral[i] = schema.neutral(i);

  // The root cannot be collapsed; a unary root absorbs its child instead.
  auto root_branches = branches(tree.root_index());
  while (root_branches.size() == 1 && !tree.node_at(root_branches.front().node).terminal()) {
    const auto top = root_branches.front();
    root_branches.clear();
    for (auto& b : branches(top.node)) {
      b.features = schema.combine(top.features, b.features);
      root_branches.push_back(std::move(b));
    }
  }

  struct Frame {
    std::string id;
    std::vector<Branch> kids;
  };
  nodes.push_back(tree.node_at(tree.root_index()));
  std::vector<Frame> stack{{tree.root(), std::move(root_branches)}};
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    std::vector<Frame> pending;

    auto emit_child = [&](const std::string& parent, const Branch& b) {
      const auto& child = tree.node_at(b.node);
      edges.push_back({parent, child.id, b.features});
      nodes.push_back(child);
      if (!child.terminal()) pending.push_back({child.id, branches(b.node)});
    };

    auto& kids = frame.kids;
    if (kids.size() <= 2) {
      for (const auto& b : kids) emit_child(frame.id, b);
    } else {
      // Chain of c-1 binary nodes: each keeps the next branch and hands the
      // rest to a fresh node joined by a neutral edge.
      std::string holder = frame.id;
      for (std::size_t i = 0; i + 2 < kids.size(); ++i) {
        emit_child(holder, kids[i]);
        auto aux = fresh_id(frame.id, i + 1);
        edges.push_back({holder, aux, neutral});
        nodes.push_back({aux, NodeKind::internal, {}});
        holder = aux;
      }
      emit_child(holder, kids[kids.size() - 2]);
      emit_child(holder, kids[kids.size() - 1]);
    }
    // Reverse so the first branch is expanded first (preorder output).
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) stack.push_back(std::move(*it));
  }

  return LabeledTree(tree.root(), std::move(nodes), std::move(edges), schema);
}

std::vector<std::size_t> canonical_edge_indices(const LabeledTree& tree) {
  std::vector<std::size_t> order;
  if (tree.empty()) return order;
  const auto min_tip = min_tip_by_node(tree);
  order.reserve(tree.edges().size());
  // Node preorder; each non-root node is entered by exactly one edge.
  std::vector<std::size_t> stack{tree.root_index()};
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    if (u != tree.root_index()) order.push_back(tree.parent_edges(u).front());
    std::vector<std::size_t> kids(tree.child_edges(u).begin(), tree.child_edges(u).end());
    std::sort(kids.begin(), kids.end(), [&](std::size_t x, std::size_t y) {
      return min_tip[tree.child_index(x)] < min_tip[tree.child_index(y)];
    });
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(tree.child_index(*it));
  }
  return order;
}

std::vector<Edge> canonical_edge_order(const LabeledTree& tree) {
  std::vector<Edge> out;
  for (auto e : canonical_edge_indices(tree)) out.push_back(tree.edges()[e]);
  return out;
}

std::vector<std::string> edge_order_labels(const LabeledTree& tree) {
  std::vector<std::string> out;
  for (auto e : canonical_edge_indices(tree))
    out.push_back(tree.edges()[e].parent + "→" + tree.edges()[e].child);
  return out;
}

std::string edge_order_ref(std::span<const std::string> labels) {
  detail::Fnv1a h;
  for (const auto& l : labels) h.update_field(l);
  return "eo-" + h.hex();
}

std::string edge_order_ref(const LabeledTree& tree) {
  const auto labels = edge_order_labels(tree);
  return edge_order_ref(labels);
}

std::string fingerprint(const LabeledTree& tree) {
  detail::Fnv1a h;
  h.update_field(tree.root());
  for (const auto& f : tree.schema().features()) {
    h.update_field(f.name);
    h.update_field(f.combinator == Combinator::additive ? "+" : "*");
  }
  std::vector<const Node*> nodes;
  for (const auto& n : tree.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
  for (const auto* n : nodes) {
    h.update_field(n->id);
    h.update_field(n->terminal() ? "T" : "I");
    for (double v : n->labels) h.update_field(format_number(v));
  }
  for (auto e : canonical_edge_indices(tree)) {
    const auto& edge = tree.edges()[e];
    h.update_field(edge.parent);
    h.update_field(edge.child);
    for (double v : edge.features) h.update_field(format_number(v));
  }
  return "tp-" + h.hex();
}

double path_aggregate(const LabeledTree& tree, std::string_view id, std::size_t feature) {
  auto u = tree.index_of(id);
  if (u == LabeledTree::npos) fail(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'");
  std::vector<std::size_t> path;
  for (; !tree.parent_edges(u).empty(); u = parent_of(tree, u)) path.push_back(tree.parent_edges(u).front());
  double acc = tree.schema().neutral(feature);
  for (auto it = path.rbegin(); it != path.rend(); ++it)
    acc = tree.schema().combine(feature, acc, tree.edges()[*it].features[feature]);
  return acc;
}

LabeledTree relabel_tips(const LabeledTree& tree,
                         const std::unordered_map<std::string, std::string>& mapping) {
  auto rename = [&](const std::string& id) -> std::string {
    const auto i = tree.index_of(id);
    if (i == LabeledTree::npos || !tree.node_at(i).terminal()) return id;
    auto it = mapping.find(id);
    return it == mapping.end() ? id : it->second;
  };
  std::vector<Node> nodes(tree.nodes().begin(), tree.nodes().end());
  for (auto& n : nodes) n.id = rename(n.id);
  std::vector<Edge> edges(tree.edges().begin(), tree.edges().end());
  for (auto& e : edges) {
    e.parent = rename(e.parent);
    e.child = rename(e.child);
  }
  return LabeledTree(rename(tree.root()), std::move(nodes), std::move(edges), tree.schema());
}

}  // namespace arbor
