#pragma once

// Rooted labeled trees: the structural core every other module builds on.
//
// A LabeledTree is an arborescence whose edges carry a fixed-length vector of
// real features and whose terminal nodes (tips) are identified by their ids.
// Internal node ids are bookkeeping only: equality, topology and every
// derived quantity depend on tip labels, shape and edge features alone.
//
// Construction only indexes the input. Structural invariants are checked by
// validate(), which reports the first violation it finds with a code naming
// the offending node or edge.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace arbor {

enum class Combinator { additive, multiplicative };

struct Feature {
  std::string name;
  Combinator combinator = Combinator::additive;

  bool operator==(const Feature&) const = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws InvalidSchema on empty or repeated names.
  explicit FeatureSchema(std::vector<Feature> features);

  std::size_t size() const { return features_.size(); }
  const Feature& operator[](std::size_t i) const { return features_[i]; }
  std::span<const Feature> features() const { return features_; }

  // Identity element of feature `i` under its combinator (0 or 1).
  double neutral(std::size_t i) const;
  // Combines two consecutive edge values of feature `i` (sum or product).
  double combine(std::size_t i, double upper, double lower) const;
  std::vector<double> combine(std::span<const double> upper,
                              std::span<const double> lower) const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<Feature> features_;
};

enum class NodeKind { internal, terminal };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::internal;
  std::vector<double> labels;

  bool terminal() const { return kind == NodeKind::terminal; }
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string parent;
  std::string child;
  std::vector<double> features;

  bool operator==(const Edge&) const = default;
};

class LabeledTree {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  LabeledTree() = default;
  // Throws DuplicateNode when two nodes share an id and UnknownNode when the
  // root or an edge endpoint is not declared. Everything else is deferred to
  // validate().
  LabeledTree(std::string root, std::vector<Node> nodes, std::vector<Edge> edges,
              FeatureSchema schema);

  const std::string& root() const { return root_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  const FeatureSchema& schema() const { return schema_; }
  std::size_t feature_arity() const { return schema_.size(); }
  bool empty() const { return nodes_.empty(); }

  // Index-level access used by the algorithms.
  std::size_t root_index() const { return root_index_; }
  std::size_t index_of(std::string_view id) const;  // npos when absent
  const Node& node_at(std::size_t i) const { return nodes_[i]; }
  std::span<const std::size_t> child_edges(std::size_t node) const {
    return child_edges_[node];
  }
  std::span<const std::size_t> parent_edges(std::size_t node) const {
    return parent_edges_[node];
  }
  std::size_t child_index(std::size_t edge) const { return edge_child_[edge]; }
  std::size_t parent_index(std::size_t edge) const { return edge_parent_[edge]; }

  bool contains(std::string_view id) const { return index_of(id) != npos; }
  // Throws UnknownNode.
  const Node& node(std::string_view id) const;
  // Tip labels in ascending order.
  std::vector<std::string> tips() const;
  std::size_t tip_count() const;

 private:
  std::string root_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  FeatureSchema schema_;

  std::size_t root_index_ = npos;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> child_edges_;
  std::vector<std::vector<std::size_t>> parent_edges_;
  std::vector<std::size_t> edge_parent_;
  std::vector<std::size_t> edge_child_;
};

// Returns normally iff the tree is a well-formed arborescence with finite
// features of the schema's arity. Throws the first violation found.
void validate(const LabeledTree& tree);

std::string mrca(const LabeledTree& tree, std::string_view tip_i,
                 std::string_view tip_j);

// Number of edges between the root and `id`.
std::size_t depth(const LabeledTree& tree, std::string_view id);

// A cluster is the sorted list of tip labels below an edge.
using Cluster = std::vector<std::string>;

// Clusters induced by internal edges that split the tip set non-trivially.
std::vector<Cluster> nontrivial_clusters(const LabeledTree& tree);

bool same_topology(const LabeledTree& a, const LabeledTree& b);
bool tree_equal(const LabeledTree& a, const LabeledTree& b);

// Collapses unary chains and resolves multifurcations into binary nodes.
// Surviving nodes keep their ids; inserted nodes get fresh ids derived from
// the node they split.
LabeledTree binarize(const LabeledTree& tree);

bool is_binary(const LabeledTree& tree);

// Preorder from the root, visiting children by ascending smallest tip label
// of their subtree. Returns indices into tree.edges().
std::vector<std::size_t> canonical_edge_indices(const LabeledTree& tree);
std::vector<Edge> canonical_edge_order(const LabeledTree& tree);

// "parent→child" rendering of the canonical edge order.
std::vector<std::string> edge_order_labels(const LabeledTree& tree);

// Stable identifier of a canonical edge order.
std::string edge_order_ref(std::span<const std::string> labels);
std::string edge_order_ref(const LabeledTree& tree);

// Content hash over root, nodes, edges and schema in canonical order.
std::string fingerprint(const LabeledTree& tree);

// Sum (additive) or product (multiplicative) of feature `feature` along the
// root-to-`id` path.
double path_aggregate(const LabeledTree& tree, std::string_view id,
                      std::size_t feature);

// Copy of `tree` with tip ids renamed through `mapping` (tips missing from
// the map keep their id).
LabeledTree relabel_tips(const LabeledTree& tree,
                         const std::unordered_map<std::string, std::string>& mapping);

}  // namespace arbor
