#include "arbor/io.hpp"

#include "arbor/error.hpp"
#include "arbor/format.hpp"

namespace arbor {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

Json numbers(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(v);
  return arr;
}

}  // namespace

Json problem_to_json(const TreeProblem& p) {
  const auto& tree = p.tree;
  Json features = Json::array();
  for (const auto& f : tree.schema().features()) {
    features.push_back({{"name", f.name},
                        {"combinator", f.combinator == Combinator::additive ? "additive" : "multiplicative"}});
  }
  Json nodes = Json::array();
  for (const auto& n : tree.nodes())
    nodes.push_back({{"id", n.id}, {"terminal", n.terminal()}, {"labels", numbers(n.labels)}});
  Json edges = Json::array();
  for (const auto& e : tree.edges())
    edges.push_back({{"from", e.parent}, {"to", e.child}, {"features", numbers(e.features)}});

  return Json{{"id", p.id},
              {"kind", std::string(to_string(p.kind))},
              {"objective", std::string(to_string(p.objective))},
              {"features", std::move(features)},
              {"root", tree.root()},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)}};
}

TreeProblem problem_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "problem must be a JSON object");
  const auto kind = parse_problem_kind(field<std::string>(j, "kind"));

  std::vector<Feature> features;
  for (const auto& f : field<Json>(j, "features")) {
    const auto comb = field<std::string>(f, "combinator");
    if (comb != "additive" && comb != "multiplicative")
      fail(ErrorCode::ParseError, "unknown combinator '" + comb + "'");
    features.push_back({field<std::string>(f, "name"),
                        comb == "additive" ? Combinator::additive : Combinator::multiplicative});
  }

  std::vector<Node> nodes;
  for (const auto& n : field<Json>(j, "nodes")) {
    Node node;
    node.id = field<std::string>(n, "id");
    node.kind = field<bool>(n, "terminal") ? NodeKind::terminal : NodeKind::internal;
    if (n.contains("labels")) node.labels = field<std::vector<double>>(n, "labels");
    nodes.push_back(std::move(node));
  }
  std::vector<Edge> edges;
  for (const auto& e : field<Json>(j, "edges")) {
    edges.push_back({field<std::string>(e, "from"), field<std::string>(e, "to"),
                     field<std::vector<double>>(e, "features")});
  }

  LabeledTree tree(field<std::string>(j, "root"), std::move(nodes), std::move(edges),
                   FeatureSchema(std::move(features)));
  std::optional<Objective> objective;
  if (j.contains("objective")) objective = parse_objective(field<std::string>(j, "objective"));
  std::string id = j.contains("id") ? field<std::string>(j, "id") : std::string{};
  return make_problem(std::move(tree), kind, objective, std::move(id));
}

TreeProblem problem_from_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return problem_from_json(j);
}

Json solution_to_json(const LabeledTree& tree, const Solution& s) {
  Json bits = Json::array();
  for (auto b : s.bits()) bits.push_back(static_cast<int>(b));
  Json terminal = nullptr;
  if (is_path(tree, s)) terminal = decode_path(tree, s);
  return Json{{"problem_id", s.problem_id()},
              {"edge_order", edge_order_labels(tree)},
              {"bits", std::move(bits)},
              {"terminal", std::move(terminal)}};
}

Solution solution_from_json(const Json& j) {
  const auto labels = field<std::vector<std::string>>(j, "edge_order");
  const auto raw = field<std::vector<int>>(j, "bits");
  if (raw.size() != labels.size()) fail(ErrorCode::ParseError, "bits and edge_order differ in length");
  std::vector<std::uint8_t> bits;
  for (int b : raw) {
    if (b != 0 && b != 1) fail(ErrorCode::InvalidSolution, "solution bits must be 0 or 1");
    bits.push_back(static_cast<std::uint8_t>(b));
  }
  return Solution(std::move(bits), edge_order_ref(labels), field<std::string>(j, "problem_id"));
}

Json morphism_to_json(const Morphism& f) {
  Json flat = Json::array();
  for (Eigen::Index r = 0; r < f.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < f.matrix.cols(); ++c) flat.push_back(f.matrix(r, c));
  return Json{{"source_id", f.source_id},
              {"target_id", f.target_id},
              {"n", f.matrix.rows()},
              {"matrix", std::move(flat)},
              {"residual", f.residual}};
}

std::string matrix_to_csv(const CharacteristicMatrix& m) {
  std::string out;
  const auto names = m.column_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_number(m.entries()(r, c));
    }
    out += '\n';
  }
  return out;
}

Json matrix_to_json(const CharacteristicMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m.entries()(r, c));
    rows.push_back(std::move(row));
  }
  return Json{{"source_id", m.source_id()},
              {"tips", m.tip_labels()},
              {"columns", m.column_names()},
              {"rows", std::move(rows)}};
}

std::string describe_path(const LabeledTree& tree, const Solution& s) {
  const auto terminal = decode_path(tree, s);
  std::vector<std::string> nodes;
  for (auto u = tree.index_of(terminal);;) {
    nodes.push_back(tree.node_at(u).id);
    if (tree.parent_edges(u).empty()) break;
    u = tree.parent_index(tree.parent_edges(u).front());
  }
  std::string out;
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    if (!out.empty()) out += " → ";
    out += *it;
  }
  return out;
}

}  // namespace arbor
