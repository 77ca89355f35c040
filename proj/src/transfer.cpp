#include "arbor/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "arbor/error.hpp"
#include "arbor/io.hpp"
#include "arbor/metrics.hpp"
#include "hash.hpp"

namespace arbor {

namespace {

// Shapes are interned in a dictionary shared by both trees being aligned, so
// equal ids mean equal unlabeled shapes.
class ShapeDictionary {
 public:
  int intern(std::vector<int> children) {
    std::sort(children.begin(), children.end());
    auto [it, inserted] = ids_.try_emplace(std::move(children), static_cast<int>(ids_.size()));
    return it->second;
  }

 private:
  std::map<std::vector<int>, int> ids_;
};

// Children of every node in an order that depends only on shape and edge
// features, falling back to tip labels for fully identical subtrees.
class OrderedTree {
 public:
  OrderedTree(const LabeledTree& tree, ShapeDictionary& dict) : tree_(tree) {
    const auto n = tree.nodes().size();
    shape_.assign(n, -1);
    kids_.resize(n);
    min_tip_.resize(n);
    for (auto u : postorder()) {
      std::vector<int> child_shapes;
      for (auto e : tree.child_edges(u)) {
        const auto c = tree.child_index(e);
        kids_[u].push_back(c);
        child_shapes.push_back(shape_[c]);
      }
      shape_[u] = dict.intern(std::move(child_shapes));
      if (tree.node_at(u).terminal()) {
        min_tip_[u] = tree.node_at(u).id;
      } else {
        auto& kids = kids_[u];
        std::sort(kids.begin(), kids.end(), [this](std::size_t a, std::size_t b) {
          const int c = compare(a, b);
          return c != 0 ? c < 0 : min_tip_[a] < min_tip_[b];
        });
        min_tip_[u] = min_tip_[kids.front()];
        for (auto c : kids) min_tip_[u] = std::min(min_tip_[u], min_tip_[c]);
      }
    }
  }

  int shape(std::size_t u) const { return shape_[u]; }
  const std::vector<std::size_t>& kids(std::size_t u) const { return kids_[u]; }
  const LabeledTree& tree() const { return tree_; }

 private:
  std::vector<std::size_t> postorder() const {
    std::vector<std::size_t> order;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{tree_.root_index(), 0}};
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const auto edges = tree_.child_edges(u);
      if (next < edges.size()) {
        const auto c = tree_.child_index(edges[next++]);
        stack.emplace_back(c, 0);
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
    return order;
  }

  const std::vector<double>& entering(std::size_t u) const {
    return tree_.edges()[tree_.parent_edges(u).front()].features;
  }

  // Three-way comparison of two sibling subtrees whose children are already
  // ordered: shape, then entering edge features, then children in order.
  int compare(std::size_t a, std::size_t b) const {
    if (shape_[a] != shape_[b]) return shape_[a] < shape_[b] ? -1 : 1;
    const auto& fa = entering(a);
    const auto& fb = entering(b);
    for (std::size_t i = 0; i < fa.size() && i < fb.size(); ++i)
      if (fa[i] != fb[i]) return fa[i] < fb[i] ? -1 : 1;
    for (std::size_t i = 0; i < kids_[a].size(); ++i) {
      const int c = compare(kids_[a][i], kids_[b][i]);
      if (c != 0) return c;
    }
    return 0;
  }

  const LabeledTree& tree_;
  std::vector<int> shape_;
  std::vector<std::vector<std::size_t>> kids_;
  std::vector<std::string> min_tip_;
};

// Edge key: tips below the edge plus its rank along a unary chain.
using EdgeKey = std::pair<Cluster, std::size_t>;

std::map<EdgeKey, std::size_t> edges_by_key(const LabeledTree& tree, const TipBijection* rename) {
  const auto order = canonical_edge_indices(tree);
  std::vector<Cluster> below(tree.nodes().size());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto c = tree.child_index(*it);
    if (tree.node_at(c).terminal()) {
      const auto& id = tree.node_at(c).id;
      below[c] = {rename ? rename->at(id) : id};
    }
    auto& up = below[tree.parent_index(*it)];
    up.insert(up.end(), below[c].begin(), below[c].end());
  }
  for (auto& c : below) std::sort(c.begin(), c.end());
  std::map<EdgeKey, std::size_t> out;
  std::map<Cluster, std::size_t> seen;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& cluster = below[tree.child_index(order[i])];
    out[{cluster, seen[cluster]++}] = i;
  }
  return out;
}

}  // namespace

std::optional<TipBijection> match_tips(const TreeProblem& a, const TreeProblem& b) {
  const auto& ta = a.tree;
  const auto& tb = b.tree;
  validate(ta);
  validate(tb);
  if (ta.tip_count() != tb.tip_count()) return std::nullopt;

  if (ta.tips() == tb.tips() && tree_equal(ta, tb)) {
    TipBijection identity;
    for (const auto& t : ta.tips()) identity.emplace(t, t);
    return identity;
  }

  ShapeDictionary dict;
  const OrderedTree oa(ta, dict);
  const OrderedTree ob(tb, dict);
  if (oa.shape(ta.root_index()) != ob.shape(tb.root_index())) return std::nullopt;

  TipBijection bijection;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{ta.root_index(), tb.root_index()}};
  while (!stack.empty()) {
    const auto [u, v] = stack.back();
    stack.pop_back();
    if (ta.node_at(u).terminal()) {
      bijection.emplace(ta.node_at(u).id, tb.node_at(v).id);
      continue;
    }
    const auto& ku = oa.kids(u);
    const auto& kv = ob.kids(v);
    for (std::size_t i = 0; i < ku.size(); ++i) stack.emplace_back(ku[i], kv[i]);
  }
  return bijection;
}

Solution transfer_solution(const TreeProblem& source, const Solution& source_sol, const TreeProblem& target) {
  const auto bijection = match_tips(source, target);
  if (!bijection) {
    fail(ErrorCode::NoCorrespondence,
         "problems '" + source.id + "' and '" + target.id + "' have no matching tip correspondence");
  }
  return transfer_solution(source, source_sol, target, *bijection);
}

Solution transfer_solution(const TreeProblem& source, const Solution& source_sol, const TreeProblem& target,
                           const TipBijection& bijection) {
  const auto source_order = canonical_edge_indices(source.tree);
  if (source_sol.size() != source_order.size()) {
    fail(ErrorCode::LengthMismatch, "solution has " + std::to_string(source_sol.size()) +
                                        " entries, source has " + std::to_string(source_order.size()) + " edges");
  }
  if (!source_sol.edge_order_ref().empty() && source_sol.edge_order_ref() != edge_order_ref(source.tree))
    fail(ErrorCode::InconsistentSolution, "solution was not encoded against the source problem");
  for (const auto& tip : source.tree.tips()) {
    if (!bijection.count(tip)) fail(ErrorCode::NoCorrespondence, "tip '" + tip + "' has no image");
  }

  const auto source_keys = edges_by_key(source.tree, &bijection);
  const auto target_keys = edges_by_key(target.tree, nullptr);
  std::vector<std::uint8_t> bits(canonical_edge_indices(target.tree).size(), 0);
  for (const auto& [key, i] : source_keys) {
    if (!source_sol.bits()[i]) continue;
    auto it = target_keys.find(key);
    if (it == target_keys.end()) fail(ErrorCode::BrokenPath, "a marked edge has no counterpart in the target");
    bits[it->second] = 1;
  }
  Solution out(std::move(bits), edge_order_ref(target.tree), target.id);
  if (!is_path(target.tree, out))
    fail(ErrorCode::BrokenPath, "transferred edges do not form a root-to-terminal path");
  return out;
}

ProblemTransform ProblemTransform::then(const ProblemTransform& next) const {
  ProblemTransform out = *this;
  out.steps_.insert(out.steps_.end(), next.steps_.begin(), next.steps_.end());
  return out;
}

namespace {

TreeProblem with_tree(const TreeProblem& p, LabeledTree tree, std::vector<std::string> goal_tips) {
  TreeProblem out;
  out.id = fingerprint(tree);
  out.tree = std::move(tree);
  out.kind = p.kind;
  out.objective = p.objective;
  std::sort(goal_tips.begin(), goal_tips.end());
  out.goal_tips = std::move(goal_tips);
  return out;
}

TreeProblem map_feature0(const TreeProblem& p, Combinator required, const char* what,
                         const std::function<double(double)>& fn) {
  if (p.tree.feature_arity() == 0 || p.tree.schema()[0].combinator != required)
    fail(ErrorCode::InvalidTransform, std::string(what) + " does not fit feature 0 of this problem");
  std::vector<Edge> edges(p.tree.edges().begin(), p.tree.edges().end());
  for (auto& e : edges) e.features[0] = fn(e.features[0]);
  LabeledTree tree(p.tree.root(), {p.tree.nodes().begin(), p.tree.nodes().end()}, std::move(edges),
                   p.tree.schema());
  return with_tree(p, std::move(tree), p.goal_tips);
}

TreeProblem apply_step(const TreeProblem& p, const TipRelabel& step) {
  const auto tips = p.tree.tips();
  std::set<std::string> images;
  for (const auto& t : tips) {
    auto it = step.mapping.find(t);
    images.insert(it == step.mapping.end() ? t : it->second);
  }
  if (images.size() != tips.size()) fail(ErrorCode::InvalidTransform, "tip relabeling is not injective");
  for (const auto& [from, to] : step.mapping) {
    if (!std::binary_search(tips.begin(), tips.end(), from))
      fail(ErrorCode::InvalidTransform, "'" + from + "' is not a tip");
    const auto i = p.tree.index_of(to);
    if (i != LabeledTree::npos && !p.tree.node_at(i).terminal())
      fail(ErrorCode::InvalidTransform, "'" + to + "' already names an internal node");
  }
  std::unordered_map<std::string, std::string> mapping(step.mapping.begin(), step.mapping.end());
  std::vector<std::string> goals;
  for (const auto& g : p.goal_tips) goals.push_back(mapping.count(g) ? mapping.at(g) : g);
  return with_tree(p, relabel_tips(p.tree, mapping), std::move(goals));
}

TreeProblem apply_step(const TreeProblem& p, const PowerTransform& step) {
  if (!(step.exponent > 0.0) || !std::isfinite(step.exponent))
    fail(ErrorCode::InvalidTransform, "power transform needs a positive finite exponent");
  return map_feature0(p, Combinator::multiplicative, "a power transform",
                      [a = step.exponent](double w) { return std::pow(w, a); });
}

TreeProblem apply_step(const TreeProblem& p, const LengthRescale& step) {
  if (!(step.factor > 0.0) || !std::isfinite(step.factor))
    fail(ErrorCode::InvalidTransform, "length rescaling needs a positive finite factor");
  return map_feature0(p, Combinator::additive, "a length rescaling",
                      [c = step.factor](double l) { return c * l; });
}

}  // namespace

TreeProblem apply_transform(const TreeProblem& p, const ProblemTransform& t) {
  TreeProblem out = p;
  for (const auto& step : t.steps())
    out = std::visit([&](const auto& s) { return apply_step(out, s); }, step);
  return out;
}

bool functor_commute_check(const TreeProblem& p, const ProblemTransform& t) {
  const auto target = apply_transform(p, t);
  const auto direct = solve(target);
  try {
    return transfer_solution(p, solve(p), target) == direct;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoCorrespondence || e.code() == ErrorCode::BrokenPath) return false;
    throw;
  }
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

namespace fs = std::filesystem;

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_stem_for(const std::string& id) {
  std::string stem;
  bool changed = id.empty();
  for (char c : id) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    stem += safe ? c : '_';
    changed |= !safe;
  }
  if (stem.empty() || stem.front() == '.') changed = true;
  if (changed) {
    detail::Fnv1a h;
    h.update(id);
    stem += "-" + h.hex();
  }
  return stem;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::StorageFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorCode::StorageFailure, "cannot create " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::StorageFailure, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::StorageFailure, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::StorageFailure, "cannot replace " + path.string() + ": " + ec.message());
}

Json parse_json(const std::string& text, const fs::path& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::StorageFailure, origin.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace

ProblemLibrary ProblemLibrary::open(std::filesystem::path storage_root) {
  ProblemLibrary lib(std::move(storage_root));
  const auto index_path = lib.root_ / "index.json";
  if (!fs::exists(index_path)) return lib;

  const auto index = parse_json(read_file(index_path), index_path);
  if (!index.is_array()) fail(ErrorCode::StorageFailure, index_path.string() + " must hold an array");
  for (const auto& entry : index) {
    try {
      LibraryRecord rec;
      rec.problem_id = entry.at("problem_id").get<std::string>();
      rec.file = entry.at("file").get<std::string>();
      const auto path = lib.root_ / rec.file;
      const auto doc = parse_json(read_file(path), path);
      rec.problem = problem_from_json(doc.at("problem"));
      rec.problem.id = rec.problem_id;
      if (doc.contains("solution") && !doc.at("solution").is_null()) rec.solution = solution_from_json(doc.at("solution"));
      if (doc.contains("metadata")) {
        const auto& meta = doc.at("metadata");
        rec.created = meta.value("created", std::string{});
        rec.tags = meta.value("tags", std::vector<std::string>{});
      }
      lib.records_.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::StorageFailure, "malformed library entry: " + std::string(e.what()));
    }
  }
  return lib;
}

const LibraryRecord* ProblemLibrary::find(std::string_view problem_id) const {
  for (const auto& r : records_)
    if (r.problem_id == problem_id) return &r;
  return nullptr;
}

std::string ProblemLibrary::add(const TreeProblem& p, const std::optional<Solution>& s,
                                std::vector<std::string> tags) {
  validate_problem(p);
  auto stored = canonicalize(p);
  if (stored.id.empty()) stored.id = fingerprint(stored.tree);
  if (find(stored.id)) fail(ErrorCode::DuplicateId, "problem '" + stored.id + "' is already in the library");

  if (s) {
    const auto edges = stored.tree.edges().size();
    if (s->size() != edges) {
      fail(ErrorCode::InconsistentSolution, "solution has " + std::to_string(s->size()) + " entries, problem has " +
                                                std::to_string(edges) + " edges");
    }
    if (s->edge_order_ref() != edge_order_ref(stored.tree))
      fail(ErrorCode::InconsistentSolution, "solution uses a different edge order than the stored problem");
    if (!is_path(stored.tree, *s))
      fail(ErrorCode::InconsistentSolution, "solution does not mark a root-to-terminal path");
  }

  LibraryRecord rec;
  rec.problem_id = stored.id;
  rec.file = "problems/" + file_stem_for(stored.id) + ".json";
  rec.problem = std::move(stored);
  rec.solution = s;
  rec.created = now_utc();
  rec.tags = std::move(tags);

  Json doc{{"problem", problem_to_json(rec.problem)}};
  if (rec.solution) doc["solution"] = solution_to_json(rec.problem.tree, *rec.solution);
  doc["metadata"] = Json{{"created", rec.created}, {"tags", rec.tags}};
  write_atomic(root_ / rec.file, doc.dump(2) + "\n");

  records_.push_back(std::move(rec));
  try {
    write_index();
  } catch (...) {
    records_.pop_back();
    throw;
  }
  return records_.back().problem_id;
}

void ProblemLibrary::write_index() const {
  Json index = Json::array();
  for (const auto& r : records_) {
    index.push_back({{"problem_id", r.problem_id},
                     {"file", r.file},
                     {"has_solution", r.solution.has_value()},
                     {"tags", r.tags}});
  }
  write_atomic(root_ / "index.json", index.dump(2) + "\n");
}

std::vector<Neighbor> nearest_problems(const ProblemLibrary& lib, const TreeProblem& query,
                                       const MetricWeights& w, std::size_t limit) {
  const auto q = canonicalize(query);
  const auto k = q.tree.tip_count();
  const auto m = q.tree.feature_arity();
  const auto query_tips = q.tree.tips();

  std::vector<Neighbor> out;
  for (const auto& rec : lib.records()) {
    const auto& tree = rec.problem.tree;
    if (tree.tip_count() != k || tree.feature_arity() != m) continue;
    Neighbor n;
    n.problem_id = rec.problem_id;
    // Prefer a structural alignment so permuted twins line up; shared labels
    // without one fall back to the identity.
    auto alignment = match_tips(rec.problem, q);
    if (!alignment && tree.tips() == query_tips) {
      alignment.emplace();
      for (const auto& t : query_tips) alignment->emplace(t, t);
    }
    if (!alignment) continue;
    std::unordered_map<std::string, std::string> rename(alignment->begin(), alignment->end());
    n.distance = tree_distance(q.tree, relabel_tips(tree, rename), w);
    n.alignment = std::move(*alignment);
    out.push_back(std::move(n));
  }
  std::stable_sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.problem_id < b.problem_id;
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::optional<TransferResult> transfer_nearest(const ProblemLibrary& lib, const TreeProblem& query,
                                               const MetricWeights& w) {
  const auto q = canonicalize(query);
  for (const auto& n : nearest_problems(lib, q, w, lib.records().size())) {
    const auto* rec = lib.find(n.problem_id);
    if (!rec->solution) continue;
    try {
      return TransferResult{n.problem_id, n.distance,
                            transfer_solution(rec->problem, *rec->solution, q, n.alignment)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BrokenPath && e.code() != ErrorCode::NoCorrespondence) throw;
    }
  }
  return std::nullopt;
}

}  // namespace arbor
