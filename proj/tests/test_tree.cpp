#include <doctest.h>

#include "arbor/error.hpp"
#include "arbor/tree.hpp"
#include "support.hpp"

using namespace arbor;
using testing::sample_tree;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an arbor::Error");
  return ErrorCode::ParseError;
}

FeatureSchema lengths() { return FeatureSchema({{"length", Combinator::additive}}); }

LabeledTree build(std::string root, std::vector<std::pair<std::string, bool>> nodes, std::vector<Edge> edges,
                  FeatureSchema schema = lengths()) {
  std::vector<Node> ns;
  for (auto& [id, terminal] : nodes) ns.push_back({id, terminal ? NodeKind::terminal : NodeKind::internal, {}});
  return LabeledTree(std::move(root), std::move(ns), std::move(edges), std::move(schema));
}

LabeledTree scaled(const LabeledTree& t, double c) {
  std::vector<Edge> edges(t.edges().begin(), t.edges().end());
  for (auto& e : edges)
    for (auto& f : e.features) f *= c;
  return LabeledTree(t.root(), {t.nodes().begin(), t.nodes().end()}, std::move(edges), t.schema());
}

// Same tree with every internal id prefixed and child declarations reversed.
LabeledTree shuffled_copy(const LabeledTree& t) {
  auto rename = [&](const std::string& id) { return t.node(id).terminal() ? id : "x_" + id; };
  std::vector<Node> nodes(t.nodes().rbegin(), t.nodes().rend());
  for (auto& n : nodes) n.id = rename(n.id);
  std::vector<Edge> edges(t.edges().rbegin(), t.edges().rend());
  for (auto& e : edges) {
    e.parent = rename(e.parent);
    e.child = rename(e.child);
  }
  return LabeledTree(rename(t.root()), std::move(nodes), std::move(edges), t.schema());
}

}  // namespace

TEST_SUITE("tree_core") {
  TEST_CASE("feature schema rejects empty and repeated names") {
    CHECK(code_of([] { FeatureSchema({{"", Combinator::additive}}); }) == ErrorCode::InvalidSchema);
    CHECK(code_of([] { FeatureSchema({{"x", Combinator::additive}, {"x", Combinator::multiplicative}}); }) ==
          ErrorCode::InvalidSchema);
    const FeatureSchema s({{"len", Combinator::additive}, {"p", Combinator::multiplicative}});
    CHECK(s.neutral(0) == 0.0);
    CHECK(s.neutral(1) == 1.0);
    CHECK(s.combine(0, 2.0, 3.0) == 5.0);
    CHECK(s.combine(1, 0.5, 0.5) == 0.25);
  }

  TEST_CASE("validate accepts the sample tree and a single edge") {
    CHECK_NOTHROW(validate(sample_tree()));
    CHECK_NOTHROW(validate(build("r", {{"r", false}, {"a", true}}, {{"r", "a", {1.0}}})));
  }

  TEST_CASE("validate reports each structural violation") {
    SUBCASE("cycle") {
      auto t = build("r", {{"r", false}, {"x", false}, {"y", false}, {"a", true}},
                     {{"r", "a", {1.0}}, {"x", "y", {1.0}}, {"y", "x", {1.0}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::CycleDetected);
    }
    SUBCASE("edge back into the root") {
      auto t = build("r", {{"r", false}, {"x", false}, {"a", true}},
                     {{"r", "x", {1.0}}, {"x", "a", {1.0}}, {"x", "r", {1.0}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::CycleDetected);
    }
    SUBCASE("two parents") {
      auto t = build("r", {{"r", false}, {"x", false}, {"a", true}},
                     {{"r", "x", {1.0}}, {"r", "a", {1.0}}, {"x", "a", {1.0}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::MultipleParents);
    }
    SUBCASE("unreachable") {
      auto t = build("r", {{"r", false}, {"a", true}, {"b", true}}, {{"r", "a", {1.0}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::UnreachableNode);
    }
    SUBCASE("terminal with a child") {
      auto t = build("r", {{"r", false}, {"a", true}, {"b", true}}, {{"r", "a", {1.0}}, {"a", "b", {1.0}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::TerminalHasChild);
    }
    SUBCASE("internal leaf") {
      auto t = build("r", {{"r", false}, {"a", true}, {"x", false}}, {{"r", "a", {1.0}}, {"r", "x", {1.0}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::InternalWithoutChild);
    }
    SUBCASE("feature arity") {
      auto t = build("r", {{"r", false}, {"a", true}}, {{"r", "a", {1.0, 2.0}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::FeatureArityMismatch);
    }
    SUBCASE("non-finite feature") {
      auto t = build("r", {{"r", false}, {"a", true}}, {{"r", "a", {std::nan("")}}});
      CHECK(code_of([&] { validate(t); }) == ErrorCode::NonFiniteFeature);
    }
    SUBCASE("construction-time errors") {
      CHECK(code_of([] { build("r", {{"r", false}, {"r", true}}, {}); }) == ErrorCode::DuplicateNode);
      CHECK(code_of([] { build("r", {{"r", false}}, {{"r", "zz", {1.0}}}); }) == ErrorCode::UnknownNode);
      CHECK(code_of([] { build("q", {{"r", false}}, {}); }) == ErrorCode::UnknownNode);
    }
  }

  TEST_CASE("mrca on the sample tree") {
    const auto t = sample_tree();
    CHECK(mrca(t, "a", "b") == "beta");
    CHECK(mrca(t, "a", "c") == "r");
    CHECK(mrca(t, "c", "d") == "alpha");
    CHECK(mrca(t, "d", "b") == mrca(t, "b", "d"));
    CHECK(code_of([&] { mrca(t, "a", "a"); }) == ErrorCode::SameTip);
    CHECK(code_of([&] { mrca(t, "a", "beta"); }) == ErrorCode::NotATerminal);
    CHECK(code_of([&] { mrca(t, "a", "nope"); }) == ErrorCode::NotATerminal);
    CHECK(depth(t, "r") == 0);
    CHECK(depth(t, "c") == 2);
  }

  TEST_CASE("same_topology and tree_equal") {
    const auto t = sample_tree();
    CHECK(same_topology(t, t));
    CHECK(same_topology(t, scaled(t, 2.0)));
    CHECK_FALSE(tree_equal(t, scaled(t, 2.0)));
    CHECK(tree_equal(t, t));
    CHECK(tree_equal(t, shuffled_copy(t)));

    // c moved under beta: {a,b,c} becomes a cluster.
    auto moved = build("r", {{"r", false}, {"beta", false}, {"g", false}, {"a", true}, {"b", true}, {"c", true}, {"d", true}},
                       {{"r", "beta", {0.4}},
                        {"beta", "g", {0.0}},
                        {"g", "a", {1.2}},
                        {"g", "b", {3.1}},
                        {"beta", "c", {5.7}},
                        {"r", "d", {3.5}}});
    CHECK_FALSE(same_topology(t, moved));

    std::vector<Edge> edges(t.edges().begin(), t.edges().end());
    edges.back().features = {2.0};  // alpha→d
    const LabeledTree changed(t.root(), {t.nodes().begin(), t.nodes().end()}, edges, t.schema());
    CHECK(same_topology(t, changed));
    CHECK_FALSE(tree_equal(t, changed));

    const auto other_tips = relabel_tips(t, {{"a", "z"}});
    CHECK_FALSE(same_topology(t, other_tips));
  }

  TEST_CASE("same_topology is an equivalence on random trees") {
    testing::Rng rng(11);
    for (int round = 0; round < 200; ++round) {
      std::uniform_int_distribution<std::size_t> k(2, 8);
      const auto n = k(rng);
      const auto a = testing::random_tree(rng, n, 1);
      const auto b = testing::random_tree(rng, n, 1);
      const auto c = testing::random_tree(rng, n, 1);
      CHECK(same_topology(a, a));
      CHECK(same_topology(a, b) == same_topology(b, a));
      if (same_topology(a, b) && same_topology(b, c)) CHECK(same_topology(a, c));
      CHECK(same_topology(a, shuffled_copy(a)));
    }
  }

  TEST_CASE("binarize splits a trifurcation with neutral edges") {
    auto t = build("r", {{"r", false}, {"c1", true}, {"c2", true}, {"c3", true}},
                   {{"r", "c1", {1.0}}, {"r", "c2", {2.0}}, {"r", "c3", {3.0}}});
    const auto b = binarize(t);
    CHECK(is_binary(b));
    CHECK(b.root() == "r");
    REQUIRE(b.edges().size() == 4);
    const auto aux = b.parent_index(b.parent_edges(b.index_of("c2")).front());
    CHECK(b.node_at(aux).id != "r");
    CHECK(b.node_at(b.parent_index(b.parent_edges(aux).front())).id == "r");
    CHECK(b.node_at(b.parent_index(b.parent_edges(b.index_of("c3")).front())).id == b.node_at(aux).id);
    const auto order = canonical_edge_order(b);
    CHECK(order[0].child == "c1");
    CHECK(order[0].features == std::vector<double>{1.0});
    CHECK(order[1].features == std::vector<double>{0.0});
    CHECK(order[2].features == std::vector<double>{2.0});
    CHECK(order[3].features == std::vector<double>{3.0});
  }

  TEST_CASE("binarize collapses unary chains by the combinator") {
    auto t = build("r", {{"r", false}, {"x", false}, {"y", false}, {"a", true}, {"b", true}},
                   {{"r", "x", {2.0}}, {"x", "a", {3.0}}, {"r", "y", {1.0}}, {"y", "b", {1.5}}});
    const auto b = binarize(t);
    CHECK(b.edges().size() == 2);
    CHECK(path_aggregate(b, "a", 0) == 5.0);
    CHECK(path_aggregate(b, "b", 0) == 2.5);

    auto m = build("r", {{"r", false}, {"x", false}, {"a", true}, {"b", true}},
                   {{"r", "x", {0.5}}, {"x", "a", {0.5}}, {"r", "b", {0.25}}},
                   FeatureSchema({{"p", Combinator::multiplicative}}));
    const auto mb = binarize(m);
    CHECK(mb.edges().size() == 2);
    CHECK(path_aggregate(mb, "a", 0) == 0.25);
  }

  TEST_CASE("binarize absorbs a unary root and rejects degenerate trees") {
    auto t = build("r", {{"r", false}, {"x", false}, {"a", true}, {"b", true}},
                   {{"r", "x", {2.0}}, {"x", "a", {3.0}}, {"x", "b", {4.0}}});
    const auto b = binarize(t);
    CHECK(b.root() == "r");
    CHECK(is_binary(b));
    CHECK(b.edges().size() == 2);

    CHECK(code_of([] { binarize(LabeledTree()); }) == ErrorCode::EmptyTree);
    CHECK(code_of([] { binarize(build("a", {{"a", true}}, {})); }) == ErrorCode::RootIsTerminal);
  }

  TEST_CASE("binarize leaves binary trees alone and is idempotent") {
    CHECK(tree_equal(binarize(sample_tree()), sample_tree()));
    testing::Rng rng(5);
    std::uniform_int_distribution<int> fan(1, 4);
    std::uniform_real_distribution<double> len(0.0, 5.0);
    for (int round = 0; round < 100; ++round) {
      // Random n-ary tree with unary chains.
      std::vector<std::pair<std::string, bool>> nodes{{"r", false}};
      std::vector<Edge> edges;
      std::vector<std::string> open{"r"};
      int next = 0, tips = 0;
      while (!open.empty()) {
        const auto u = open.back();
        open.pop_back();
        const int kids = nodes.size() > 25 ? 0 : fan(rng);
        for (int i = 0; i < kids; ++i) {
          const bool terminal = std::uniform_int_distribution<int>(0, 2)(rng) == 0;
          const auto id = terminal ? "a" + std::to_string(tips++) : "n" + std::to_string(next++);
          nodes.push_back({id, terminal});
          edges.push_back({u, id, {len(rng)}});
          if (!terminal) open.push_back(id);
        }
        if (kids == 0) {
          // Turn the dangling internal node into a pair of tips.
          for (int i = 0; i < 2; ++i) {
            const auto id = "a" + std::to_string(tips++);
            nodes.push_back({id, true});
            edges.push_back({u, id, {len(rng)}});
          }
        }
      }
      const auto t = build("r", nodes, edges);
      validate(t);
      if (t.tips().size() < 2) continue;  // a lone tip has no binary form
      const auto b = binarize(t);
      CHECK_NOTHROW(validate(b));
      CHECK(is_binary(b));
      CHECK(b.tips() == t.tips());
      CHECK(tree_equal(binarize(b), b));
      for (const auto& tip : t.tips()) CHECK(path_aggregate(b, tip, 0) == doctest::Approx(path_aggregate(t, tip, 0)));
    }
  }

  TEST_CASE("canonical edge order follows the smallest tip label") {
    const auto t = sample_tree();
    const auto order = canonical_edge_order(t);
    const std::vector<std::pair<std::string, std::string>> expected{
        {"r", "beta"}, {"beta", "a"}, {"beta", "b"}, {"r", "alpha"}, {"alpha", "c"}, {"alpha", "d"}};
    REQUIRE(order.size() == expected.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      CHECK(order[i].parent == expected[i].first);
      CHECK(order[i].child == expected[i].second);
    }
    CHECK(edge_order_labels(t).front() == "r→beta");

    std::vector<Edge> mirrored(t.edges().rbegin(), t.edges().rend());
    const LabeledTree m(t.root(), {t.nodes().begin(), t.nodes().end()}, mirrored, t.schema());
    CHECK(canonical_edge_order(m) == order);
    CHECK(edge_order_ref(m) == edge_order_ref(t));

    const auto single = build("r", {{"r", false}, {"a", true}}, {{"r", "a", {1.0}}});
    REQUIRE(canonical_edge_order(single).size() == 1);
  }

  TEST_CASE("canonical order ignores declaration order and internal ids") {
    testing::Rng rng(3);
    for (int round = 0; round < 100; ++round) {
      const auto t = testing::random_tree(rng, 2 + round % 7, 2);
      const auto s = shuffled_copy(t);
      const auto a = canonical_edge_order(t);
      const auto b = canonical_edge_order(s);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].features == b[i].features);
        CHECK((t.node(a[i].child).terminal() ? a[i].child == b[i].child : "x_" + a[i].child == b[i].child));
      }
      CHECK(fingerprint(t) != fingerprint(s));
      CHECK(fingerprint(t) == fingerprint(t));
    }
  }
}
