#include <doctest.h>

#include "arbor/error.hpp"
#include "arbor/format.hpp"
#include "arbor/io.hpp"
#include "support.hpp"

using namespace arbor;

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

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("number formatting is shortest round trip") {
    CHECK(format_number(0.4) == "0.4");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_number(1e-20) == "1e-20");
  }

  TEST_CASE("sample matrix CSV") {
    const auto m = characteristic_matrix(testing::sample_tree());
    CHECK(matrix_to_csv(m) ==
          "ab,ac,ad,bc,bd,cd,p_a,p_b,p_c,p_d\n"
          "1,0,0,0,0,1,1,1,1,1\n"
          "0.4,0,0,0,0,2.5,1.2,3.1,5.7,1\n");
    const auto j = matrix_to_json(m);
    CHECK(j["columns"].size() == 10);
    CHECK(j["rows"][1][0] == 0.4);
  }

  TEST_CASE("problem JSON round trip") {
    testing::Rng rng(71);
    for (int round = 0; round < 50; ++round) {
      const auto p = testing::random_decision_problem(rng, 2 + round % 7);
      const auto back = problem_from_text(problem_to_json(p).dump());
      CHECK(back.id == p.id);
      CHECK(back.kind == p.kind);
      CHECK(back.objective == p.objective);
      CHECK(tree_equal(back.tree, p.tree));
      CHECK(fingerprint(back.tree) == fingerprint(p.tree));
    }
    const auto maze = maze_to_tree(parse_maze("#######\n#S...G#\n###.###\n#######"));
    const auto back = problem_from_json(problem_to_json(maze));
    CHECK(back.goal_tips == maze.goal_tips);
    CHECK(back.kind == ProblemKind::maze);
  }

  TEST_CASE("problem JSON errors") {
    CHECK(code_of([] { problem_from_text("{"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { problem_from_text("[]"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { problem_from_text(R"({"kind":"generic"})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] {
            problem_from_text(R"({"kind":"odd","features":[],"root":"r","nodes":[],"edges":[]})");
          }) == ErrorCode::ParseError);
    CHECK(code_of([] {
            problem_from_text(
                R"({"kind":"generic","features":[{"name":"x","combinator":"max"}],"root":"r","nodes":[],"edges":[]})");
          }) == ErrorCode::ParseError);
    CHECK(code_of([] {
            problem_from_text(
                R"({"kind":"generic","features":[{"name":"x","combinator":"additive"}],"root":"r",)"
                R"("nodes":[{"id":"r","terminal":false}],"edges":[{"from":"r","to":"q","features":[1]}]})");
          }) == ErrorCode::UnknownNode);
  }

  TEST_CASE("solution JSON round trip") {
    const auto t = testing::sample_tree();
    const auto s = encode_path(t, "c", "sample");
    const auto j = solution_to_json(t, s);
    CHECK(j["terminal"] == "c");
    CHECK(j["edge_order"][3] == "r→alpha");
    CHECK(solution_from_json(j) == s);
    auto broken = j;
    broken["bits"][0] = 2;
    CHECK(code_of([&] { solution_from_json(broken); }) == ErrorCode::InvalidSolution);
    const auto odd = solution_to_json(t, Solution({1, 0, 0, 0, 0, 0}, edge_order_ref(t), ""));
    CHECK(odd["terminal"].is_null());
  }

  TEST_CASE("morphism JSON and path description") {
    const auto m = characteristic_matrix(testing::sample_tree(), "sample");
    const auto j = morphism_to_json(identity_morphism(m));
    CHECK(j["n"] == 10);
    CHECK(j["matrix"].size() == 100);
    CHECK(j["matrix"][11] == 1.0);
    CHECK(j["residual"] == 0.0);
    CHECK(describe_path(testing::sample_tree(), encode_path(testing::sample_tree(), "d")) == "r → alpha → d");
  }

  TEST_CASE("error codes have stable names") {
    CHECK(to_string(ErrorCode::InvalidSchema) == "InvalidSchema");
    CHECK(to_string(ErrorCode::NotSimplyConnected) == "NotSimplyConnected");
    CHECK(to_string(ErrorCode::ParseError) == "ParseError");
  }
}
