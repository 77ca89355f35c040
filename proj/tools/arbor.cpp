// arbor: command-line front end for the tree-problem library.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "arbor/characteristic.hpp"
#include "arbor/error.hpp"
#include "arbor/format.hpp"
#include "arbor/io.hpp"
#include "arbor/metrics.hpp"
#include "arbor/morphism.hpp"
#include "arbor/problems.hpp"
#include "arbor/transfer.hpp"

namespace {

using namespace arbor;

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::vector<std::string> lambda;
  std::string storage_root;
  bool strict = false;
  std::string format = "json";
};

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TreeProblem load_problem(const std::string& path, bool strict) {
  auto p = problem_from_text(read_input(path));
  validate_problem(p, strict);
  return canonicalize(p);
}

MetricWeights weights_for(const Config& cfg, std::size_t rows) {
  if (cfg.lambda.empty()) return MetricWeights::uniform(rows);
  std::vector<double> values;
  for (const auto& text : cfg.lambda) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw UsageError("--lambda: '" + text + "' is not a number");
    values.push_back(v);
  }
  try {
    MetricWeights w(std::move(values));
    if (w.size() != rows) {
      throw UsageError("--lambda needs " + std::to_string(rows) + " entries, got " + std::to_string(w.size()));
    }
    return w;
  } catch (const Error& e) {
    throw UsageError("--lambda: " + std::string(e.what()));
  }
}

std::string storage_root(const Config& cfg) {
  if (!cfg.storage_root.empty()) return cfg.storage_root;
  if (const char* env = std::getenv("ARBOR_LIB"); env && *env) return env;
  return "arbor-lib";
}

void print_solution(const TreeProblem& p, const Solution& s) {
  std::cout << solution_to_json(p.tree, s).dump(2) << "\n";
  std::cout << "path: " << describe_path(p.tree, s) << "\n";
}

std::string matrix_text(const CharacteristicMatrix& m) {
  const auto names = m.column_names();
  std::vector<std::vector<std::string>> cells{names};
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<std::string> row;
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(format_number(m.entries()(r, c)));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(names.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += std::string(width[c] - row[c].size(), ' ') + row[c];
    }
    out += line + "\n";
  }
  return out;
}

void cmd_encode(const Config& cfg, const std::string& file) {
  const auto p = load_problem(file, cfg.strict);
  const auto m = characteristic_matrix(p.tree, p.id);
  if (cfg.format == "csv") {
    std::cout << matrix_to_csv(m);
  } else if (cfg.format == "text") {
    std::cout << matrix_text(m);
  } else {
    std::cout << matrix_to_json(m).dump(2) << "\n";
  }
}

void cmd_dist(const Config& cfg, const std::string& a_file, const std::string& b_file) {
  const auto a = load_problem(a_file, cfg.strict);
  const auto b = load_problem(b_file, cfg.strict);
  const auto w = weights_for(cfg, a.tree.feature_arity() + 1);
  std::cout << format_number(tree_distance(a.tree, b.tree, w)) << "\n";
}

void cmd_morph(const Config& cfg, const std::string& a_file, const std::string& b_file) {
  const auto a = load_problem(a_file, cfg.strict);
  const auto b = load_problem(b_file, cfg.strict);
  const auto f = compute_morphism(characteristic_matrix(a.tree, a.id), characteristic_matrix(b.tree, b.id));
  std::cout << morphism_to_json(f).dump(2) << "\n";
}

void cmd_solve(const Config& cfg, const std::string& file) {
  const auto p = load_problem(file, cfg.strict);
  print_solution(p, solve(p));
}

void cmd_maze2tree(const std::string& file) {
  const auto p = maze_to_tree(parse_maze(read_input(file)));
  std::cout << problem_to_json(p).dump(2) << "\n";
}

void cmd_lib_add(const Config& cfg, const std::string& file, bool with_solve, const std::string& solution_file,
                 const std::vector<std::string>& tags) {
  if (with_solve && !solution_file.empty()) throw UsageError("--solve and --solution are exclusive");
  auto lib = ProblemLibrary::open(storage_root(cfg));
  const auto p = load_problem(file, cfg.strict);
  std::optional<Solution> s;
  if (with_solve) s = solve(p);
  if (!solution_file.empty()) {
    try {
      s = solution_from_json(Json::parse(read_input(solution_file)));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, std::string("invalid solution JSON: ") + e.what());
    }
  }
  std::cout << lib.add(p, s, tags) << "\n";
}

void cmd_lib_list(const Config& cfg) {
  const auto lib = ProblemLibrary::open(storage_root(cfg));
  for (const auto& r : lib.records()) {
    std::string tags;
    for (const auto& t : r.tags) tags += (tags.empty() ? "" : ",") + t;
    std::cout << r.problem_id << "\t" << to_string(r.problem.kind) << "\t"
              << (r.solution ? "solved" : "unsolved") << "\t" << tags << "\n";
  }
}

void cmd_lib_nearest(const Config& cfg, const std::string& query_file, std::size_t limit) {
  if (limit == 0) throw UsageError("--limit must be positive");
  const auto lib = ProblemLibrary::open(storage_root(cfg));
  const auto q = load_problem(query_file, cfg.strict);
  const auto w = weights_for(cfg, q.tree.feature_arity() + 1);
  for (const auto& n : nearest_problems(lib, q, w, limit))
    std::cout << n.problem_id << "\t" << format_number(n.distance) << "\n";
}

void cmd_lib_transfer(const Config& cfg, const std::string& query_file) {
  const auto lib = ProblemLibrary::open(storage_root(cfg));
  const auto q = load_problem(query_file, cfg.strict);
  const auto w = weights_for(cfg, q.tree.feature_arity() + 1);
  const auto result = transfer_nearest(lib, q, w);
  if (!result) fail(ErrorCode::NoCorrespondence, "no solved problem in the library aligns with the query");
  std::cerr << "source: " << result->source_id << " (distance " << format_number(result->distance) << ")\n";
  print_solution(q, result->solution);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encode, compare, solve and transfer rooted tree problems"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--lib", cfg.storage_root, "Library directory (default: $ARBOR_LIB or ./arbor-lib)");
  app.add_flag("--strict", cfg.strict, "Require decision-tree sibling probabilities to sum to 1");
  app.fallthrough();

  std::string file_a, file_b, solution_file, query;
  std::vector<std::string> tags;
  bool with_solve = false;
  std::size_t limit = 5;

  auto* encode = app.add_subcommand("encode", "Print the characteristic matrix of a problem");
  encode->add_option("problem", file_a, "Problem JSON or - for stdin")->required();
  encode->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));

  auto* dist = app.add_subcommand("dist", "Distance between two problems");
  dist->add_option("a", file_a)->required();
  dist->add_option("b", file_b)->required();

  auto* morph = app.add_subcommand("morph", "Morphism from one problem's matrix to another's");
  morph->add_option("a", file_a)->required();
  morph->add_option("b", file_b)->required();

  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem and print its solution path");
  solve_cmd->add_option("problem", file_a, "Problem JSON or - for stdin")->required();

  auto* maze = app.add_subcommand("maze2tree", "Convert a text maze into a problem");
  maze->add_option("maze", file_a, "Maze text or - for stdin")->required();

  auto* lib = app.add_subcommand("lib", "Problem library");
  lib->require_subcommand(1);
  lib->fallthrough();
  auto* lib_add = lib->add_subcommand("add", "Store a problem");
  lib_add->add_option("problem", file_a)->required();
  lib_add->add_flag("--solve", with_solve, "Store the solver's solution with it");
  lib_add->add_option("--solution", solution_file, "Store this solution JSON with it");
  lib_add->add_option("--tag", tags, "Tag (repeatable)");
  auto* lib_list = lib->add_subcommand("list", "List stored problems");
  auto* lib_nearest = lib->add_subcommand("nearest", "Rank stored problems by distance to a query");
  lib_nearest->add_option("--query", query)->required();
  lib_nearest->add_option("--limit", limit);
  auto* lib_transfer = lib->add_subcommand("transfer", "Transfer the nearest stored solution to a query");
  lib_transfer->add_option("--query", query)->required();

  for (auto* sub : {dist, lib_nearest, lib_transfer})
    sub->add_option("--lambda", cfg.lambda, "Metric weights, comma separated or repeated")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*encode) cmd_encode(cfg, file_a);
    else if (*dist) cmd_dist(cfg, file_a, file_b);
    else if (*morph) cmd_morph(cfg, file_a, file_b);
    else if (*solve_cmd) cmd_solve(cfg, file_a);
    else if (*maze) cmd_maze2tree(file_a);
    else if (*lib_add) cmd_lib_add(cfg, file_a, with_solve, solution_file, tags);
    else if (*lib_list) cmd_lib_list(cfg);
    else if (*lib_nearest) cmd_lib_nearest(cfg, query, limit);
    else if (*lib_transfer) cmd_lib_transfer(cfg, query);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kDomainError;
  }
  return 0;
}
