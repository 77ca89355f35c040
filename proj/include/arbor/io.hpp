#pragma once

// JSON and CSV forms of problems, solutions, matrices and morphisms.

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "arbor/characteristic.hpp"
#include "arbor/morphism.hpp"
#include "arbor/problems.hpp"
#include "arbor/solutions.hpp"

namespace arbor {

using Json = nlohmann::ordered_json;

// {id, kind, objective, features: [{name, combinator}], root,
//  nodes: [{id, terminal, labels}], edges: [{from, to, features}]}
Json problem_to_json(const TreeProblem& p);
// `id` and `objective` are optional on input. Throws ParseError.
TreeProblem problem_from_json(const Json& j);
TreeProblem problem_from_text(std::string_view text);

// {problem_id, edge_order: ["parent→child", ...], bits, terminal}
Json solution_to_json(const LabeledTree& tree, const Solution& s);
Solution solution_from_json(const Json& j);

// {source_id, target_id, n, matrix: row-major n*n numbers, residual}
Json morphism_to_json(const Morphism& f);

// Header of column names, then one line per matrix row.
std::string matrix_to_csv(const CharacteristicMatrix& m);
// {source_id, tips, columns, rows: [[...], ...]}
Json matrix_to_json(const CharacteristicMatrix& m);

// Human-readable "a → b → c" rendering of the node path a solution marks.
std::string describe_path(const LabeledTree& tree, const Solution& s);

}  // namespace arbor
