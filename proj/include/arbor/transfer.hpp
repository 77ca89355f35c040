#pragma once

// Analogy-based solution transfer.
//
// A solved problem P′ and a new problem P with the same shape are aligned by
// a bijection of tip labels. The bijection induces a bijection of edges (each
// edge is identified by the tips below it), and a solution of P′ maps to a
// candidate solution of P by carrying its marked edges across. Transfer is
// sound when it commutes with solving: solve(P) equals the transferred
// solve(P′). functor_commute_check evaluates exactly that square.

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "arbor/characteristic.hpp"
#include "arbor/problems.hpp"
#include "arbor/solutions.hpp"

namespace arbor {

// Source tip label → target tip label.
using TipBijection = std::map<std::string, std::string>;

// Aligns the two trees' tips. Returns the identity when both trees are equal
// with the same labels; otherwise pairs subtrees of identical shape by the
// order of their edge features (so the alignment survives relabeling and
// monotone rescaling of features). Absent when the shapes differ.
std::optional<TipBijection> match_tips(const TreeProblem& a, const TreeProblem& b);

// Carries `source_sol` onto `target` through match_tips. Throws
// NoCorrespondence, LengthMismatch, InconsistentSolution or BrokenPath.
Solution transfer_solution(const TreeProblem& source, const Solution& source_sol, const TreeProblem& target);
Solution transfer_solution(const TreeProblem& source, const Solution& source_sol, const TreeProblem& target,
                           const TipBijection& bijection);

// Structure-preserving problem transformations.
struct TipRelabel {
  std::map<std::string, std::string> mapping;
};
struct PowerTransform {
  double exponent = 1.0;  // multiplicative feature 0: w ↦ w^exponent
};
struct LengthRescale {
  double factor = 1.0;  // additive feature 0: ℓ ↦ factor·ℓ
};

class ProblemTransform {
 public:
  using Step = std::variant<TipRelabel, PowerTransform, LengthRescale>;

  ProblemTransform() = default;  // identity
  template <typename T>
    requires std::is_constructible_v<Step, T>
  ProblemTransform(T step) : steps_{Step(std::move(step))} {}  // NOLINT(google-explicit-constructor)

  // This transform followed by `next`.
  ProblemTransform then(const ProblemTransform& next) const;
  const std::vector<Step>& steps() const { return steps_; }

 private:
  std::vector<Step> steps_;
};

// Throws InvalidTransform when a step does not fit the problem.
TreeProblem apply_transform(const TreeProblem& p, const ProblemTransform& t);

// solve(t(p)) == transfer_solution(p, solve(p), t(p))
bool functor_commute_check(const TreeProblem& p, const ProblemTransform& t);

struct LibraryRecord {
  std::string problem_id;
  std::string file;  // relative to the storage root
  TreeProblem problem;
  std::optional<Solution> solution;
  std::string created;  // ISO-8601 UTC
  std::vector<std::string> tags;
};

// Solved (or unsolved) problems persisted under a directory:
//   <root>/index.json            [{problem_id, file, has_solution, tags}]
//   <root>/problems/<id>.json    {problem, solution?, metadata}
// Writes go through a temporary file and a rename. One writer at a time.
class ProblemLibrary {
 public:
  // Loads an existing library or starts an empty one (nothing is written
  // until the first add). Throws StorageFailure on unreadable files.
  static ProblemLibrary open(std::filesystem::path storage_root);

  const std::filesystem::path& storage_root() const { return root_; }
  const std::vector<LibraryRecord>& records() const { return records_; }
  const LibraryRecord* find(std::string_view problem_id) const;

  // Stores the binarized problem. Throws DuplicateId, InconsistentSolution
  // (solution does not fit the stored tree) or StorageFailure.
  std::string add(const TreeProblem& p, const std::optional<Solution>& s,
                  std::vector<std::string> tags = {});

 private:
  explicit ProblemLibrary(std::filesystem::path root) : root_(std::move(root)) {}
  void write_index() const;

  std::filesystem::path root_;
  std::vector<LibraryRecord> records_;
};

struct Neighbor {
  std::string problem_id;
  double distance = 0.0;
  TipBijection alignment;  // record tips → query tips
};

// Records with the query's tip count and feature arity whose tips can be
// aligned to the query's, by ascending distance (ties by id).
std::vector<Neighbor> nearest_problems(const ProblemLibrary& lib, const TreeProblem& query,
                                       const MetricWeights& w, std::size_t limit);

struct TransferResult {
  std::string source_id;
  double distance = 0.0;
  Solution solution;
};

// Transfers the solution of the nearest solved record onto `query`. Absent
// when no solved record can be aligned.
std::optional<TransferResult> transfer_nearest(const ProblemLibrary& lib, const TreeProblem& query,
                                               const MetricWeights& w);

}  // namespace arbor
