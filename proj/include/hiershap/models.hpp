#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hiershap/game.hpp"
#include "hiershap/image.hpp"
#include "hiershap/masked_game.hpp"

namespace hiershap::models {

enum class GameKind { kAdditive, kUnanimity, kMajority, kCrossGroup, kRandom };

std::string to_string(GameKind kind);
GameKind parse_game_kind(const std::string& name);

// Parameters for the synthetic fixtures. Which fields matter depends on kind:
//   additive      v(S) = sum_{i in S} coefficients[i]
//   unanimity     v(S) = [members subset of S]
//   majority      v(S) = [|S| >= quota]               (quota 0: n/2 + 1)
//   cross-group   v(S) = strength * [S meets every group]
//   random        v(S) ~ U[-1, 1] per mask from `seed`, v(empty) = 0
struct SyntheticGameSpec {
  GameKind kind = GameKind::kAdditive;
  int n_features = 0;
  std::vector<double> coefficients;
  std::vector<int> members;
  int quota = 0;
  std::vector<std::vector<int>> groups;
  double strength = 1.0;
  std::uint64_t seed = 0;
};

// Throws InvalidInput for parameters that do not fit the kind.
ValueFunction make_synthetic_game(const SyntheticGameSpec& spec);

ValueFunction additive_game(std::vector<double> coefficients);
ValueFunction unanimity_game(int n_features, std::vector<int> members);
ValueFunction majority_game(int n_features, int quota = 0);
ValueFunction random_game(int n_features, std::uint64_t seed);

// Closed-form Shapley values where one exists (additive, unanimity,
// majority); nullopt otherwise.
std::optional<std::vector<double>> closed_form_shapley(const SyntheticGameSpec& spec);

// Dense 2^n value table of a random game; v(empty) = 0.
std::vector<double> random_game_table(int n_features, std::uint64_t seed);
// Game backed by an explicit 2^n table indexed by the mask bits.
ValueFunction table_game(int n_features, std::vector<double> table);

SyntheticGameSpec synthetic_game_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SyntheticGameSpec& spec);

// --- toy image scorers -----------------------------------------------------

// sum_p w_p * sum_c masked(p, c). Empty weights means all ones.
ImageScorer pixel_sum_scorer(std::vector<double> weights = {});

// Mean intensity of the masked image inside [x0, x1] x [y0, y1] (inclusive).
ImageScorer template_mean_scorer(int x0, int y0, int x1, int y1);

// Mean gray intensity over the retained pixels only; 0 when none retained.
ImageScorer retained_mean_scorer();

// Number of regions whose pixels are all retained. Regions are row-major
// pixel-index lists and must be pairwise disjoint.
ImageScorer make_group_and_scorer(const std::vector<std::vector<int>>& regions);

// Built-in names: "sum", "retained-mean", "template-mean:x0,y0,x1,y1".
// Anything ending in ".json" is read as a fixture document:
//   {"kind": "pixel-sum-weighted", "weights": [...]}
//   {"kind": "template-mean", "region": [x0, y0, x1, y1]}
//   {"kind": "retained-mean"}
//   {"kind": "group-and", "regions": [[...], ...]}
ImageScorer parse_scorer(const std::string& spec, const Image& image);
ImageScorer scorer_from_json(const nlohmann::json& doc, const Image& image);

}  // namespace hiershap::models
