#include "hiershap/models.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <set>

#include "hiershap/errors.hpp"

namespace hiershap::models {
namespace {

void check_index(int i, int n) {
  if (i < 0 || i >= n) {
    throw InvalidInput("feature index " + std::to_string(i) + " outside [0, " +
                       std::to_string(n) + ")");
  }
}

}  // namespace

std::string to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kAdditive: return "additive";
    case GameKind::kUnanimity: return "unanimity";
    case GameKind::kMajority: return "majority";
    case GameKind::kCrossGroup: return "cross-group-interaction";
    case GameKind::kRandom: return "random-seeded";
  }
  return "unknown";
}

GameKind parse_game_kind(const std::string& name) {
  if (name == "additive") return GameKind::kAdditive;
  if (name == "unanimity") return GameKind::kUnanimity;
  if (name == "majority") return GameKind::kMajority;
  if (name == "cross-group-interaction" || name == "cross-group") return GameKind::kCrossGroup;
  if (name == "random-seeded" || name == "random") return GameKind::kRandom;
  throw InvalidInput("unknown synthetic game kind '" + name + "'");
}

std::vector<double> random_game_table(int n_features, std::uint64_t seed) {
  if (n_features < 1 || n_features > 20) {
    throw InvalidInput("random games support 1..20 features (dense 2^n table)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> table(std::size_t{1} << n_features);
  for (auto& v : table) v = dist(rng);
  table[0] = 0.0;
  return table;
}

ValueFunction table_game(int n_features, std::vector<double> table) {
  if (n_features < 1 || n_features > 30 || table.size() != (std::size_t{1} << n_features)) {
    throw InvalidInput("table game needs exactly 2^n values");
  }
  auto shared = std::make_shared<const std::vector<double>>(std::move(table));
  return ValueFunction(n_features, [shared](const CoalitionMask& s) {
    return (*shared)[s.low_bits()];
  });
}

ValueFunction make_synthetic_game(const SyntheticGameSpec& spec) {
  switch (spec.kind) {
    case GameKind::kAdditive: {
      if (spec.coefficients.empty()) throw InvalidInput("additive game needs coefficients");
      if (spec.n_features != 0 && spec.n_features != static_cast<int>(spec.coefficients.size())) {
        throw InvalidInput("additive game: n_features does not match coefficient count");
      }
      auto c = std::make_shared<const std::vector<double>>(spec.coefficients);
      return ValueFunction(c->size(), [c](const CoalitionMask& s) {
        double v = 0.0;
        for (int i : s.indices()) v += (*c)[i];
        return v;
      });
    }
    case GameKind::kUnanimity: {
      const int n = spec.n_features;
      if (n < 1 || spec.members.empty()) throw InvalidInput("unanimity game needs n_features and members");
      for (int i : spec.members) check_index(i, n);
      const CoalitionMask carrier = CoalitionMask::from_indices(n, spec.members);
      return ValueFunction(n, [carrier](const CoalitionMask& s) {
        return carrier.is_subset_of(s) ? 1.0 : 0.0;
      });
    }
    case GameKind::kMajority: {
      const int n = spec.n_features;
      if (n < 1) throw InvalidInput("majority game needs n_features");
      const int quota = spec.quota > 0 ? spec.quota : n / 2 + 1;
      if (quota > n) throw InvalidInput("majority quota exceeds n_features");
      return ValueFunction(n, [quota](const CoalitionMask& s) {
        return static_cast<int>(s.count()) >= quota ? 1.0 : 0.0;
      });
    }
    case GameKind::kCrossGroup: {
      const int n = spec.n_features;
      if (n < 1 || spec.groups.empty()) throw InvalidInput("cross-group game needs n_features and groups");
      std::vector<CoalitionMask> groups;
      for (const auto& g : spec.groups) {
        if (g.empty()) throw InvalidInput("cross-group game: empty group");
        for (int i : g) check_index(i, n);
        groups.push_back(CoalitionMask::from_indices(n, g));
      }
      const double strength = spec.strength;
      return ValueFunction(n, [groups, strength](const CoalitionMask& s) {
        for (const auto& g : groups) {
          if ((g & s).empty()) return 0.0;
        }
        return strength;
      });
    }
    case GameKind::kRandom:
      return table_game(spec.n_features, random_game_table(spec.n_features, spec.seed));
  }
  throw InvalidInput("unknown synthetic game kind");
}

ValueFunction additive_game(std::vector<double> coefficients) {
  SyntheticGameSpec spec;
  spec.kind = GameKind::kAdditive;
  spec.coefficients = std::move(coefficients);
  return make_synthetic_game(spec);
}

ValueFunction unanimity_game(int n_features, std::vector<int> members) {
  SyntheticGameSpec spec;
  spec.kind = GameKind::kUnanimity;
  spec.n_features = n_features;
  spec.members = std::move(members);
  return make_synthetic_game(spec);
}

ValueFunction majority_game(int n_features, int quota) {
  SyntheticGameSpec spec;
  spec.kind = GameKind::kMajority;
  spec.n_features = n_features;
  spec.quota = quota;
  return make_synthetic_game(spec);
}

ValueFunction random_game(int n_features, std::uint64_t seed) {
  SyntheticGameSpec spec;
  spec.kind = GameKind::kRandom;
  spec.n_features = n_features;
  spec.seed = seed;
  return make_synthetic_game(spec);
}

std::optional<std::vector<double>> closed_form_shapley(const SyntheticGameSpec& spec) {
  switch (spec.kind) {
    case GameKind::kAdditive:
      return spec.coefficients;
    case GameKind::kUnanimity: {
      std::vector<double> phi(spec.n_features, 0.0);
      const std::set<int> carrier(spec.members.begin(), spec.members.end());
      for (int i : carrier) phi[i] = 1.0 / static_cast<double>(carrier.size());
      return phi;
    }
    case GameKind::kMajority:
      // Symmetric game: v(N) - v(empty) = 1 split evenly.
      return std::vector<double>(spec.n_features, 1.0 / spec.n_features);
    default:
      return std::nullopt;
  }
}

SyntheticGameSpec synthetic_game_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) {
    throw InvalidInput("game fixture needs a 'kind' field");
  }
  SyntheticGameSpec spec;
  try {
    spec.kind = parse_game_kind(doc.at("kind").get<std::string>());
    spec.n_features = doc.value("n_features", 0);
    spec.coefficients = doc.value("coefficients", std::vector<double>{});
    spec.members = doc.value("members", std::vector<int>{});
    spec.quota = doc.value("quota", 0);
    spec.groups = doc.value("groups", std::vector<std::vector<int>>{});
    spec.strength = doc.value("strength", 1.0);
    spec.seed = doc.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed game fixture: ") + e.what());
  }
  if (spec.kind == GameKind::kAdditive && spec.n_features == 0) {
    spec.n_features = static_cast<int>(spec.coefficients.size());
  }
  return spec;
}

nlohmann::json to_json(const SyntheticGameSpec& spec) {
  nlohmann::json doc{{"kind", to_string(spec.kind)}, {"n_features", spec.n_features}};
  switch (spec.kind) {
    case GameKind::kAdditive: doc["coefficients"] = spec.coefficients; break;
    case GameKind::kUnanimity: doc["members"] = spec.members; break;
    case GameKind::kMajority: doc["quota"] = spec.quota; break;
    case GameKind::kCrossGroup:
      doc["groups"] = spec.groups;
      doc["strength"] = spec.strength;
      break;
    case GameKind::kRandom: doc["seed"] = spec.seed; break;
  }
  return doc;
}

ImageScorer pixel_sum_scorer(std::vector<double> weights) {
  auto w = std::make_shared<const std::vector<double>>(std::move(weights));
  return {"pixel-sum-weighted", [w](const Image& img, const CoalitionMask&) {
            double total = 0.0;
            for (std::size_t p = 0; p < img.pixel_count(); ++p) {
              double s = 0.0;
              for (int c = 0; c < img.channels(); ++c) s += img.sample(p, c);
              total += (w->empty() ? 1.0 : (*w)[p]) * s;
            }
            return total;
          }};
}

ImageScorer template_mean_scorer(int x0, int y0, int x1, int y1) {
  if (x1 < x0 || y1 < y0 || x0 < 0 || y0 < 0) throw InvalidInput("bad template region");
  return {"template-mean", [=](const Image& img, const CoalitionMask&) {
            if (x1 >= img.width() || y1 >= img.height()) {
              throw InvalidInput("template region outside the image");
            }
            double total = 0.0;
            for (int y = y0; y <= y1; ++y) {
              for (int x = x0; x <= x1; ++x) {
                for (int c = 0; c < img.channels(); ++c) total += img.at(x, y, c);
              }
            }
            return total / (static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1) * img.channels());
          }};
}

ImageScorer retained_mean_scorer() {
  return {"retained-mean", [](const Image& img, const CoalitionMask& retained) {
            double total = 0.0;
            std::size_t count = 0;
            const int channels = img.channels();
            retained.for_each([&](std::size_t p) {
              double s = 0.0;
              for (int c = 0; c < channels; ++c) s += img.sample(p, c);
              total += s / channels;
              ++count;
            });
            return count == 0 ? 0.0 : total / static_cast<double>(count);
          },
          false};
}

ImageScorer make_group_and_scorer(const std::vector<std::vector<int>>& regions) {
  std::set<int> seen;
  for (const auto& r : regions) {
    if (r.empty()) throw InvalidInput("group-AND region is empty");
    for (int p : r) {
      if (p < 0) throw InvalidInput("negative pixel index in group-AND region");
      if (!seen.insert(p).second) {
        throw InvalidInput("group-AND regions overlap on pixel " + std::to_string(p));
      }
    }
  }
  auto shared = std::make_shared<const std::vector<std::vector<int>>>(regions);
  return {"group-and", [shared](const Image&, const CoalitionMask& retained) {
            double score = 0.0;
            for (const auto& r : *shared) {
              const bool all = std::all_of(r.begin(), r.end(), [&](int p) {
                return static_cast<std::size_t>(p) < retained.size() && retained.test(p);
              });
              if (all) score += 1.0;
            }
            return score;
          },
          false};
}

namespace {

ImageScorer fitted_template(int x0, int y0, int x1, int y1, const Image& image) {
  if (x1 >= image.width() || y1 >= image.height()) {
    throw InvalidInput("template region outside the " + std::to_string(image.width()) + "x" +
                       std::to_string(image.height()) + " image");
  }
  return template_mean_scorer(x0, y0, x1, y1);
}

}  // namespace

ImageScorer scorer_from_json(const nlohmann::json& doc, const Image& image) {
  if (!doc.is_object() || !doc.contains("kind")) {
    throw InvalidInput("scorer fixture needs a 'kind' field");
  }
  try {
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "pixel-sum-weighted" || kind == "sum") {
      auto weights = doc.value("weights", std::vector<double>{});
      if (!weights.empty() && weights.size() != image.pixel_count()) {
        throw InvalidInput("scorer weights must have one entry per pixel");
      }
      return pixel_sum_scorer(std::move(weights));
    }
    if (kind == "template-mean") {
      const auto r = doc.at("region").get<std::vector<int>>();
      if (r.size() != 4) throw InvalidInput("template region needs [x0, y0, x1, y1]");
      return fitted_template(r[0], r[1], r[2], r[3], image);
    }
    if (kind == "retained-mean") return retained_mean_scorer();
    if (kind == "group-and") {
      return make_group_and_scorer(doc.at("regions").get<std::vector<std::vector<int>>>());
    }
    throw InvalidInput("unknown scorer kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed scorer fixture: ") + e.what());
  }
}

ImageScorer parse_scorer(const std::string& spec, const Image& image) {
  if (spec == "sum") return pixel_sum_scorer();
  if (spec == "retained-mean") return retained_mean_scorer();
  if (spec.rfind("template-mean:", 0) == 0) {
    int x0, y0, x1, y1;
    if (std::sscanf(spec.c_str() + 14, "%d,%d,%d,%d", &x0, &y0, &x1, &y1) != 4) {
      throw InvalidInput("template-mean needs x0,y0,x1,y1");
    }
    return fitted_template(x0, y0, x1, y1, image);
  }
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    std::ifstream in(spec);
    if (!in) throw InvalidInput("cannot open scorer fixture '" + spec + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidInput("scorer fixture is not valid JSON: " + std::string(e.what()));
    }
    return scorer_from_json(doc, image);
  }
  throw InvalidInput("unknown scorer '" + spec + "'");
}

}  // namespace hiershap::models
