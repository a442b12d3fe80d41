#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hiershap/errors.hpp"
#include "hiershap/hierarchy.hpp"
#include "hiershap/hierarchy_tools.hpp"
#include "hiershap/image_io.hpp"
#include "hiershap/masked_game.hpp"
#include "hiershap/metrics.hpp"
#include "hiershap/models.hpp"
#include "hiershap/owen.hpp"
#include "hiershap/segmentation.hpp"
#include "hiershap/shapley.hpp"

namespace hiershap::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
  f << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open '" + path.string() + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw InvalidInput("bad " + what + " '" + text + "'");
  }
  return v;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_real(item, what);
    if (v != std::floor(v)) throw InvalidInput("bad " + what + " '" + text + "'");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw InvalidInput("empty " + what);
  return out;
}

seg::SegmentationConfig segmentation_config(const RunConfig& c) {
  seg::SegmentationConfig s;
  s.canny.pct_lower = c.pct_lower;
  s.canny.pct_upper = c.pct_upper;
  s.canny.dilate_ksize = c.dilate;
  s.canny.threshold_basis = seg::parse_threshold_basis(c.threshold_basis);
  s.fanout = c.fanout;
  s.max_depth = c.max_depth;
  if (c.epsilon != "median") s.epsilon = parse_real(c.epsilon, "epsilon");
  s.leaf_expansion = seg::parse_leaf_expansion(c.leaf_expansion);
  if (!(c.pct_lower >= 0.0 && c.pct_lower < c.pct_upper && c.pct_upper <= 100.0)) {
    throw InvalidInput("percentiles need 0 <= pct-lower < pct-upper <= 100");
  }
  return s;
}

struct Source {
  ValueFunction game;
  int width = 0;
  int height = 1;
  std::optional<Image> image;
};

Source load_source(const RunConfig& c) {
  if (!c.game.empty() && !c.input.empty()) {
    throw InvalidInput("give either --input or --game, not both");
  }
  Source src;
  if (!c.game.empty()) {
    const auto spec = models::synthetic_game_from_json(read_json(c.game));
    src.game = models::make_synthetic_game(spec);
    src.width = static_cast<int>(src.game.arity());
    return src;
  }
  if (c.input.empty()) throw InvalidInput("--input or --game is required");
  Image image = io::read_image(c.input);
  src.game = make_masked_image_game(image, parse_baseline_mode(c.baseline),
                                    models::parse_scorer(c.scorer, image));
  src.width = image.width();
  src.height = image.height();
  src.image = std::move(image);
  return src;
}

struct HierarchyChoice {
  PartitionHierarchy hierarchy;
  std::string source;
  EvalStats segmentation_evals;
};

HierarchyChoice choose_hierarchy(const RunConfig& c, const Source& src) {
  HierarchyChoice out;
  if (!c.hierarchy.empty()) {
    out.hierarchy = load_hierarchy(c.hierarchy);
    out.source = "file";
    if (out.hierarchy.n_features() != static_cast<int>(src.game.arity())) {
      throw InvalidInput("hierarchy covers " + std::to_string(out.hierarchy.n_features()) +
                         " features, the game has " + std::to_string(src.game.arity()));
    }
    return out;
  }
  if (!src.image) {
    out.hierarchy = PartitionHierarchy::all_singletons(static_cast<int>(src.game.arity()));
    out.source = "all-singletons";
    return out;
  }
  if (!c.grid.empty()) {
    out.hierarchy = axis_aligned_hierarchy(src.width, src.height, c.grid);
    out.source = "axis-aligned";
    return out;
  }
  EvalCache cache;
  auto result = seg::build_hierarchy(*src.image, src.game, segmentation_config(c), &cache);
  out.hierarchy = std::move(result.hierarchy);
  out.source = "segmentation";
  out.segmentation_evals = cache.stats();
  return out;
}

// Deterministic pseudo-random payoff for games too wide for a dense table.
ValueFunction hashed_game(int n, std::uint64_t seed) {
  return ValueFunction(static_cast<std::size_t>(n), [seed](const CoalitionMask& m) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t w : m.words()) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h ^= h >> 30;
      h *= 0xbf58476d1ce4e5b9ULL;
      h ^= h >> 27;
      h *= 0x94d049bb133111ebULL;
      h ^= h >> 31;
    }
    if (m.empty()) return 0.0;
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  });
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace

void write_attribution_csv(const fs::path& path, const std::vector<double>& scores, int width) {
  if (width < 1 || scores.size() % static_cast<std::size_t>(width) != 0) {
    throw InvalidInput("attribution length does not fit the row width");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    f << fmt17(scores[i]) << ((i + 1) % width == 0 ? '\n' : ',');
  }
}

GrayImage read_attribution_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open '" + path.string() + "'");
  std::vector<double> values;
  int width = -1, height = 0;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int count = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(parse_real(cell, "attribution value"));
      ++count;
    }
    if (width < 0) width = count;
    if (count != width) throw InvalidInput(path.string() + ": ragged rows");
    ++height;
  }
  if (height == 0) throw InvalidInput(path.string() + ": empty attribution file");
  GrayImage out(width, height);
  out.data() = std::move(values);
  return out;
}

Grid<std::uint8_t> heatmap(const GrayImage& attr) {
  Grid<std::uint8_t> out(attr.width(), attr.height(), 0);
  if (attr.size() == 0) return out;
  const auto [lo, hi] = std::minmax_element(attr.data().begin(), attr.data().end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < attr.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround((attr[i] - *lo) / span * 255.0));
  }
  return out;
}

Image square_image(int size) {
  if (size < 1) throw InvalidInput("image size must be >= 1");
  Image img(size, size, 1, 20.0);
  const int side = std::max(1, size / 4);
  const int start = (size - side) / 2;
  for (int y = start; y < start + side; ++y)
    for (int x = start; x < start + side; ++x) img.at(x, y) = 200.0;
  return img;
}

int cmd_segment(const RunConfig& c, std::ostream& out) {
  RunConfig cfg = c;
  cfg.game.clear();
  const Source src = load_source(cfg);
  fs::create_directories(c.out);

  if (!c.grid.empty()) {
    const auto h = axis_aligned_hierarchy(src.width, src.height, c.grid);
    json meta = {{"source", "axis-aligned"}, {"grid", c.grid},
                 {"width", src.width}, {"height", src.height}};
    save_hierarchy(c.out / "hierarchy.json", h, meta);
    out << "axis-aligned hierarchy, depth " << h.depth() << ", " << h.nodes().size()
        << " nodes\n";
    return kOk;
  }

  EvalCache cache;
  auto result = seg::build_hierarchy(*src.image, src.game, segmentation_config(c), &cache);
  result.metadata["scorer"] = c.scorer;
  result.metadata["baseline"] = c.baseline;
  save_hierarchy(c.out / "hierarchy.json", result.hierarchy, result.metadata);
  for (std::size_t i = 0; i < result.label_maps.size(); ++i) {
    const auto& labels = result.label_maps[i];
    Grid<std::uint8_t> g(labels.width(), labels.height());
    for (std::size_t p = 0; p < labels.size(); ++p) g[p] = static_cast<std::uint8_t>(labels[p] % 256);
    io::write_pgm(c.out / ("labels_level" + std::to_string(i + 1) + ".pgm"), g);
  }
  Grid<std::uint8_t> edges = result.initial.edges.edges;
  for (auto& v : edges.data()) v = v ? 255 : 0;
  io::write_pgm(c.out / "edges.pgm", edges);

  out << "levels:";
  for (const auto& level : result.levels) out << ' ' << level.size();
  out << "\ncanny segments: " << result.initial.segments.count
      << "\nhierarchy depth: " << result.hierarchy.depth()
      << "\nsegment evaluations: " << cache.stats().distinct_calls << '\n';
  return kOk;
}

int cmd_explain(const RunConfig& c, std::ostream& out) {
  if (c.method != "owen" && c.method != "shapley") {
    throw InvalidInput("unknown method '" + c.method + "' (expected shapley or owen)");
  }
  if (c.threads < 1) throw InvalidInput("--threads must be >= 1");
  const Source src = load_source(c);
  const int n = static_cast<int>(src.game.arity());
  fs::create_directories(c.out);

  json stats = {{"method", c.method}, {"n_features", n},
                {"width", src.width}, {"height", src.height}, {"threads", c.threads}};
  Attribution attr;
  const auto start = Clock::now();
  if (c.method == "shapley") {
    if (c.mc > 0) {
      attr = permutation_shapley(src.game, c.mc, c.seed);
      stats["mc_samples"] = c.mc;
      stats["seed"] = c.seed;
      stats["predicted_total_requests"] = static_cast<double>(c.mc) * (n + 1);
    } else {
      if (n > 24) {
        throw CapacityError("exact Shapley over " + std::to_string(n) +
                                " features needs 2^n evaluations; use --mc",
                            std::ldexp(1.0, n), std::ldexp(1.0, 24));
      }
      ShapleyOptions opts;
      opts.threads = c.threads;
      attr = exact_shapley(src.game, opts);
      stats["predicted_eval_count"] = std::uint64_t{1} << n;
    }
  } else {
    if (c.mc > 0) throw InvalidInput("--mc applies to --method shapley only");
    const auto choice = choose_hierarchy(c, src);
    const auto cost = owen_cost(choice.hierarchy);
    OwenOptions opts;
    opts.threads = c.threads;
    attr = owen_multilevel(src.game, choice.hierarchy, opts);
    stats["hierarchy_source"] = choice.source;
    stats["hierarchy_depth"] = choice.hierarchy.depth();
    stats["predicted_eval_count"] = cost.predicted_per_feature;
    stats["max_enumerated_per_feature"] = cost.max_enumerated_per_feature;
    stats["predicted_total_requests"] = cost.total_requests;
    stats["segmentation_evals"] = choice.segmentation_evals.distinct_calls;
  }
  const double wall = seconds_since(start);
  stats["distinct_evals"] = attr.eval_stats.distinct_calls;
  stats["total_requests"] = attr.eval_stats.total_requests;
  stats["attribution_sum"] = attr.sum();
  stats["wall_time_s"] = wall;

  write_attribution_csv(c.out / "attribution.csv", attr.scores, src.width);
  GrayImage grid(src.width, src.height);
  grid.data() = attr.scores;
  io::write_pgm(c.out / "heatmap.pgm", heatmap(grid));
  write_json(c.out / "stats.json", stats);

  out << c.method << ": " << n << " features, " << attr.eval_stats.distinct_calls
      << " distinct evaluations, " << std::fixed << std::setprecision(3) << wall << " s\n";
  out.unsetf(std::ios::fixed);
  return kOk;
}

int cmd_check_t(const RunConfig& c, std::ostream& out) {
  const double tau = parse_real(c.tau, "tau");
  if (std::isnan(tau)) throw InvalidInput("tau must not be NaN");
  const Source src = load_source(c);
  const auto choice = choose_hierarchy(c, src);
  const auto report = check_t_property(choice.hierarchy, src.game, tau);
  json doc = to_json(report);
  doc["hierarchy_source"] = choice.source;
  out << doc.dump(2) << '\n';
  return report.pass ? kOk : kTPropertyFailure;
}

int cmd_metrics(const MetricsConfig& c, std::ostream& out) {
  if (c.attr.empty() || c.mask.empty()) throw InvalidInput("--attr and --mask are required");
  const GrayImage attr = read_attribution_csv(c.attr);
  const Image mask_img = io::read_image(c.mask);
  if (mask_img.width() != attr.width() || mask_img.height() != attr.height()) {
    throw InvalidInput("mask and attribution differ in shape");
  }
  metrics::Mask mask(mask_img.width(), mask_img.height(), 0);
  for (std::size_t p = 0; p < mask.size(); ++p) mask[p] = mask_img.sample(p) > 0.0 ? 1 : 0;

  std::optional<metrics::BoundingBox> box;
  if (!c.bbox.empty()) {
    const auto v = parse_ints(c.bbox, "bbox");
    if (v.size() != 4) throw InvalidInput("--bbox needs x0,y0,x1,y1");
    box = metrics::BoundingBox{v[0], v[1], v[2], v[3]};
    if (box->x0 < 0 || box->y0 < 0 || box->x1 >= attr.width() || box->y1 >= attr.height() ||
        box->x0 > box->x1 || box->y0 > box->y1) {
      throw InvalidInput("--bbox lies outside the image");
    }
  }
  metrics::AopcOptions aopc;
  aopc.max_fraction = c.aopc_fraction;
  aopc.steps = c.aopc_steps;
  std::optional<ValueFunction> game;
  if (!c.input.empty()) {
    const Image image = io::read_image(c.input);
    if (image.width() != attr.width() || image.height() != attr.height()) {
      throw InvalidInput("image and attribution differ in shape");
    }
    game = make_masked_image_game(image, parse_baseline_mode(c.baseline),
                                  models::parse_scorer(c.scorer, image));
  }
  const auto report = metrics::evaluate(attr, mask, box, game ? &*game : nullptr, aopc);
  json doc = report.to_json();
  if (game) doc["scorer"] = c.scorer;
  out << doc.dump(2) << '\n';
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_json(c.out / "metrics.json", doc);
    std::ofstream csv(c.out / "metrics.csv", std::ios::binary);
    csv << metrics::MetricsReport::csv_header() << '\n' << report.csv_row() << '\n';
  }
  return kOk;
}

int cmd_compare_cost(const CompareCostConfig& c, std::ostream& out) {
  const auto h = PartitionHierarchy::balanced(c.levels);
  const int n = h.n_features();
  const auto cost = owen_cost(h);
  const double shapley_predicted = std::ldexp(1.0, n);

  std::optional<EvalStats> owen_measured, shapley_measured;
  if (c.measure) {
    const auto game = n <= 20 ? models::random_game(n, c.seed) : hashed_game(n, c.seed);
    OwenOptions opts;
    opts.threads = c.threads;
    owen_measured = owen_multilevel(game, h, opts).eval_stats;
    if (n <= 20) {
      ShapleyOptions sopts;
      sopts.threads = c.threads;
      shapley_measured = exact_shapley(game, sopts).eval_stats;
    }
  }

  auto cell = [](const std::optional<EvalStats>& s) {
    return s ? std::to_string(s->distinct_calls) : std::string("infeasible");
  };
  out << "method,n_features,predicted_per_feature,predicted_total_requests,measured_distinct,"
         "measured_requests\n";
  out << "owen," << n << ',' << cost.predicted_per_feature << ',' << fmt17(cost.total_requests)
      << ',' << cell(owen_measured) << ','
      << (owen_measured ? std::to_string(owen_measured->total_requests) : "infeasible") << '\n';
  const std::string shap = n < 64 ? std::to_string(std::uint64_t{1} << n) : fmt17(shapley_predicted);
  out << "shapley," << n << ',' << shap << ',' << shap << ',' << cell(shapley_measured) << ','
      << (shapley_measured ? std::to_string(shapley_measured->total_requests) : "infeasible")
      << '\n';
  if (owen_measured) {
    const double ratio =
        static_cast<double>(owen_measured->distinct_calls) / cost.predicted_per_feature;
    out << "# owen measured/predicted = " << fmt17(ratio)
        << (ratio <= 2.0 ? " (within 2x)" : " (exceeds 2x)") << '\n';
  }
  return kOk;
}

int cmd_bench(const BenchConfig& c, std::ostream& out) {
  out << "size,pixels,segments_top,hierarchy_depth,segmentation_evals,owen_distinct_evals,"
         "owen_requests,owen_seconds,shapley_distinct_evals,shapley_seconds\n";
  std::vector<double> xs, ys;
  for (int size : c.sizes) {
    const Image image = square_image(size);
    const auto game = make_masked_image_game(image, parse_baseline_mode(c.baseline),
                                             models::parse_scorer(c.scorer, image));
    seg::SegmentationConfig scfg;
    scfg.fanout = c.fanout;
    scfg.max_depth = c.max_depth;
    EvalCache seg_cache;
    const auto seg_result = seg::build_hierarchy(image, game, scfg, &seg_cache);
    const int pixels = size * size;
    const int top = static_cast<int>(seg_result.hierarchy.node(0).children.size());
    out << size << ',' << pixels << ',' << top << ',' << seg_result.hierarchy.depth() << ','
        << seg_cache.stats().distinct_calls << ',';

    OwenOptions opts;
    opts.threads = c.threads;
    if (owen_cost(seg_result.hierarchy).max_enumerated_per_feature <=
        opts.max_combinations_per_feature) {
      const auto t0 = Clock::now();
      const auto owen = owen_multilevel(game, seg_result.hierarchy, opts);
      out << owen.eval_stats.distinct_calls << ',' << owen.eval_stats.total_requests << ','
          << fmt17(seconds_since(t0)) << ',';
      xs.push_back(pixels);
      ys.push_back(static_cast<double>(owen.eval_stats.distinct_calls));
    } else {
      out << "infeasible,infeasible,infeasible,";
    }

    if (pixels <= 24) {
      ShapleyOptions sopts;
      sopts.threads = c.threads;
      const auto t0 = Clock::now();
      const auto shap = exact_shapley(game, sopts);
      out << shap.eval_stats.distinct_calls << ',' << fmt17(seconds_since(t0)) << '\n';
    } else {
      out << "infeasible,infeasible\n";
    }
  }
  out << "# loglog slope of owen distinct evals vs pixels = " << fmt17(loglog_slope(xs, ys))
      << '\n';
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shapley and Owen attributions over image hierarchies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hiershap 0.1.0");

  RunConfig rc;
  std::string grid_text;
  auto add_image_opts = [&](CLI::App* sub) {
    sub->add_option("--input", rc.input, "image (PGM, PPM or PNG)");
    sub->add_option("--scorer", rc.scorer,
                    "sum | retained-mean | template-mean:x0,y0,x1,y1 | fixture.json")
        ->capture_default_str();
    sub->add_option("--baseline", rc.baseline, "mean | zero")
        ->check(CLI::IsMember({"mean", "zero"}))
        ->capture_default_str();
  };
  auto add_segment_opts = [&](CLI::App* sub) {
    sub->add_option("--pct-lower", rc.pct_lower)->capture_default_str();
    sub->add_option("--pct-upper", rc.pct_upper)->capture_default_str();
    sub->add_option("--dilate", rc.dilate, "dilation kernel size")->capture_default_str();
    sub->add_option("--fanout", rc.fanout)->capture_default_str();
    sub->add_option("--max-depth", rc.max_depth)->capture_default_str();
    sub->add_option("--epsilon", rc.epsilon, "median | <real>")->capture_default_str();
    sub->add_option("--leaf-expansion", rc.leaf_expansion, "binary | flat")
        ->capture_default_str();
    sub->add_option("--threshold-basis", rc.threshold_basis, "gradient | thinned")
        ->capture_default_str();
    sub->add_option("--grid", grid_text, "axis-aligned hierarchy, e.g. 2,2,2");
  };

  auto* segment = app.add_subcommand("segment", "build a segment hierarchy");
  add_image_opts(segment);
  add_segment_opts(segment);
  segment->add_option("--out", rc.out)->capture_default_str();

  auto* explain = app.add_subcommand("explain", "attribute a score to pixels or features");
  add_image_opts(explain);
  add_segment_opts(explain);
  explain->add_option("--game", rc.game, "synthetic game fixture JSON");
  explain->add_option("--hierarchy", rc.hierarchy, "hierarchy JSON");
  explain->add_option("--method", rc.method)
      ->check(CLI::IsMember({"shapley", "owen"}))
      ->capture_default_str();
  explain->add_option("--mc", rc.mc, "Monte Carlo permutations (shapley)");
  explain->add_option("--seed", rc.seed)->capture_default_str();
  explain->add_option("--threads", rc.threads)->capture_default_str();
  explain->add_option("--out", rc.out)->capture_default_str();

  auto* check = app.add_subcommand("check-t", "check the positive T-property");
  add_image_opts(check);
  add_segment_opts(check);
  check->add_option("--game", rc.game, "synthetic game fixture JSON");
  check->add_option("--hierarchy", rc.hierarchy, "hierarchy JSON");
  check->add_option("--tau", rc.tau, "positivity threshold (inf and -inf allowed)")
      ->capture_default_str();

  MetricsConfig mc;
  auto* met = app.add_subcommand("metrics", "score an attribution map against a mask");
  met->add_option("--attr", mc.attr, "attribution CSV")->required();
  met->add_option("--mask", mc.mask, "mask image, nonzero = object")->required();
  met->add_option("--bbox", mc.bbox, "x0,y0,x1,y1 inclusive");
  met->add_option("--input", mc.input, "image for AOPC");
  met->add_option("--scorer", mc.scorer)->capture_default_str();
  met->add_option("--baseline", mc.baseline)
      ->check(CLI::IsMember({"mean", "zero"}))
      ->capture_default_str();
  met->add_option("--aopc-fraction", mc.aopc_fraction)->capture_default_str();
  met->add_option("--aopc-steps", mc.aopc_steps)->capture_default_str();
  met->add_option("--out", mc.out, "directory for metrics.json and metrics.csv");

  CompareCostConfig cc;
  std::string levels_text = "2,5,5";
  bool no_measure = false;
  auto* cost = app.add_subcommand("compare-cost", "predicted vs measured evaluations");
  cost->add_option("--levels", levels_text, "fanout per level")->capture_default_str();
  cost->add_flag("--no-measure", no_measure, "skip the instrumented runs");
  cost->add_option("--seed", cc.seed)->capture_default_str();
  cost->add_option("--threads", cc.threads)->capture_default_str();

  BenchConfig bc;
  std::string sizes_text = "16,24,32";
  auto* bench = app.add_subcommand("bench", "time Owen on square images of several sizes");
  bench->add_option("--sizes", sizes_text, "image side lengths")->capture_default_str();
  bench->add_option("--scorer", bc.scorer)->capture_default_str();
  bench->add_option("--baseline", bc.baseline)
      ->check(CLI::IsMember({"mean", "zero"}))
      ->capture_default_str();
  bench->add_option("--fanout", bc.fanout)->capture_default_str();
  bench->add_option("--max-depth", bc.max_depth)->capture_default_str();
  bench->add_option("--seed", bc.seed)->capture_default_str();
  bench->add_option("--threads", bc.threads)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailure;
  }

  try {
    if (!grid_text.empty()) rc.grid = parse_ints(grid_text, "grid");
    if (*segment) return cmd_segment(rc, out);
    if (*explain) return cmd_explain(rc, out);
    if (*check) return cmd_check_t(rc, out);
    if (*met) return cmd_metrics(mc, out);
    if (*cost) {
      cc.levels = parse_ints(levels_text, "levels");
      cc.measure = !no_measure;
      return cmd_compare_cost(cc, out);
    }
    if (*bench) {
      bc.sizes = parse_ints(sizes_text, "sizes");
      return cmd_bench(bc, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
  return kValidationFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return run(static_cast<int>(args.size()), argv.data(), out, err);
}

}  // namespace hiershap::cli
