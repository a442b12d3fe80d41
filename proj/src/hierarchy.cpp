#include "hiershap/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hiershap/errors.hpp"

namespace hiershap {

PartitionHierarchy::PartitionHierarchy(int n_features, const GroupSpec& root)
    : n_features_(n_features) {
  if (n_features < 0) throw InvalidInput("negative feature count");
  add_node(root, -1, 0);
  index_leaves();
}

int PartitionHierarchy::add_node(const GroupSpec& spec, int parent, int depth) {
  const int id = static_cast<int>(nodes_.size());
  Node node;
  node.members = spec.members;
  std::sort(node.members.begin(), node.members.end());
  node.parent = parent;
  node.depth = depth;
  nodes_.push_back(std::move(node));
  for (const auto& child : spec.children) {
    const int child_id = add_node(child, id, depth + 1);
    nodes_[id].children.push_back(child_id);
  }
  return id;
}

void PartitionHierarchy::index_leaves() {
  leaf_of_.assign(std::max(n_features_, 0), -1);
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
    const Node& n = nodes_[id];
    if (!n.children.empty() || n.members.size() != 1) continue;
    const int f = n.members[0];
    if (f >= 0 && f < n_features_ && leaf_of_[f] < 0) leaf_of_[f] = id;
  }
}

PartitionHierarchy PartitionHierarchy::from_groups(
    int n_features, const std::vector<std::vector<int>>& groups) {
  GroupSpec root;
  for (const auto& g : groups) {
    GroupSpec group{g, {}};
    for (int f : g) group.children.push_back(GroupSpec{{f}, {}});
    root.members.insert(root.members.end(), g.begin(), g.end());
    root.children.push_back(std::move(group));
  }
  std::sort(root.members.begin(), root.members.end());
  root.members.erase(std::unique(root.members.begin(), root.members.end()), root.members.end());
  return PartitionHierarchy(n_features, root);
}

PartitionHierarchy PartitionHierarchy::balanced(const std::vector<int>& fanouts) {
  if (fanouts.empty()) throw InvalidInput("balanced hierarchy needs at least one level");
  int n = 1;
  for (int f : fanouts) {
    if (f < 1) throw InvalidInput("fanouts must be positive");
    n *= f;
  }
  // Build bottom-up over contiguous feature ranges.
  auto build = [&](auto&& self, std::size_t level, int first, int count) -> GroupSpec {
    GroupSpec spec;
    spec.members.resize(count);
    std::iota(spec.members.begin(), spec.members.end(), first);
    if (level == fanouts.size()) return spec;
    const int block = count / fanouts[level];
    for (int k = 0; k < fanouts[level]; ++k) {
      spec.children.push_back(self(self, level + 1, first + k * block, block));
    }
    return spec;
  };
  return PartitionHierarchy(n, build(build, 0, 0, n));
}

PartitionHierarchy PartitionHierarchy::all_singletons(int n_features) {
  // A one-feature group is already a leaf: root -> leaves directly.
  GroupSpec root;
  for (int i = 0; i < n_features; ++i) {
    root.members.push_back(i);
    root.children.push_back(GroupSpec{{i}, {}});
  }
  return PartitionHierarchy(n_features, root);
}

int PartitionHierarchy::leaf_of(int feature) const {
  if (feature < 0 || feature >= static_cast<int>(leaf_of_.size())) return -1;
  return leaf_of_[feature];
}

int PartitionHierarchy::depth() const {
  int d = 0;
  for (const auto& n : nodes_) {
    if (n.children.empty()) d = std::max(d, n.depth);
  }
  return d;
}

bool PartitionHierarchy::uniform_depth() const {
  int d = -1;
  for (const auto& n : nodes_) {
    if (!n.children.empty()) continue;
    if (d >= 0 && n.depth != d) return false;
    d = n.depth;
  }
  return true;
}

std::vector<int> PartitionHierarchy::ancestor_chain(int feature) const {
  std::vector<int> chain;
  for (int id = leaf_of(feature); id > 0; id = nodes_[id].parent) chain.push_back(id);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

GroupSpec PartitionHierarchy::to_spec(int id) const {
  GroupSpec spec{nodes_[id].members, {}};
  for (int c : nodes_[id].children) spec.children.push_back(to_spec(c));
  return spec;
}

bool PartitionHierarchy::operator==(const PartitionHierarchy& other) const {
  if (n_features_ != other.n_features_ || nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].members != other.nodes_[i].members ||
        nodes_[i].children != other.nodes_[i].children) {
      return false;
    }
  }
  return true;
}

std::string to_string(ValidationIssue::Kind kind) {
  using K = ValidationIssue::Kind;
  switch (kind) {
    case K::kOverlap: return "overlap";
    case K::kCoverage: return "coverage";
    case K::kForeignMember: return "foreign-member";
    case K::kBadIndex: return "bad-index";
    case K::kNonSingletonLeaf: return "non-singleton-leaf";
    case K::kNonUniformDepth: return "non-uniform-depth";
    case K::kEmptyNode: return "empty-node";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  if (issues.empty()) return "valid";
  std::ostringstream os;
  os << issues.size() << " hierarchy issue(s):";
  for (std::size_t k = 0; k < issues.size() && k < 10; ++k) {
    os << "\n  [" << to_string(issues[k].kind) << "] " << issues[k].message;
  }
  if (issues.size() > 10) os << "\n  ...";
  return os.str();
}

ValidationReport validate_hierarchy(const PartitionHierarchy& h, int n_features) {
  using K = ValidationIssue::Kind;
  ValidationReport report;
  auto add = [&](K kind, int node, int feature, std::string msg) {
    report.issues.push_back({kind, node, feature, std::move(msg)});
  };
  const auto& nodes = h.nodes();
  if (nodes.empty()) {
    add(K::kEmptyNode, -1, -1, "hierarchy has no root");
    return report;
  }
  if (h.n_features() != n_features) {
    add(K::kCoverage, 0, -1,
        "hierarchy declares " + std::to_string(h.n_features()) + " features, expected " +
            std::to_string(n_features));
  }

  // Root coverage of N.
  std::vector<int> root_count(std::max(n_features, 0), 0);
  for (int f : nodes[0].members) {
    if (f >= 0 && f < n_features) ++root_count[f];
  }
  for (int f = 0; f < n_features; ++f) {
    if (root_count[f] == 0) {
      add(K::kCoverage, 0, f, "feature " + std::to_string(f) + " is not covered by the root");
    }
  }

  std::vector<int> seen(std::max(n_features, 0), 0);
  int leaf_depth = -1;
  bool depth_reported = false;
  for (int id = 0; id < static_cast<int>(nodes.size()); ++id) {
    const auto& node = nodes[id];
    if (node.members.empty()) {
      add(K::kEmptyNode, id, -1, "node " + std::to_string(id) + " has no members");
      continue;
    }
    for (std::size_t k = 0; k < node.members.size(); ++k) {
      const int f = node.members[k];
      if (f < 0 || f >= n_features) {
        add(K::kBadIndex, id, f,
            "node " + std::to_string(id) + " holds out-of-range feature " + std::to_string(f));
      } else if (k > 0 && node.members[k - 1] == f) {
        add(K::kOverlap, id, f,
            "feature " + std::to_string(f) + " repeated in node " + std::to_string(id));
      }
    }
    if (node.children.empty()) {
      if (node.members.size() != 1) {
        add(K::kNonSingletonLeaf, id, -1,
            "leaf node " + std::to_string(id) + " holds " + std::to_string(node.members.size()) +
                " features");
      }
      if (leaf_depth < 0) {
        leaf_depth = node.depth;
      } else if (node.depth != leaf_depth && !depth_reported) {
        add(K::kNonUniformDepth, id, -1,
            "leaves at depths " + std::to_string(leaf_depth) + " and " +
                std::to_string(node.depth));
        depth_reported = true;
      }
      continue;
    }

    // Children must partition the parent exactly.
    std::vector<int> touched;
    for (int c : node.children) {
      for (int f : nodes[c].members) {
        if (f < 0 || f >= n_features) continue;
        if (seen[f]++ == 1) {
          add(K::kOverlap, id, f,
              "feature " + std::to_string(f) + " appears in more than one child of node " +
                  std::to_string(id));
        }
        touched.push_back(f);
        if (!std::binary_search(node.members.begin(), node.members.end(), f)) {
          add(K::kForeignMember, c, f,
              "feature " + std::to_string(f) + " in node " + std::to_string(c) +
                  " is not a member of its parent " + std::to_string(id));
        }
      }
    }
    for (int f : node.members) {
      if (f >= 0 && f < n_features && seen[f] == 0) {
        add(K::kCoverage, id, f,
            "feature " + std::to_string(f) + " of node " + std::to_string(id) +
                " is not covered by its children");
      }
    }
    for (int f : touched) seen[f] = 0;
  }
  return report;
}

void require_valid(const PartitionHierarchy& h) {
  const auto report = validate_hierarchy(h);
  if (!report.ok()) throw ValidationError(report.summary());
}

PartitionHierarchy normalize_depth(const PartitionHierarchy& h) {
  if (h.uniform_depth()) return h;
  const int target = h.depth();
  auto build = [&](auto&& self, int id) -> GroupSpec {
    const auto& node = h.node(id);
    GroupSpec spec{node.members, {}};
    if (node.children.empty()) {
      for (int d = node.depth; d < target; ++d) {
        spec = GroupSpec{node.members, {std::move(spec)}};
      }
      return spec;
    }
    for (int c : node.children) spec.children.push_back(self(self, c));
    return spec;
  };
  return PartitionHierarchy(h.n_features(), build(build, 0));
}

namespace {

nlohmann::json spec_to_json(const GroupSpec& spec) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : spec.children) children.push_back(spec_to_json(c));
  return {{"members", spec.members}, {"children", std::move(children)}};
}

GroupSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("hierarchy node must be a JSON object");
  GroupSpec spec;
  if (j.contains("children")) {
    if (!j["children"].is_array()) throw ValidationError("'children' must be an array");
    for (const auto& c : j["children"]) spec.children.push_back(spec_from_json(c));
  }
  if (j.contains("members")) {
    if (!j["members"].is_array()) throw ValidationError("'members' must be an array");
    for (const auto& m : j["members"]) {
      if (!m.is_number_integer()) throw ValidationError("'members' must hold integers");
      spec.members.push_back(m.get<int>());
    }
  } else {
    // Internal nodes may omit members; they are the union of the children.
    for (const auto& c : spec.children) {
      spec.members.insert(spec.members.end(), c.members.begin(), c.members.end());
    }
  }
  return spec;
}

}  // namespace

nlohmann::json hierarchy_to_json(const PartitionHierarchy& h) {
  return {{"n_features", h.n_features()}, {"root", spec_to_json(h.to_spec())}};
}

PartitionHierarchy hierarchy_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("n_features") || !doc["n_features"].is_number_integer()) {
    throw ValidationError("hierarchy JSON needs an integer 'n_features'");
  }
  if (!doc.contains("root")) throw ValidationError("hierarchy JSON needs a 'root' object");
  const int n = doc["n_features"].get<int>();
  if (n < 1) throw ValidationError("'n_features' must be positive");
  PartitionHierarchy h = normalize_depth(PartitionHierarchy(n, spec_from_json(doc["root"])));
  require_valid(h);
  return h;
}

PartitionHierarchy load_hierarchy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open hierarchy '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("hierarchy '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return hierarchy_from_json(doc);
}

void save_hierarchy(const std::filesystem::path& path, const PartitionHierarchy& h,
                    const nlohmann::json& metadata) {
  nlohmann::json doc = hierarchy_to_json(h);
  if (!metadata.is_null()) doc["metadata"] = metadata;
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << doc.dump() << '\n';
}

}  // namespace hiershap
