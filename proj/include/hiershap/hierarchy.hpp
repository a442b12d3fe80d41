#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hiershap {

// Nested description of a coalition tree, mirroring the JSON layout
// {"members": [...], "children": [...]}.
struct GroupSpec {
  std::vector<int> members;
  std::vector<GroupSpec> children;
};

// Rooted tree of feature groups. The root covers every feature, the children
// of each internal node partition it, and every leaf holds one feature.
// Level 1 is the root's children; level L is the leaf level.
//
// Construction does not validate; call validate_hierarchy() or
// require_valid(). Algorithms reject invalid trees.
class PartitionHierarchy {
 public:
  struct Node {
    std::vector<int> members;   // sorted feature indices
    std::vector<int> children;  // node indices
    int parent = -1;
    int depth = 0;              // root = 0
  };

  PartitionHierarchy() = default;
  PartitionHierarchy(int n_features, const GroupSpec& root);

  // Root -> one node per group -> singleton leaves.
  static PartitionHierarchy from_groups(int n_features,
                                        const std::vector<std::vector<int>>& groups);
  // Balanced tree with fanouts[l] children per node at level l+1; the number
  // of features is the product of the fanouts. {2,5,5} gives 50 features.
  static PartitionHierarchy balanced(const std::vector<int>& fanouts);
  // Root whose children are all singleton leaves (Owen == Shapley).
  static PartitionHierarchy all_singletons(int n_features);

  int n_features() const { return n_features_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_[id]; }
  static constexpr int root() { return 0; }

  bool is_leaf(int id) const { return nodes_[id].children.empty(); }
  // Leaf node holding `feature`, or -1.
  int leaf_of(int feature) const;
  // Depth of the deepest leaf.
  int depth() const;
  bool uniform_depth() const;
  // Node ids from the level-1 ancestor down to the feature's leaf.
  std::vector<int> ancestor_chain(int feature) const;

  GroupSpec to_spec(int id = 0) const;

  bool operator==(const PartitionHierarchy& other) const;

 private:
  int add_node(const GroupSpec& spec, int parent, int depth);
  void index_leaves();

  int n_features_ = 0;
  std::vector<Node> nodes_;
  std::vector<int> leaf_of_;
};

struct ValidationIssue {
  enum class Kind {
    kOverlap,         // a feature appears in two sibling groups
    kCoverage,        // a feature of the parent (or of N) is not covered
    kForeignMember,   // a child holds a feature its parent lacks
    kBadIndex,        // feature index outside [0, n)
    kNonSingletonLeaf,
    kNonUniformDepth,
    kEmptyNode,
  };
  Kind kind;
  int node = -1;
  int feature = -1;
  std::string message;
};

std::string to_string(ValidationIssue::Kind kind);

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

ValidationReport validate_hierarchy(const PartitionHierarchy& h, int n_features);
inline ValidationReport validate_hierarchy(const PartitionHierarchy& h) {
  return validate_hierarchy(h, h.n_features());
}

// Throws ValidationError carrying the report summary when invalid.
void require_valid(const PartitionHierarchy& h);

// Inserts single-child pass-through nodes above shallow leaves so every leaf
// sits at the same depth. Pass-through levels have a sibling set of size one
// and leave Owen values unchanged.
PartitionHierarchy normalize_depth(const PartitionHierarchy& h);

// JSON: {"n_features": n, "root": {"members": [...], "children": [...]}}.
nlohmann::json hierarchy_to_json(const PartitionHierarchy& h);
// Parses, normalizes depth, and validates; throws ValidationError.
PartitionHierarchy hierarchy_from_json(const nlohmann::json& doc);
PartitionHierarchy load_hierarchy(const std::filesystem::path& path);
void save_hierarchy(const std::filesystem::path& path, const PartitionHierarchy& h,
                    const nlohmann::json& metadata = nullptr);

}  // namespace hiershap
