#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace logdoc {

enum class NodeKind { keyword, parameter, sequential, optional, single_select };

bool is_composite(NodeKind kind);
std::string_view node_kind_name(NodeKind kind);

/// One node of a message syntax tree. Keyword and parameter nodes are
/// leaves; sequential, optional and single-select nodes carry an ordered
/// child list. Optional means the child sequence may be absent from the
/// message body; single-select means exactly one child is present.
struct SyntaxNode {
  NodeKind kind = NodeKind::keyword;
  std::string text;                  // keyword kind only
  std::string name;                  // parameter kind only
  std::vector<SyntaxNode> children;  // composite kinds only

  static SyntaxNode keyword(std::string text);
  static SyntaxNode parameter(std::string name);
  static SyntaxNode sequential(std::vector<SyntaxNode> children);
  static SyntaxNode optional(std::vector<SyntaxNode> children);
  static SyntaxNode single_select(std::vector<SyntaxNode> children);

  bool is_leaf() const { return !is_composite(kind); }
  bool operator==(const SyntaxNode&) const = default;
};

/// First rule violation found in a tree, with the path of the offending
/// node ("root", "root[2]", "root[2][0]", ...).
struct ValidationResult {
  bool ok = true;
  std::string node_path;
  std::string message;
  explicit operator bool() const { return ok; }
};

/// Checks the structural rules: leaves are keyword/parameter, composites
/// have at least one child, keyword text is a single non-empty word, and
/// parameter names are non-empty and unique across the tree.
ValidationResult validate_tree(const SyntaxNode& root);

struct MessageDefinition {
  std::string message_id;
  SyntaxNode root;  // always a sequential node
  std::map<std::string, std::string> param_semantics;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable after load; safe for concurrent lookup from any number of
/// parser threads.
class DefinitionStore {
 public:
  void add(MessageDefinition def);  // validates; throws SchemaError on duplicate/invalid
  const MessageDefinition* lookup(const std::string& message_id) const;
  std::size_t size() const { return defs_.size(); }
  bool empty() const { return defs_.empty(); }
  auto begin() const { return defs_.begin(); }
  auto end() const { return defs_.end(); }

 private:
  std::map<std::string, MessageDefinition> defs_;
};

DefinitionStore parse_definitions(std::string_view json_text);
DefinitionStore load_definitions(const std::filesystem::path& path);
std::string definitions_to_json(const DefinitionStore& store);

/// One token of a resolved template: either fixed keyword text or a named
/// parameter placeholder.
struct TemplateSlot {
  bool is_parameter = false;
  std::string text;  // keyword text or parameter name
  auto operator<=>(const TemplateSlot&) const = default;
};

/// One choice made while resolving a tree: a single-select branch index or
/// an optional include(1)/exclude(0) decision, in traversal order.
struct SelectionStep {
  enum class Kind { select, optional };
  Kind kind = Kind::select;
  int choice = 0;
  bool operator==(const SelectionStep&) const = default;
};
using SelectionPath = std::vector<SelectionStep>;

/// Canonical text form, e.g. "s0.o1.s1"; "-" for an empty path.
std::string encode_selection(const SelectionPath& path);

struct ResolvedTemplate {
  std::vector<TemplateSlot> slots;
  SelectionPath selection;
};

struct EnumerationLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Expands every combination of single-select branches and optional
/// decisions, deduplicating identical slot sequences (first selection path
/// wins). Throws EnumerationLimitError once the raw expansion exceeds
/// `limit` paths.
std::vector<ResolvedTemplate> enumerate_resolved_templates(const MessageDefinition& def,
                                                           std::size_t limit = 1024);

/// Supplies choice decisions during a single resolving walk.
class DecisionSource {
 public:
  virtual ~DecisionSource() = default;
  virtual std::size_t choose_branch(const SyntaxNode& select_node) = 0;
  virtual bool include_optional(const SyntaxNode& optional_node) = 0;
};

ResolvedTemplate resolve_template(const MessageDefinition& def, DecisionSource& decisions);

/// Replays a recorded selection path. Throws std::invalid_argument when the
/// path does not line up with the tree.
ResolvedTemplate resolve_selection(const MessageDefinition& def, const SelectionPath& path);

}  // namespace logdoc
