#include "logdoc/message_defs.hpp"

#include <json.hpp>

#include <set>
#include <utility>

#include "logdoc/util.hpp"

namespace logdoc {

bool is_composite(NodeKind kind) {
  return kind == NodeKind::sequential || kind == NodeKind::optional ||
         kind == NodeKind::single_select;
}

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::keyword: return "keyword";
    case NodeKind::parameter: return "parameter";
    case NodeKind::sequential: return "sequential";
    case NodeKind::optional: return "optional";
    case NodeKind::single_select: return "single-select";
  }
  return "?";
}

SyntaxNode SyntaxNode::keyword(std::string text) {
  SyntaxNode n;
  n.kind = NodeKind::keyword;
  n.text = std::move(text);
  return n;
}

SyntaxNode SyntaxNode::parameter(std::string name) {
  SyntaxNode n;
  n.kind = NodeKind::parameter;
  n.name = std::move(name);
  return n;
}

SyntaxNode SyntaxNode::sequential(std::vector<SyntaxNode> children) {
  SyntaxNode n;
  n.kind = NodeKind::sequential;
  n.children = std::move(children);
  return n;
}

SyntaxNode SyntaxNode::optional(std::vector<SyntaxNode> children) {
  SyntaxNode n;
  n.kind = NodeKind::optional;
  n.children = std::move(children);
  return n;
}

SyntaxNode SyntaxNode::single_select(std::vector<SyntaxNode> children) {
  SyntaxNode n;
  n.kind = NodeKind::single_select;
  n.children = std::move(children);
  return n;
}

namespace {

bool has_whitespace(std::string_view s) {
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return true;
  }
  return false;
}

struct Validator {
  std::set<std::string> param_names;
  ValidationResult first_violation;

  bool fail(const std::string& path, std::string message) {
    first_violation = ValidationResult{false, path, std::move(message)};
    return false;
  }

  bool visit(const SyntaxNode& node, const std::string& path) {
    if (node.is_leaf()) {
      if (!node.children.empty())
        return fail(path, std::string(node_kind_name(node.kind)) + " node has children");
      if (node.kind == NodeKind::keyword) {
        if (node.text.empty()) return fail(path, "keyword text is empty");
        if (has_whitespace(node.text))
          return fail(path, "keyword text is not a single word: '" + node.text + "'");
      } else {
        if (node.name.empty()) return fail(path, "parameter name is empty");
        if (!param_names.insert(node.name).second)
          return fail(path, "duplicate parameter name '" + node.name + "'");
      }
      return true;
    }
    if (node.children.empty())
      return fail(path, std::string(node_kind_name(node.kind)) + " node has no children");
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (!visit(node.children[i], path + "[" + std::to_string(i) + "]")) return false;
    }
    return true;
  }
};

}  // namespace

ValidationResult validate_tree(const SyntaxNode& root) {
  Validator v;
  if (!v.visit(root, "root")) return v.first_violation;
  return {};
}

void DefinitionStore::add(MessageDefinition def) {
  if (def.message_id.empty()) throw SchemaError("definition with empty message_id");
  if (def.root.kind != NodeKind::sequential)
    throw SchemaError("definition '" + def.message_id + "': root node must be sequential");
  if (auto r = validate_tree(def.root); !r)
    throw SchemaError("definition '" + def.message_id + "': invalid tree at " + r.node_path +
                      ": " + r.message);
  auto [it, inserted] = defs_.emplace(def.message_id, std::move(def));
  if (!inserted) throw SchemaError("duplicate message_id '" + it->first + "'");
}

const MessageDefinition* DefinitionStore::lookup(const std::string& message_id) const {
  auto it = defs_.find(message_id);
  return it == defs_.end() ? nullptr : &it->second;
}

namespace {

using nlohmann::json;

SyntaxNode node_from_json(const json& j, const std::string& context) {
  if (!j.is_object()) throw SchemaError(context + ": node is not an object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw SchemaError(context + ": node missing string field 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "keyword") {
    if (!j.contains("text") || !j["text"].is_string())
      throw SchemaError(context + ": keyword node missing string field 'text'");
    return SyntaxNode::keyword(j["text"].get<std::string>());
  }
  if (kind == "parameter") {
    if (!j.contains("name") || !j["name"].is_string())
      throw SchemaError(context + ": parameter node missing string field 'name'");
    return SyntaxNode::parameter(j["name"].get<std::string>());
  }
  if (kind == "sequential" || kind == "optional" || kind == "single-select") {
    if (!j.contains("children") || !j["children"].is_array())
      throw SchemaError(context + ": " + kind + " node missing array field 'children'");
    std::vector<SyntaxNode> children;
    std::size_t i = 0;
    for (const auto& c : j["children"]) {
      children.push_back(node_from_json(c, context + ".children[" + std::to_string(i) + "]"));
      ++i;
    }
    if (kind == "sequential") return SyntaxNode::sequential(std::move(children));
    if (kind == "optional") return SyntaxNode::optional(std::move(children));
    return SyntaxNode::single_select(std::move(children));
  }
  throw SchemaError(context + ": unknown node kind '" + kind + "'");
}

json node_to_json(const SyntaxNode& node) {
  json j;
  j["kind"] = std::string(node_kind_name(node.kind));
  if (node.kind == NodeKind::keyword) {
    j["text"] = node.text;
  } else if (node.kind == NodeKind::parameter) {
    j["name"] = node.name;
  } else {
    json children = json::array();
    for (const auto& c : node.children) children.push_back(node_to_json(c));
    j["children"] = std::move(children);
  }
  return j;
}

}  // namespace

DefinitionStore parse_definitions(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("definition file is not valid json: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("definition file: top level must be an array");
  DefinitionStore store;
  std::size_t index = 0;
  for (const auto& entry : doc) {
    const std::string context = "definitions[" + std::to_string(index) + "]";
    if (!entry.is_object()) throw SchemaError(context + ": not an object");
    if (!entry.contains("message_id") || !entry["message_id"].is_string())
      throw SchemaError(context + ": missing string field 'message_id'");
    MessageDefinition def;
    def.message_id = entry["message_id"].get<std::string>();
    if (!entry.contains("root"))
      throw SchemaError(context + " ('" + def.message_id + "'): missing field 'root'");
    def.root = node_from_json(entry["root"], context + " ('" + def.message_id + "').root");
    if (entry.contains("param_semantics")) {
      const auto& sem = entry["param_semantics"];
      if (!sem.is_object())
        throw SchemaError(context + " ('" + def.message_id + "'): param_semantics must be an object");
      for (auto it = sem.begin(); it != sem.end(); ++it) {
        if (!it.value().is_string())
          throw SchemaError(context + " ('" + def.message_id + "'): param_semantics values must be strings");
        def.param_semantics[it.key()] = it.value().get<std::string>();
      }
    }
    store.add(std::move(def));
    ++index;
  }
  return store;
}

DefinitionStore load_definitions(const std::filesystem::path& path) {
  return parse_definitions(read_text_file(path));
}

std::string definitions_to_json(const DefinitionStore& store) {
  json doc = json::array();
  for (const auto& [id, def] : store) {
    json entry;
    entry["message_id"] = id;
    entry["root"] = node_to_json(def.root);
    if (!def.param_semantics.empty()) {
      json sem = json::object();
      for (const auto& [k, v] : def.param_semantics) sem[k] = v;
      entry["param_semantics"] = std::move(sem);
    }
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::string encode_selection(const SelectionPath& path) {
  if (path.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += '.';
    out += path[i].kind == SelectionStep::Kind::select ? 's' : 'o';
    out += std::to_string(path[i].choice);
  }
  return out;
}

namespace {

struct Expansion {
  std::vector<TemplateSlot> slots;
  SelectionPath selection;
};

// Cross-product expansion; `budget` caps the raw path count.
std::vector<Expansion> expand(const SyntaxNode& node, std::size_t budget);

std::vector<Expansion> expand_sequence(const std::vector<SyntaxNode>& nodes, std::size_t budget) {
  std::vector<Expansion> acc{Expansion{}};
  for (const auto& child : nodes) {
    auto child_exps = expand(child, budget);
    std::vector<Expansion> next;
    if (acc.size() * child_exps.size() > budget)
      throw EnumerationLimitError("resolved-template expansion exceeds limit");
    next.reserve(acc.size() * child_exps.size());
    for (const auto& a : acc) {
      for (const auto& c : child_exps) {
        Expansion e = a;
        e.slots.insert(e.slots.end(), c.slots.begin(), c.slots.end());
        e.selection.insert(e.selection.end(), c.selection.begin(), c.selection.end());
        next.push_back(std::move(e));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

std::vector<Expansion> expand(const SyntaxNode& node, std::size_t budget) {
  switch (node.kind) {
    case NodeKind::keyword:
      return {Expansion{{TemplateSlot{false, node.text}}, {}}};
    case NodeKind::parameter:
      return {Expansion{{TemplateSlot{true, node.name}}, {}}};
    case NodeKind::sequential:
      return expand_sequence(node.children, budget);
    case NodeKind::optional: {
      std::vector<Expansion> out;
      for (auto& e : expand_sequence(node.children, budget)) {
        e.selection.insert(e.selection.begin(), {SelectionStep::Kind::optional, 1});
        out.push_back(std::move(e));
      }
      Expansion excluded;
      excluded.selection.push_back({SelectionStep::Kind::optional, 0});
      out.push_back(std::move(excluded));
      if (out.size() > budget) throw EnumerationLimitError("resolved-template expansion exceeds limit");
      return out;
    }
    case NodeKind::single_select: {
      std::vector<Expansion> out;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        for (auto& e : expand(node.children[i], budget)) {
          e.selection.insert(e.selection.begin(),
                             {SelectionStep::Kind::select, static_cast<int>(i)});
          out.push_back(std::move(e));
        }
      }
      if (out.size() > budget) throw EnumerationLimitError("resolved-template expansion exceeds limit");
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<ResolvedTemplate> enumerate_resolved_templates(const MessageDefinition& def,
                                                           std::size_t limit) {
  std::size_t budget = limit;
  auto expansions = expand_sequence(def.root.children, budget);
  if (expansions.size() > limit)
    throw EnumerationLimitError("definition '" + def.message_id + "' expands to more than " +
                                std::to_string(limit) + " templates");
  std::vector<ResolvedTemplate> out;
  std::set<std::vector<TemplateSlot>> seen_slots;
  for (auto& e : expansions) {
    if (!seen_slots.insert(e.slots).second) continue;  // nested optionals can collide
    out.push_back(ResolvedTemplate{std::move(e.slots), std::move(e.selection)});
  }
  return out;
}

namespace {

struct Resolver {
  DecisionSource& decisions;
  ResolvedTemplate result;

  void walk(const SyntaxNode& node) {
    switch (node.kind) {
      case NodeKind::keyword:
        result.slots.push_back({false, node.text});
        return;
      case NodeKind::parameter:
        result.slots.push_back({true, node.name});
        return;
      case NodeKind::sequential:
        for (const auto& c : node.children) walk(c);
        return;
      case NodeKind::optional: {
        bool include = decisions.include_optional(node);
        result.selection.push_back({SelectionStep::Kind::optional, include ? 1 : 0});
        if (include)
          for (const auto& c : node.children) walk(c);
        return;
      }
      case NodeKind::single_select: {
        std::size_t branch = decisions.choose_branch(node);
        if (branch >= node.children.size())
          throw std::invalid_argument("single-select branch index out of range");
        result.selection.push_back({SelectionStep::Kind::select, static_cast<int>(branch)});
        walk(node.children[branch]);
        return;
      }
    }
  }
};

class PathDecisions : public DecisionSource {
 public:
  explicit PathDecisions(const SelectionPath& path) : path_(path) {}

  std::size_t choose_branch(const SyntaxNode&) override {
    return static_cast<std::size_t>(next(SelectionStep::Kind::select));
  }

  bool include_optional(const SyntaxNode&) override {
    return next(SelectionStep::Kind::optional) != 0;
  }

  void finish() const {
    if (pos_ != path_.size())
      throw std::invalid_argument("selection path has unused trailing steps");
  }

 private:
  int next(SelectionStep::Kind expected) {
    if (pos_ >= path_.size()) throw std::invalid_argument("selection path is too short");
    const SelectionStep& step = path_[pos_++];
    if (step.kind != expected)
      throw std::invalid_argument("selection path step kind does not match the tree");
    return step.choice;
  }

  const SelectionPath& path_;
  std::size_t pos_ = 0;
};

}  // namespace

ResolvedTemplate resolve_template(const MessageDefinition& def, DecisionSource& decisions) {
  Resolver r{decisions, {}};
  for (const auto& c : def.root.children) r.walk(c);
  return std::move(r.result);
}

ResolvedTemplate resolve_selection(const MessageDefinition& def, const SelectionPath& path) {
  PathDecisions decisions(path);
  ResolvedTemplate rt = resolve_template(def, decisions);
  decisions.finish();
  return rt;
}

}  // namespace logdoc
