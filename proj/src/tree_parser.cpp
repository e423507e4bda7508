#include "logdoc/tree_parser.hpp"

#include <algorithm>
#include <cassert>

#include "logdoc/util.hpp"

namespace logdoc {

std::vector<Token> tokenize(std::string_view line, const TokenizerConfig& config) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i == start) break;
    std::string raw(line.substr(start, i - start));
    std::string text = raw;
    if (!text.empty() && config.strip_chars.find(text.back()) != std::string::npos)
      text.pop_back();
    if (text.empty()) continue;  // a bare punctuation token carries nothing
    out.push_back(Token{std::move(text), std::move(raw)});
  }
  return out;
}

std::vector<std::string> token_texts(std::span<const Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

namespace {

// Backtracking matcher over a work list of pending nodes. Composite nodes
// splice their expansion in front of the remaining work; bindings and
// selection steps are rolled back on failure, so a failed parse leaves
// nothing behind.
class DfsMatcher {
 public:
  DfsMatcher(std::span<const Token> tokens, std::size_t base_index)
      : tokens_(tokens), base_(base_index) {}

  bool run(std::span<const SyntaxNode> region) {
    std::vector<const SyntaxNode*> pending;
    pending.reserve(region.size());
    for (const auto& n : region) pending.push_back(&n);
    return match(pending, 0, 0);
  }

  std::vector<Binding>& bindings() { return bindings_; }
  SelectionPath& selection() { return selection_; }
  std::size_t deepest_failure() const { return base_ + deepest_; }

 private:
  struct Mark {
    std::size_t bindings;
    std::size_t selection;
  };

  Mark save() const { return {bindings_.size(), selection_.size()}; }

  void restore(const Mark& m) {
    bindings_.resize(m.bindings);
    selection_.resize(m.selection);
  }

  void note_failure(std::size_t ti) { deepest_ = std::max(deepest_, ti); }

  static std::vector<const SyntaxNode*> splice(const std::vector<const SyntaxNode*>& pending,
                                               std::size_t pi,
                                               std::span<const SyntaxNode> expansion) {
    std::vector<const SyntaxNode*> next;
    next.reserve(expansion.size() + pending.size() - pi - 1);
    for (const auto& n : expansion) next.push_back(&n);
    next.insert(next.end(), pending.begin() + static_cast<std::ptrdiff_t>(pi) + 1,
                pending.end());
    return next;
  }

  bool match(const std::vector<const SyntaxNode*>& pending, std::size_t pi, std::size_t ti) {
    if (pi == pending.size()) {
      if (ti == tokens_.size()) return true;
      note_failure(ti);
      return false;
    }
    const SyntaxNode& node = *pending[pi];
    switch (node.kind) {
      case NodeKind::keyword: {
        if (ti < tokens_.size() && tokens_[ti].text == node.text)
          return match(pending, pi + 1, ti + 1);
        note_failure(ti);
        return false;
      }
      case NodeKind::parameter: {
        if (ti >= tokens_.size()) {
          note_failure(ti);
          return false;
        }
        bindings_.push_back(Binding{node.name, tokens_[ti].text, {base_ + ti, base_ + ti + 1}});
        if (match(pending, pi + 1, ti + 1)) return true;
        bindings_.pop_back();
        return false;
      }
      case NodeKind::sequential: {
        return match(splice(pending, pi, node.children), 0, ti);
      }
      case NodeKind::optional: {
        Mark m = save();
        selection_.push_back({SelectionStep::Kind::optional, 1});
        if (match(splice(pending, pi, node.children), 0, ti)) return true;
        restore(m);
        selection_.push_back({SelectionStep::Kind::optional, 0});
        if (match(pending, pi + 1, ti)) return true;
        restore(m);
        return false;
      }
      case NodeKind::single_select: {
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          Mark m = save();
          selection_.push_back({SelectionStep::Kind::select, static_cast<int>(i)});
          if (match(splice(pending, pi, {&node.children[i], 1}), 0, ti)) return true;
          restore(m);
        }
        return false;
      }
    }
    return false;
  }

  std::span<const Token> tokens_;
  std::size_t base_;
  std::vector<Binding> bindings_;
  SelectionPath selection_;
  std::size_t deepest_ = 0;
};

}  // namespace

ParseResult parse_dfs(const MessageDefinition& def, std::span<const Token> tokens) {
  DfsMatcher matcher(tokens, 0);
  if (!matcher.run(def.root.children)) {
    ParseResult r;
    r.error = {ParseErrorKind::no_match, matcher.deepest_failure(), 0,
               "no assignment consumes all tokens"};
    return r;
  }
  ParsedMessage msg;
  msg.message_id = def.message_id;
  msg.tokens.assign(tokens.begin(), tokens.end());
  msg.bindings = std::move(matcher.bindings());
  msg.selection = std::move(matcher.selection());
  return ParseResult{std::move(msg), {}};
}

namespace {

// Fixed keyword sequence of a subtree, or nullopt when the subtree can
// produce anything but one deterministic keyword run.
std::optional<std::vector<std::string>> fixed_keywords(const SyntaxNode& node) {
  if (node.kind == NodeKind::keyword) return std::vector<std::string>{node.text};
  if (node.kind != NodeKind::sequential) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& c : node.children) {
    auto sub = fixed_keywords(c);
    if (!sub) return std::nullopt;
    out.insert(out.end(), sub->begin(), sub->end());
  }
  return out;
}

}  // namespace

std::vector<Anchor> extract_anchors(const MessageDefinition& def, const AnchorConfig& config) {
  std::vector<Anchor> anchors;
  Anchor run;
  bool in_run = false;
  auto flush = [&] {
    if (in_run && run.keywords.size() >= 2) anchors.push_back(run);
    run = Anchor{};
    in_run = false;
  };
  const auto& children = def.root.children;
  for (std::size_t i = 0; i < children.size(); ++i) {
    std::optional<std::vector<std::string>> contribution;
    if (children[i].kind == NodeKind::keyword) {
      contribution = std::vector<std::string>{children[i].text};
    } else if (config.recursive && is_composite(children[i].kind)) {
      contribution = fixed_keywords(children[i]);
    }
    if (contribution) {
      if (!in_run) {
        run.first_child = i;
        in_run = true;
      }
      run.last_child = i;
      run.keywords.insert(run.keywords.end(), contribution->begin(), contribution->end());
    } else {
      flush();
    }
  }
  flush();
  return anchors;
}

namespace {

struct SegmentAccumulator {
  std::vector<Binding> bindings;
  SelectionPath selection;

  void take(DfsMatcher& m) {
    bindings.insert(bindings.end(), m.bindings().begin(), m.bindings().end());
    selection.insert(selection.end(), m.selection().begin(), m.selection().end());
  }
};

// Leaf census of a child region; decides whether the whole-segment value
// rule applies (exactly one parameter, no keyword).
void count_leaves(std::span<const SyntaxNode> region, std::size_t& params, std::size_t& keywords) {
  for (const auto& n : region) {
    if (n.kind == NodeKind::parameter) {
      ++params;
    } else if (n.kind == NodeKind::keyword) {
      ++keywords;
    } else {
      count_leaves(n.children, params, keywords);
    }
  }
}

// Binds a whole token segment to the region's single parameter, walking the
// unary spine of composites above it. An empty segment is legal only when
// an optional on the spine can be excluded.
bool match_single_parameter_segment(std::span<const SyntaxNode> region,
                                    std::span<const Token> segment, std::size_t base,
                                    SegmentAccumulator& acc) {
  if (region.size() != 1) return false;
  const SyntaxNode* node = &region.front();
  SelectionPath steps;
  while (true) {
    switch (node->kind) {
      case NodeKind::parameter: {
        if (segment.empty()) return false;
        acc.selection.insert(acc.selection.end(), steps.begin(), steps.end());
        acc.bindings.push_back(Binding{node->name, join(token_texts(segment), " "),
                                       {base, base + segment.size()}});
        return true;
      }
      case NodeKind::sequential: {
        if (node->children.size() != 1) return false;
        node = &node->children.front();
        break;
      }
      case NodeKind::optional: {
        if (segment.empty()) {
          steps.push_back({SelectionStep::Kind::optional, 0});
          acc.selection.insert(acc.selection.end(), steps.begin(), steps.end());
          return true;
        }
        steps.push_back({SelectionStep::Kind::optional, 1});
        if (node->children.size() != 1) return false;
        node = &node->children.front();
        break;
      }
      case NodeKind::single_select: {
        if (node->children.size() != 1) return false;
        steps.push_back({SelectionStep::Kind::select, 0});
        node = &node->children.front();
        break;
      }
      case NodeKind::keyword:
        return false;
    }
  }
}

bool match_segment(std::span<const SyntaxNode> region, std::span<const Token> segment,
                   std::size_t base, SegmentAccumulator& acc) {
  std::size_t params = 0, keywords = 0;
  count_leaves(region, params, keywords);
  if (params == 1 && keywords == 0 &&
      match_single_parameter_segment(region, segment, base, acc))
    return true;
  DfsMatcher matcher(segment, base);
  if (!matcher.run(region)) return false;
  acc.take(matcher);
  return true;
}

std::optional<std::size_t> find_keyword_run(std::span<const Token> tokens, std::size_t from,
                                            const std::vector<std::string>& keywords) {
  if (keywords.empty() || tokens.size() < keywords.size()) return std::nullopt;
  for (std::size_t p = from; p + keywords.size() <= tokens.size(); ++p) {
    bool all = true;
    for (std::size_t k = 0; k < keywords.size(); ++k) {
      if (tokens[p + k].text != keywords[k]) {
        all = false;
        break;
      }
    }
    if (all) return p;
  }
  return std::nullopt;
}

}  // namespace

ParseResult parse_with_anchors(const MessageDefinition& def, std::span<const Token> tokens,
                               const AnchorConfig& config) {
  const std::vector<Anchor> anchors = extract_anchors(def, config);
  if (anchors.empty()) return parse_dfs(def, tokens);

  // Leftmost, in-order anchor location.
  std::vector<std::size_t> positions;
  positions.reserve(anchors.size());
  std::size_t from = 0;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    auto pos = find_keyword_run(tokens, from, anchors[a].keywords);
    if (!pos) {
      ParseResult r;
      r.error = {ParseErrorKind::anchor_not_found, from, a,
                 "anchor '" + join(anchors[a].keywords, " ") + "' not found in order"};
      return r;
    }
    positions.push_back(*pos);
    from = *pos + anchors[a].keywords.size();
  }

  const auto& children = def.root.children;
  SegmentAccumulator acc;
  std::size_t child_cursor = 0;
  std::size_t token_cursor = 0;
  for (std::size_t a = 0; a <= anchors.size(); ++a) {
    const std::size_t region_end = a < anchors.size() ? anchors[a].first_child : children.size();
    const std::size_t segment_end = a < anchors.size() ? positions[a] : tokens.size();
    std::span<const SyntaxNode> region(children.data() + child_cursor, region_end - child_cursor);
    std::span<const Token> segment = tokens.subspan(token_cursor, segment_end - token_cursor);
    if (!match_segment(region, segment, token_cursor, acc)) {
      ParseResult r;
      r.error = {ParseErrorKind::segment_no_match, token_cursor, a,
                 "segment " + std::to_string(a) + " does not match its sub-trees"};
      return r;
    }
    if (a < anchors.size()) {
      child_cursor = anchors[a].last_child + 1;
      token_cursor = positions[a] + anchors[a].keywords.size();
    }
  }

  ParsedMessage msg;
  msg.message_id = def.message_id;
  msg.tokens.assign(tokens.begin(), tokens.end());
  msg.bindings = std::move(acc.bindings);
  msg.selection = std::move(acc.selection);
  return ParseResult{std::move(msg), {}};
}

std::vector<std::string> reconstruct_tokens(const MessageDefinition& def,
                                            const ParsedMessage& parsed) {
  ResolvedTemplate rt = resolve_selection(def, parsed.selection);
  std::vector<std::string> out;
  std::size_t next_binding = 0;
  for (const auto& slot : rt.slots) {
    if (!slot.is_parameter) {
      out.push_back(slot.text);
      continue;
    }
    if (next_binding >= parsed.bindings.size())
      throw std::invalid_argument("parsed message has fewer bindings than the selection needs");
    const Binding& b = parsed.bindings[next_binding++];
    if (b.name != slot.text)
      throw std::invalid_argument("binding order does not match the selection path");
    for (auto& piece : split(b.value, ' '))
      if (!piece.empty()) out.push_back(std::move(piece));
  }
  if (next_binding != parsed.bindings.size())
    throw std::invalid_argument("parsed message has unused bindings");
  return out;
}

}  // namespace logdoc
