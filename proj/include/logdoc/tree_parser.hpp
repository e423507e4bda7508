#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logdoc/message_defs.hpp"

namespace logdoc {

/// A whitespace-delimited token. `text` is the form used for matching (one
/// trailing punctuation character stripped); `raw` preserves the original.
struct Token {
  std::string text;
  std::string raw;
  bool operator==(const Token&) const = default;
};

struct TokenizerConfig {
  std::string strip_chars = ",;.";  // single trailing char stripped if in this set
};

std::vector<Token> tokenize(std::string_view line, const TokenizerConfig& config = {});
std::vector<std::string> token_texts(std::span<const Token> tokens);

/// Half-open token index range [begin, end).
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const TokenSpan&) const = default;
};

struct Binding {
  std::string name;
  std::string value;  // matched token texts joined by single spaces
  TokenSpan span;
  bool operator==(const Binding&) const = default;
};

struct ParsedMessage {
  std::string message_id;
  std::vector<Token> tokens;
  std::vector<Binding> bindings;   // ordered by span
  SelectionPath selection;         // decisions in traversal order
};

enum class ParseErrorKind { none, no_match, anchor_not_found, segment_no_match };

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::none;
  std::size_t position = 0;  // deepest token index reached before failing
  std::size_t segment = 0;   // segment index for segment_no_match
  std::string detail;
};

struct ParseResult {
  std::optional<ParsedMessage> message;
  ParseError error{};
  explicit operator bool() const { return message.has_value(); }
};

/// Backtracking depth-first parse. Keywords match one equal token, a
/// parameter consumes exactly one token, optional tries include before
/// exclude, single-select tries branches in listed order; the whole token
/// list must be consumed. Deterministic: the first parse in that order wins.
ParseResult parse_dfs(const MessageDefinition& def, std::span<const Token> tokens);

/// A run of >=2 consecutive keywords among the root's children, used to cut
/// a message into independently matched segments.
struct Anchor {
  std::vector<std::string> keywords;
  std::size_t first_child = 0;  // inclusive child index range in the root
  std::size_t last_child = 0;
  bool operator==(const Anchor&) const = default;
};

struct AnchorConfig {
  // When set, a composite child whose subtree is a fixed keyword sequence
  // (sequentials of keywords only) extends a run instead of breaking it.
  bool recursive = false;
};

std::vector<Anchor> extract_anchors(const MessageDefinition& def, const AnchorConfig& config = {});

/// Locates the anchors left to right in the token list and parses the token
/// segments between them against the corresponding runs of root children.
/// A segment whose sub-tree region holds exactly one parameter and no
/// keyword absorbs the whole segment as that parameter's value, which is
/// how multi-token values and in-segment noise are handled. Falls back to
/// parse_dfs when the definition has no anchors.
ParseResult parse_with_anchors(const MessageDefinition& def, std::span<const Token> tokens,
                               const AnchorConfig& config = {});

/// Rebuilds the token sequence from the recorded selection path and bound
/// values; equality with the input tokens is the parser round-trip check.
std::vector<std::string> reconstruct_tokens(const MessageDefinition& def,
                                            const ParsedMessage& parsed);

}  // namespace logdoc
