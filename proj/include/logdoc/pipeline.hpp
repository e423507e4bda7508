#pragma once

#include <istream>
#include <regex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logdoc/message_defs.hpp"
#include "logdoc/template_miner.hpp"
#include "logdoc/tree_parser.hpp"
#include "logdoc/value_dict.hpp"

namespace logdoc {

/// How the candidate message ID is taken from a tokenized line before the
/// definition lookup: the whole first token, a fixed-width prefix of it, or
/// the first capture group of a regular expression applied to it.
struct IdRule {
  enum class Mode { first_token, prefix, pattern };
  Mode mode = Mode::first_token;
  std::size_t prefix_len = 8;  // prefix mode only
  std::string pattern;         // pattern mode only
};

struct PipelineConfig {
  std::size_t bootstrap_count = 10000;  // initial record-only lines
  bool annotation_enabled = true;       // false = plain-Drain baseline on raw tokens
  bool use_anchors = true;
  bool dfs_fallback = true;
  IdRule id_rule;
  TokenizerConfig tokenizer;
  AnchorConfig anchors;
  ComplexityConfig complexity;
  int window = 4;
  MinerConfig miner;
};

enum class TokenProvenance { tree_parsed, dictionary_annotated, raw };

/// A log line with identified values replaced by named placeholders; one
/// provenance entry per output token. A multi-token value collapses to a
/// single placeholder.
struct ApproximateTemplate {
  std::vector<TemplateToken> tokens;
  std::vector<TokenProvenance> provenance;
  std::string rendered() const { return render_template(tokens); }
};

struct RunCounters {
  std::size_t lines = 0;
  std::size_t empty_lines = 0;
  std::size_t bootstrap_lines = 0;
  std::size_t mined_lines = 0;
  std::size_t documented_parsed = 0;
  std::size_t anchor_fallbacks = 0;  // anchored parse failed, plain DFS succeeded
  std::size_t parse_failures = 0;    // definition found but no parse succeeded
  std::size_t undocumented_lines = 0;
  std::size_t annotations_made = 0;
};

struct RunReport {
  RunCounters counters;
  std::vector<std::pair<std::size_t, int>> assignments;  // 1-based line -> cluster
  std::vector<TemplateCluster> templates;
  std::size_t missing_signature_events = 0;

  std::string to_text() const;
};

/// End-to-end orchestration: message-ID lookup, tree parsing with the
/// anchored-then-DFS fallback ladder, dictionary/signature learning,
/// residual annotation, approximate-template construction and mining.
/// Stream order is significant (online learning); one pipeline processes
/// one stream sequentially.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, const DefinitionStore* defs);
  Pipeline(PipelineConfig config, const DefinitionStore* defs, LoadedStores preload);

  struct LineResult {
    ApproximateTemplate approx;
    std::optional<int> cluster_id;  // empty during bootstrap / for empty lines
    bool documented_parse = false;
  };

  /// Never throws for a malformed line: failures downgrade to the
  /// undocumented path and are counted.
  LineResult process_line(std::string_view line);

  RunReport run_stream(std::istream& input);
  RunReport run_stream(const std::vector<std::string>& lines);

  RunReport report() const;
  const ValueDictionary& dictionary() const { return dict_; }
  const SignatureStore& signatures() const { return signatures_; }
  const TemplateMiner& miner() const { return miner_; }
  const RunCounters& counters() const { return counters_; }

 private:
  ApproximateTemplate build_template(std::span<const Token> tokens,
                                     const std::vector<Binding>& bindings,
                                     const std::vector<Annotation>& annotations) const;
  void learn_bindings(const ParsedMessage& parsed);
  std::string candidate_id(std::span<const Token> tokens) const;

  PipelineConfig config_;
  std::regex id_pattern_;        // compiled for IdRule::Mode::pattern
  const DefinitionStore* defs_;  // may be empty/null for the baseline
  ValueDictionary dict_;
  SignatureStore signatures_;
  TemplateMiner miner_;
  RunCounters counters_;
  std::vector<std::pair<std::size_t, int>> assignments_;
  std::size_t line_no_ = 0;
};

}  // namespace logdoc
