#include "logdoc/pipeline.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "logdoc/util.hpp"

namespace logdoc {

Pipeline::Pipeline(PipelineConfig config, const DefinitionStore* defs)
    : Pipeline(std::move(config), defs,
               LoadedStores{ValueDictionary{}, SignatureStore{0}}) {}

Pipeline::Pipeline(PipelineConfig config, const DefinitionStore* defs, LoadedStores preload)
    : config_(std::move(config)),
      defs_(defs),
      dict_(preload.dict.size() > 0 ? std::move(preload.dict)
                                    : ValueDictionary(config_.complexity)),
      signatures_(preload.signatures.size() > 0 ? std::move(preload.signatures)
                                                : SignatureStore(config_.window)),
      miner_(config_.miner, signatures_) {
  if (config_.id_rule.mode == IdRule::Mode::pattern)
    id_pattern_ = std::regex(config_.id_rule.pattern);
}

std::string Pipeline::candidate_id(std::span<const Token> tokens) const {
  if (tokens.empty()) return {};
  const std::string& first = tokens.front().text;
  switch (config_.id_rule.mode) {
    case IdRule::Mode::prefix:
      return first.substr(0, std::min(first.size(), config_.id_rule.prefix_len));
    case IdRule::Mode::pattern: {
      std::smatch m;
      if (!std::regex_search(first, m, id_pattern_)) return {};
      return m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
    }
    case IdRule::Mode::first_token: break;
  }
  return first;
}

void Pipeline::learn_bindings(const ParsedMessage& parsed) {
  for (const Binding& b : parsed.bindings) {
    // Signatures learn every tree-extracted value; the dictionary applies
    // its complexity filter inside record().
    signatures_.update(b.name, b.value);
    dict_.record(b.value, b.name, parsed.message_id);
  }
}

ApproximateTemplate Pipeline::build_template(std::span<const Token> tokens,
                                             const std::vector<Binding>& bindings,
                                             const std::vector<Annotation>& annotations) const {
  struct Slot {
    TokenSpan span;
    const std::string* name;
    TokenProvenance provenance;
  };
  std::vector<Slot> slots;
  slots.reserve(bindings.size() + annotations.size());
  for (const auto& b : bindings) slots.push_back({b.span, &b.name, TokenProvenance::tree_parsed});
  for (const auto& a : annotations)
    slots.push_back({a.span, &a.name, TokenProvenance::dictionary_annotated});
  std::sort(slots.begin(), slots.end(),
            [](const Slot& x, const Slot& y) { return x.span.begin < y.span.begin; });

  ApproximateTemplate out;
  std::size_t pos = 0;
  std::size_t next = 0;
  while (pos < tokens.size()) {
    if (next < slots.size() && slots[next].span.begin == pos) {
      out.tokens.push_back(TemplateToken::param(*slots[next].name));
      out.provenance.push_back(slots[next].provenance);
      pos = slots[next].span.end;
      ++next;
    } else {
      out.tokens.push_back(TemplateToken::keyword(tokens[pos].raw));
      out.provenance.push_back(TokenProvenance::raw);
      ++pos;
    }
  }
  return out;
}

Pipeline::LineResult Pipeline::process_line(std::string_view line) {
  ++line_no_;
  ++counters_.lines;

  const std::vector<Token> tokens = tokenize(line, config_.tokenizer);
  if (tokens.empty()) {
    ++counters_.empty_lines;
    return {};
  }

  std::vector<Binding> bindings;
  std::vector<Annotation> annotations;
  bool documented = false;

  if (config_.annotation_enabled) {
    const MessageDefinition* def =
        defs_ && !defs_->empty() ? defs_->lookup(candidate_id(tokens)) : nullptr;
    if (def) {
      ParseResult result = config_.use_anchors
                               ? parse_with_anchors(*def, tokens, config_.anchors)
                               : parse_dfs(*def, tokens);
      if (!result && config_.use_anchors && config_.dfs_fallback) {
        result = parse_dfs(*def, tokens);
        if (result) ++counters_.anchor_fallbacks;
      }
      if (result) {
        documented = true;
        ++counters_.documented_parsed;
        learn_bindings(*result.message);
        bindings = std::move(result.message->bindings);
      } else {
        ++counters_.parse_failures;
      }
    }
    if (!documented) ++counters_.undocumented_lines;

    // Dictionary annotation runs over the tokens the tree did not bind:
    // everything, for undocumented or unparsed lines.
    std::vector<char> bound(tokens.size(), 0);
    for (const auto& b : bindings)
      for (std::size_t i = b.span.begin; i < b.span.end; ++i) bound[i] = 1;
    std::size_t gap_start = 0;
    for (std::size_t i = 0; i <= tokens.size(); ++i) {
      if (i < tokens.size() && !bound[i]) continue;
      if (i > gap_start) {
        std::span<const Token> gap(tokens.data() + gap_start, i - gap_start);
        for (Annotation a : dict_.annotate(gap)) {
          a.span.begin += gap_start;
          a.span.end += gap_start;
          annotations.push_back(std::move(a));
        }
      }
      gap_start = i + 1;
    }
    counters_.annotations_made += annotations.size();
  }

  LineResult result;
  result.documented_parse = documented;
  result.approx = build_template(tokens, bindings, annotations);

  if (line_no_ <= config_.bootstrap_count) {
    ++counters_.bootstrap_lines;
    return result;
  }

  const auto added = miner_.add_log(result.approx.tokens, line_no_);
  ++counters_.mined_lines;
  assignments_.emplace_back(line_no_, added.cluster_id);
  result.cluster_id = added.cluster_id;
  return result;
}

RunReport Pipeline::report() const {
  RunReport r;
  r.counters = counters_;
  r.assignments = assignments_;
  r.templates = miner_.get_templates();
  r.missing_signature_events = miner_.missing_signature_events();
  return r;
}

RunReport Pipeline::run_stream(std::istream& input) {
  std::string line;
  while (std::getline(input, line)) {
    process_line(line);
    if (input.bad())
      throw IoError("stream read failure after line " + std::to_string(line_no_));
  }
  if (input.bad() && !input.eof())
    throw IoError("stream read failure after line " + std::to_string(line_no_));
  return report();
}

RunReport Pipeline::run_stream(const std::vector<std::string>& lines) {
  for (const auto& line : lines) process_line(line);
  return report();
}

std::string RunReport::to_text() const {
  std::ostringstream out;
  out << "lines=" << counters.lines << "\n";
  out << "empty_lines=" << counters.empty_lines << "\n";
  out << "bootstrap_lines=" << counters.bootstrap_lines << "\n";
  out << "mined_lines=" << counters.mined_lines << "\n";
  out << "documented_parsed=" << counters.documented_parsed << "\n";
  out << "anchor_fallbacks=" << counters.anchor_fallbacks << "\n";
  out << "parse_failures=" << counters.parse_failures << "\n";
  out << "undocumented_lines=" << counters.undocumented_lines << "\n";
  out << "annotations_made=" << counters.annotations_made << "\n";
  out << "missing_signature_events=" << missing_signature_events << "\n";
  out << "clusters=" << templates.size() << "\n";
  return out.str();
}

}  // namespace logdoc
