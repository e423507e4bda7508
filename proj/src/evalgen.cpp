#include "logdoc/evalgen.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "logdoc/util.hpp"

namespace logdoc {

namespace {

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

bool contains(const std::string& s, std::string_view needle) {
  return s.find(needle) != std::string::npos;
}

constexpr char kUpper[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr char kLowerChars[] = "abcdefghijklmnopqrstuvwxyz";
constexpr char kDigits[] = "0123456789";
constexpr char kHex[] = "0123456789ABCDEF";

std::string gen_volser(Rng& rng) {
  std::string v;
  for (int i = 0; i < 3; ++i) v += kUpper[rng.below(26)];
  for (int i = 0; i < 3; ++i) v += kDigits[rng.below(10)];
  return v;
}

std::string gen_dataset(Rng& rng) {
  std::string v = "SYS";
  v += kDigits[rng.below(10)];
  v += '.';
  for (int i = 0; i < 4; ++i) v += kUpper[rng.below(26)];
  for (int i = 0; i < 2; ++i) v += kDigits[rng.below(10)];
  return v;
}

std::string gen_word(Rng& rng) {
  std::string v;
  const std::size_t len = 5 + rng.below(4);
  for (std::size_t i = 0; i < len; ++i) v += kLowerChars[rng.below(26)];
  return v;
}

std::string gen_hex(Rng& rng) {
  std::string v = "0X";
  for (int i = 0; i < 6; ++i) v += kHex[rng.below(16)];
  return v;
}

std::string gen_numeric(Rng& rng) {
  return std::to_string(rng.below(10000));
}

std::string gen_phrase(Rng& rng) {
  const std::size_t words = 2 + rng.below(2);
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < words; ++i) parts.push_back(gen_word(rng));
  return join(parts, " ");
}

std::vector<std::string> build_pool(const std::string& kind, std::uint64_t seed,
                                    std::size_t size) {
  Rng rng(seed ^ fnv1a64(kind));
  std::vector<std::string> pool;
  std::set<std::string> seen;
  while (pool.size() < size) {
    std::string v;
    if (kind == "volser") v = gen_volser(rng);
    else if (kind == "dataset") v = gen_dataset(rng);
    else if (kind == "hex") v = gen_hex(rng);
    else if (kind == "numeric") v = gen_numeric(rng);
    else if (kind == "phrase") v = gen_phrase(rng);
    else v = gen_word(rng);
    if (seen.insert(v).second) pool.push_back(std::move(v));
  }
  return pool;
}

}  // namespace

ValueModel::ValueModel(std::uint64_t seed, ValueModelConfig config) : config_(std::move(config)) {
  for (const char* kind : {"volser", "dataset", "word", "hex", "numeric", "phrase"})
    pools_[kind] = build_pool(kind, seed, config_.pool_size);
}

std::string ValueModel::pool_kind_for(const std::string& param_name) {
  const std::string n = lower(param_name);
  if (contains(n, "volser") || n.rfind("vol", 0) == 0) return "volser";
  if (contains(n, "dsn") || contains(n, "dataset") || contains(n, "data")) return "dataset";
  if (n == "rc" || contains(n, "code") || contains(n, "count") || contains(n, "reason") ||
      n.rfind("num", 0) == 0)
    return "numeric";
  if (contains(n, "hex") || contains(n, "addr") || contains(n, "token")) return "hex";
  return "word";
}

const std::vector<std::string>& ValueModel::pool(const std::string& kind) const {
  auto it = pools_.find(kind);
  if (it == pools_.end()) throw std::invalid_argument("unknown value pool '" + kind + "'");
  return it->second;
}

const std::string& ValueModel::draw(const std::string& param_name, Rng& rng) const {
  std::string kind;
  if (auto it = config_.name_pool_override.find(param_name);
      it != config_.name_pool_override.end()) {
    kind = it->second;
  } else {
    kind = pool_kind_for(param_name);
  }
  const auto& pool = this->pool(kind);
  return pool[rng.below(pool.size())];
}

namespace {

class RandomDecisions : public DecisionSource {
 public:
  explicit RandomDecisions(Rng& rng) : rng_(rng) {}
  std::size_t choose_branch(const SyntaxNode& node) override {
    return rng_.below(node.children.size());
  }
  bool include_optional(const SyntaxNode&) override { return rng_.below(2) == 1; }

 private:
  Rng& rng_;
};

// message_id -> (slot sequence -> canonical selection encoding)
using CanonicalCache = std::map<std::string, std::map<std::vector<TemplateSlot>, std::string>>;

std::string canonical_label(const MessageDefinition& def, const ResolvedTemplate& rt,
                            CanonicalCache& cache, std::size_t limit) {
  auto [it, fresh] = cache.try_emplace(def.message_id);
  if (fresh) {
    try {
      for (const auto& t : enumerate_resolved_templates(def, limit))
        it->second.emplace(t.slots, encode_selection(t.selection));
    } catch (const EnumerationLimitError&) {
      // too many templates to canonicalize; raw encodings still label events
    }
  }
  auto found = it->second.find(rt.slots);
  const std::string encoded =
      found != it->second.end() ? found->second : encode_selection(rt.selection);
  return def.message_id + "/" + encoded;
}

void apply_noise(std::vector<std::string>& tokens, Rng& rng) {
  if (tokens.empty()) return;
  if (rng.below(2) == 0 && tokens.size() > 1) {
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(rng.below(tokens.size())));
  } else {
    const char punct[] = {',', ';', '.'};
    tokens[rng.below(tokens.size())] += punct[rng.below(3)];
  }
}

}  // namespace

std::vector<LabeledLog> generate_corpus(const DefinitionStore& defs, std::size_t n,
                                        std::uint64_t seed, const GeneratorConfig& config) {
  if (n > 0 && defs.empty())
    throw std::invalid_argument("generate_corpus: empty definition store");

  std::vector<const MessageDefinition*> choices;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& [id, def] : defs) {
    double w = 1.0;
    if (auto it = config.weights.find(id); it != config.weights.end()) w = it->second;
    if (w <= 0.0) continue;
    total += w;
    choices.push_back(&def);
    cumulative.push_back(total);
  }
  if (n > 0 && choices.empty())
    throw std::invalid_argument("generate_corpus: all definition weights are zero");

  Rng rng(seed);
  // Separate stream for mutations, so the same seed draws the same content
  // with or without noise.
  Rng noise_rng(seed ^ fnv1a64("noise"));
  ValueModel model(seed, config.value_model);
  CanonicalCache cache;
  std::vector<LabeledLog> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rng.unit() * total;
    std::size_t pick = std::lower_bound(cumulative.begin(), cumulative.end(), r) -
                       cumulative.begin();
    if (pick >= choices.size()) pick = choices.size() - 1;
    const MessageDefinition& def = *choices[pick];

    RandomDecisions decisions(rng);
    const ResolvedTemplate rt = resolve_template(def, decisions);
    std::vector<std::string> tokens;
    tokens.reserve(rt.slots.size());
    for (const auto& slot : rt.slots) {
      if (slot.is_parameter) {
        for (auto& piece : split(model.draw(slot.text, rng), ' '))
          if (!piece.empty()) tokens.push_back(std::move(piece));
      } else {
        tokens.push_back(slot.text);
      }
    }
    if (config.noise_rate > 0.0 && noise_rng.unit() < config.noise_rate)
      apply_noise(tokens, noise_rng);

    out.push_back(LabeledLog{canonical_label(def, rt, cache, config.enumeration_limit),
                             join(tokens, " ")});
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, std::span<const LabeledLog> logs) {
  std::string content;
  for (const auto& log : logs) {
    content += log.event_label;
    content += '\t';
    content += log.line;
    content += '\n';
  }
  write_text_file_atomic(path, content);
}

std::vector<std::string> read_labels(const std::filesystem::path& path) {
  std::vector<std::string> labels;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t tab = line.find('\t');
    labels.push_back(tab == std::string::npos ? line : line.substr(0, tab));
  }
  return labels;
}

PairwiseCounts pairwise_counts(std::span<const std::string> labels,
                               std::span<const int> clusters) {
  if (labels.size() != clusters.size())
    throw std::invalid_argument("pairwise_counts: label/cluster length mismatch");
  std::map<std::pair<std::string, int>, std::uint64_t> cells;
  std::map<std::string, std::uint64_t> by_label;
  std::map<int, std::uint64_t> by_cluster;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++cells[{labels[i], clusters[i]}];
    ++by_label[labels[i]];
    ++by_cluster[clusters[i]];
  }
  const auto pairs = [](std::uint64_t m) { return m * (m - 1) / 2; };
  PairwiseCounts c;
  std::uint64_t same_cluster = 0, same_event = 0;
  for (const auto& [key, m] : cells) c.tp += pairs(m);
  for (const auto& [label, m] : by_label) same_event += pairs(m);
  for (const auto& [cluster, m] : by_cluster) same_cluster += pairs(m);
  c.fp = same_cluster - c.tp;
  c.fn = same_event - c.tp;
  return c;
}

Metrics metrics(const PairwiseCounts& counts) {
  Metrics m;
  if (counts.tp + counts.fp == 0) {
    m.precision = 1.0;
    m.degenerate = true;
  } else {
    m.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn == 0) {
    m.recall = 1.0;
    m.degenerate = true;
  } else {
    m.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  if (m.precision + m.recall > 0.0) {
    m.f_measure = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f_measure = 0.0;
  }
  return m;
}

}  // namespace logdoc
