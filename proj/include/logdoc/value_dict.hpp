#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logdoc/param_signature.hpp"
#include "logdoc/tree_parser.hpp"

namespace logdoc {

struct ComplexityConfig {
  std::size_t min_len = 4;
  bool reject_numeric = true;
};

/// Admission rule for stored values: long enough, and not a plain number
/// (digits, sign, decimal point, thousands separators only).
bool complexity_filter(std::string_view value, const ComplexityConfig& config = {});

struct Annotation {
  TokenSpan span;
  std::string name;
  std::string value;
  bool operator==(const Annotation&) const = default;
};

/// Parameter values extracted from documented messages, each mapped to the
/// parameter names it has carried with a per-name count of distinct message
/// IDs. Single writer; concurrent annotate calls are fine with no writer.
class ValueDictionary {
 public:
  explicit ValueDictionary(ComplexityConfig config = {}) : config_(config) {}

  /// Stores one (value, name, message_id) observation. Returns false when
  /// the value fails the complexity filter (nothing stored). Re-recording
  /// an already counted message ID is a no-op.
  bool record(const std::string& value, const std::string& name, const std::string& message_id);

  /// Left-to-right scan: at each position the longest stored value that
  /// fully matches (single token, or an indexed multi-token value) is
  /// annotated with the name holding the largest distinct-ID count (ties:
  /// lexicographically smallest). The scan resumes after a matched span.
  std::vector<Annotation> annotate(std::span<const Token> tokens) const;

  /// Largest-count name for a stored value, or empty when absent.
  std::string best_name(const std::string& value) const;

  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& value) const { return entries_.count(value) > 0; }
  std::size_t count_for(const std::string& value, const std::string& name) const;

  // value -> name -> distinct message IDs
  using EntryMap = std::map<std::string, std::map<std::string, std::set<std::string>>>;
  const EntryMap& entries() const { return entries_; }
  const ComplexityConfig& config() const { return config_; }

  bool operator==(const ValueDictionary& other) const { return entries_ == other.entries_; }

 private:
  ComplexityConfig config_;
  EntryMap entries_;
  // first token -> multi-token values starting with it
  std::map<std::string, std::vector<std::string>> first_token_index_;
};

/// One persistence document holds the dictionary ("values": value ->
/// [{name, count, ids}]) with the signatures alongside it ("signatures":
/// name -> {mean_vector, n, value_hashes, ...}).
std::string stores_to_json(const ValueDictionary& dict, const SignatureStore& sigs);

struct LoadedStores {
  ValueDictionary dict;
  SignatureStore signatures;
};

LoadedStores stores_from_json(std::string_view json_text, ComplexityConfig config = {});

void save_stores(const std::filesystem::path& path, const ValueDictionary& dict,
                 const SignatureStore& sigs);
LoadedStores load_stores(const std::filesystem::path& path, ComplexityConfig config = {});

}  // namespace logdoc
