#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logdoc {

/// Character profile of a value: its length followed by, for each
/// consecutive window of `window` characters (last one possibly partial),
/// the counts of digits, letters and other characters, in that order.
/// Throws std::invalid_argument for an empty value.
std::vector<double> profile(std::string_view value, int window = 4);

/// Cosine over non-negative vectors; the shorter one is zero-padded. An
/// all-zero vector yields 0. Result clamped to [0, 1].
double cosine(std::span<const double> a, std::span<const double> b);

/// Running mean of the profiles of every distinct value a parameter has
/// carried. Profile components are small integers, so the mean is kept as
/// an exact component sum divided by the distinct-value count; insertion
/// order cannot change the result. Distinct-value membership is tracked by
/// stable 64-bit hash, which is also the persisted form.
class ParameterSignature {
 public:
  explicit ParameterSignature(std::string name, int window = 4);

  static ParameterSignature restore(std::string name, int window, std::vector<double> sums,
                                    std::size_t n, std::set<std::uint64_t> value_hashes);

  /// Folds in a value; returns false (no-op) when it was already seen.
  bool update(std::string_view value);

  std::vector<double> mean_vector() const;
  const std::vector<double>& component_sums() const { return sums_; }
  const std::string& name() const { return name_; }
  int window() const { return window_; }
  std::size_t distinct_count() const { return n_; }
  bool contains(std::string_view value) const;
  const std::set<std::uint64_t>& value_hashes() const { return hashes_; }

  bool operator==(const ParameterSignature&) const = default;

 private:
  std::string name_;
  int window_ = 4;
  std::vector<double> sums_;  // zero-padded to the longest profile seen
  std::size_t n_ = 0;
  std::set<std::uint64_t> hashes_;
};

/// True iff cosine(profile(token), signature mean) is strictly above the
/// threshold. Empty tokens never match. Requires a non-empty signature.
bool token_matches_parameter(std::string_view token, const ParameterSignature& sig,
                             double threshold);

/// Cosine of two signatures' mean vectors; both must be non-empty.
double parameter_similarity(const ParameterSignature& a, const ParameterSignature& b);

/// Signatures keyed by parameter name, all sharing one window size.
/// Updates must be serialized with dictionary writes; reads may run
/// concurrently once ingestion stops.
class SignatureStore {
 public:
  explicit SignatureStore(int window = 4) : window_(window) {}

  bool update(const std::string& name, std::string_view value);
  const ParameterSignature* find(const std::string& name) const;
  void insert(ParameterSignature sig);
  int window() const { return window_; }
  std::size_t size() const { return sigs_.size(); }
  auto begin() const { return sigs_.begin(); }
  auto end() const { return sigs_.end(); }

  bool operator==(const SignatureStore&) const = default;

 private:
  int window_;
  std::map<std::string, ParameterSignature> sigs_;
};

}  // namespace logdoc
