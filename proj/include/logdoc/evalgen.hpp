#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "logdoc/message_defs.hpp"

namespace logdoc {

/// Deterministic RNG facade: raw engine outputs only, so sequences do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t k) { return k == 0 ? 0 : next() % k; }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct ValueModelConfig {
  std::size_t pool_size = 160;  // distinct values per pool
  // Explicit parameter-name -> pool overrides ("volser", "dataset", "word",
  // "hex", "numeric", "phrase"); otherwise the name decides.
  std::map<std::string, std::string> name_pool_override;
};

/// Finite, seeded vocabularies of parameter values, one per pool kind.
/// Parameters that map to the same pool share values, which is what lets
/// undocumented message types reuse values learned from documented ones.
class ValueModel {
 public:
  ValueModel(std::uint64_t seed, ValueModelConfig config = {});

  const std::string& draw(const std::string& param_name, Rng& rng) const;
  static std::string pool_kind_for(const std::string& param_name);
  const std::vector<std::string>& pool(const std::string& kind) const;

 private:
  ValueModelConfig config_;
  std::map<std::string, std::vector<std::string>> pools_;
};

struct GeneratorConfig {
  std::map<std::string, double> weights;  // message_id -> weight; default 1
  double noise_rate = 0.0;                // chance a line gets one mutation
  ValueModelConfig value_model;
  std::size_t enumeration_limit = 1024;   // for canonical event labels
};

/// A generated log line with its ground-truth event label
/// "message_id/selection-encoding". Labels are canonicalized through the
/// deduplicated template enumeration, so two lines share a label exactly
/// when they instantiate the same resolved template.
struct LabeledLog {
  std::string event_label;
  std::string line;
};

std::vector<LabeledLog> generate_corpus(const DefinitionStore& defs, std::size_t n,
                                        std::uint64_t seed, const GeneratorConfig& config = {});

/// Corpus file: one "event_label<TAB>line" record per line.
void write_corpus(const std::filesystem::path& path, std::span<const LabeledLog> logs);
std::vector<std::string> read_labels(const std::filesystem::path& path);

struct PairwiseCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  bool operator==(const PairwiseCounts&) const = default;
};

/// Pairwise agreement counts over unordered log pairs, computed from the
/// label/cluster contingency table. The O(n^2) enumeration lives in the
/// test suite as the independent oracle.
PairwiseCounts pairwise_counts(std::span<const std::string> labels, std::span<const int> clusters);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  bool degenerate = false;  // a zero denominator was reported as 1.0
};

/// precision = tp/(tp+fp), recall = tp/(tp+fn), f = harmonic mean. A zero
/// denominator yields 1.0 for that metric with the degenerate flag set.
Metrics metrics(const PairwiseCounts& counts);

}  // namespace logdoc
