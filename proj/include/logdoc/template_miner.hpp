#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "logdoc/param_signature.hpp"

namespace logdoc {

/// One template position: fixed keyword text, a named parameter placeholder
/// (rendered "<name>"), or the anonymous wildcard "<*>".
struct TemplateToken {
  enum class Kind { keyword, named_param, wildcard };
  Kind kind = Kind::keyword;
  std::string text;  // keyword text or parameter name

  static TemplateToken keyword(std::string text);
  static TemplateToken param(std::string name);
  static TemplateToken wildcard();

  std::string render() const;
  bool operator==(const TemplateToken&) const = default;
};

std::string render_template(std::span<const TemplateToken> tokens);

struct MinerConfig {
  int tree_depth = 4;        // count level + (tree_depth - 2) token levels
  int max_children = 100;    // per internal node; overflow shares one branch
  double sim_threshold = 0.5;
  double param_match_threshold = 0.90;  // shared with token_matches_parameter
};

/// Similarity of two template tokens. `score` feeds clustering; `match` is
/// the thresholded decision used for prefix-style matching. A named
/// parameter against a keyword scores 1 when the keyword text matches the
/// parameter's signature at the threshold, else the raw cosine. A missing
/// signature degrades to a wildcard-like match of score 0.5 and bumps
/// *missing_counter when given.
struct TokenSim {
  double score = 0.0;
  bool match = false;
};

TokenSim token_sim(const TemplateToken& a, const TemplateToken& b, const SignatureStore& sigs,
                   const MinerConfig& cfg, std::size_t* missing_counter = nullptr);

/// Mean positional token_sim score; throws std::invalid_argument on length
/// mismatch (the router only compares equal-length sequences).
double seq_sim(std::span<const TemplateToken> a, std::span<const TemplateToken> b,
               const SignatureStore& sigs, const MinerConfig& cfg,
               std::size_t* missing_counter = nullptr);

/// Position-wise merge. Equal tokens are kept; differing keywords become
/// the wildcard; any pair involving parameters keeps the higher-priority
/// one: longer-named parameter > shorter-named parameter > wildcard >
/// keyword. Equal-length different names take the lexicographically
/// smaller. Length-preserving; throws on length mismatch.
std::vector<TemplateToken> merge_templates(std::span<const TemplateToken> a,
                                           std::span<const TemplateToken> b);

struct TemplateCluster {
  int cluster_id = 0;
  std::vector<TemplateToken> tokens;
  std::size_t member_count = 0;
  std::vector<std::size_t> member_log_ids;

  std::string rendered() const { return render_template(tokens); }
};

/// Online Drain-style miner. Routes by token count, then by the first
/// (tree_depth - 2) tokens; parameter and wildcard routing tokens share one
/// reserved branch so annotation never fragments routing. Within a leaf the
/// most similar cluster above sim_threshold absorbs the log (merging
/// templates), otherwise a new cluster is created. Ingestion is
/// single-writer; get_templates may run concurrently with no writer.
class TemplateMiner {
 public:
  TemplateMiner(MinerConfig cfg, const SignatureStore& sigs);

  struct AddResult {
    int cluster_id = 0;
    std::vector<TemplateToken> merged;  // cluster template after the add
    bool created = false;
  };

  AddResult add_log(std::span<const TemplateToken> approx, std::size_t log_id);

  std::vector<TemplateCluster> get_templates() const;  // stable cluster_id order
  const TemplateCluster* find_cluster(int cluster_id) const;
  std::size_t cluster_count() const { return clusters_.size(); }
  std::size_t missing_signature_events() const { return missing_signature_; }
  const MinerConfig& config() const { return cfg_; }

 private:
  struct TrieNode {
    std::map<std::string, std::unique_ptr<TrieNode>> children;
    std::vector<int> cluster_ids;
  };

  TrieNode* route(std::span<const TemplateToken> approx);

  MinerConfig cfg_;
  const SignatureStore* sigs_;
  TrieNode root_;
  std::vector<TemplateCluster> clusters_;
  std::size_t missing_signature_ = 0;
};

}  // namespace logdoc
