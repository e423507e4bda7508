#include "logdoc/template_miner.hpp"

#include <algorithm>
#include <stdexcept>

namespace logdoc {

TemplateToken TemplateToken::keyword(std::string text) {
  return TemplateToken{Kind::keyword, std::move(text)};
}

TemplateToken TemplateToken::param(std::string name) {
  return TemplateToken{Kind::named_param, std::move(name)};
}

TemplateToken TemplateToken::wildcard() { return TemplateToken{Kind::wildcard, {}}; }

std::string TemplateToken::render() const {
  switch (kind) {
    case Kind::keyword: return text;
    case Kind::named_param: return "<" + text + ">";
    case Kind::wildcard: return "<*>";
  }
  return {};
}

std::string render_template(std::span<const TemplateToken> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i].render();
  }
  return out;
}

namespace {

TokenSim missing_signature_case(std::size_t* missing_counter) {
  if (missing_counter) ++*missing_counter;
  return {0.5, true};
}

}  // namespace

TokenSim token_sim(const TemplateToken& a, const TemplateToken& b, const SignatureStore& sigs,
                   const MinerConfig& cfg, std::size_t* missing_counter) {
  using Kind = TemplateToken::Kind;
  if (a.kind == Kind::wildcard || b.kind == Kind::wildcard) return {1.0, true};
  if (a.kind == Kind::keyword && b.kind == Kind::keyword)
    return a.text == b.text ? TokenSim{1.0, true} : TokenSim{0.0, false};
  if (a.kind == Kind::named_param && b.kind == Kind::named_param) {
    const ParameterSignature* sa = sigs.find(a.text);
    const ParameterSignature* sb = sigs.find(b.text);
    if (!sa || !sb || sa->distinct_count() == 0 || sb->distinct_count() == 0)
      return missing_signature_case(missing_counter);
    const double s = parameter_similarity(*sa, *sb);
    return {s, s > cfg.param_match_threshold};
  }
  const TemplateToken& param = a.kind == Kind::named_param ? a : b;
  const TemplateToken& keyword = a.kind == Kind::named_param ? b : a;
  const ParameterSignature* sig = sigs.find(param.text);
  if (!sig || sig->distinct_count() == 0) return missing_signature_case(missing_counter);
  if (keyword.text.empty()) return {0.0, false};
  const auto mean = sig->mean_vector();
  const double c = cosine(profile(keyword.text, sig->window()), mean);
  const bool matched = c > cfg.param_match_threshold;
  return {matched ? 1.0 : c, matched};
}

double seq_sim(std::span<const TemplateToken> a, std::span<const TemplateToken> b,
               const SignatureStore& sigs, const MinerConfig& cfg,
               std::size_t* missing_counter) {
  if (a.size() != b.size())
    throw std::invalid_argument("seq_sim: sequences differ in length");
  if (a.empty()) return 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    total += token_sim(a[i], b[i], sigs, cfg, missing_counter).score;
  return total / static_cast<double>(a.size());
}

namespace {

using Kind = TemplateToken::Kind;

// Priority among non-equal tokens: longer parameter name, then shorter,
// then wildcard; bare keywords lose to all of them.
const TemplateToken& higher_priority(const TemplateToken& x, const TemplateToken& y) {
  const auto rank = [](const TemplateToken& t) {
    switch (t.kind) {
      case Kind::named_param: return 2;
      case Kind::wildcard: return 1;
      case Kind::keyword: return 0;
    }
    return 0;
  };
  if (rank(x) != rank(y)) return rank(x) > rank(y) ? x : y;
  if (x.kind == Kind::named_param) {
    if (x.text.size() != y.text.size()) return x.text.size() > y.text.size() ? x : y;
    return x.text <= y.text ? x : y;
  }
  return x;
}

}  // namespace

std::vector<TemplateToken> merge_templates(std::span<const TemplateToken> a,
                                           std::span<const TemplateToken> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("merge_templates: templates differ in length");
  std::vector<TemplateToken> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) {
      out.push_back(a[i]);
    } else if (a[i].kind == Kind::keyword && b[i].kind == Kind::keyword) {
      out.push_back(TemplateToken::wildcard());
    } else {
      out.push_back(higher_priority(a[i], b[i]));
    }
  }
  return out;
}

TemplateMiner::TemplateMiner(MinerConfig cfg, const SignatureStore& sigs)
    : cfg_(cfg), sigs_(&sigs) {
  if (cfg_.tree_depth < 2) throw std::invalid_argument("tree_depth must be >= 2");
  if (cfg_.sim_threshold <= 0.0 || cfg_.sim_threshold > 1.0)
    throw std::invalid_argument("sim_threshold must be in (0, 1]");
}

TemplateMiner::TrieNode* TemplateMiner::route(std::span<const TemplateToken> approx) {
  // Reserved branch for parameter/wildcard routing tokens, and a separate
  // overflow branch once a node is at max_children. The count level never
  // overflows, so every leaf holds equal-length templates.
  static const std::string kParamBranch = "\x01param";
  static const std::string kOverflowBranch = "\x01overflow";

  TrieNode* node = &root_;
  const std::string count_key = "#" + std::to_string(approx.size());
  auto& count_child = node->children[count_key];
  if (!count_child) count_child = std::make_unique<TrieNode>();
  node = count_child.get();

  const std::size_t levels =
      std::min(approx.size(), static_cast<std::size_t>(cfg_.tree_depth - 2));
  for (std::size_t i = 0; i < levels; ++i) {
    std::string key = approx[i].kind == TemplateToken::Kind::keyword ? "k" + approx[i].text
                                                                     : kParamBranch;
    auto it = node->children.find(key);
    if (it == node->children.end()) {
      if (node->children.size() >= static_cast<std::size_t>(cfg_.max_children) &&
          key != kParamBranch) {
        key = kOverflowBranch;
        it = node->children.find(key);
      }
      if (it == node->children.end())
        it = node->children.emplace(key, std::make_unique<TrieNode>()).first;
    }
    node = it->second.get();
  }
  return node;
}

TemplateMiner::AddResult TemplateMiner::add_log(std::span<const TemplateToken> approx,
                                                std::size_t log_id) {
  if (approx.empty()) throw std::invalid_argument("add_log: empty template");
  TrieNode* leaf = route(approx);

  int best_id = -1;
  double best_sim = -1.0;
  for (int id : leaf->cluster_ids) {
    const TemplateCluster& cluster = clusters_[static_cast<std::size_t>(id) - 1];
    const double sim = seq_sim(cluster.tokens, approx, *sigs_, cfg_, &missing_signature_);
    if (sim > best_sim) {  // ties keep the earliest cluster
      best_sim = sim;
      best_id = id;
    }
  }

  if (best_id >= 0 && best_sim > cfg_.sim_threshold) {
    TemplateCluster& cluster = clusters_[static_cast<std::size_t>(best_id) - 1];
    cluster.tokens = merge_templates(cluster.tokens, approx);
    cluster.member_log_ids.push_back(log_id);
    cluster.member_count = cluster.member_log_ids.size();
    return {best_id, cluster.tokens, false};
  }

  TemplateCluster cluster;
  cluster.cluster_id = static_cast<int>(clusters_.size()) + 1;
  cluster.tokens.assign(approx.begin(), approx.end());
  cluster.member_log_ids.push_back(log_id);
  cluster.member_count = 1;
  leaf->cluster_ids.push_back(cluster.cluster_id);
  clusters_.push_back(cluster);
  return {cluster.cluster_id, clusters_.back().tokens, true};
}

std::vector<TemplateCluster> TemplateMiner::get_templates() const { return clusters_; }

const TemplateCluster* TemplateMiner::find_cluster(int cluster_id) const {
  if (cluster_id < 1 || static_cast<std::size_t>(cluster_id) > clusters_.size()) return nullptr;
  return &clusters_[static_cast<std::size_t>(cluster_id) - 1];
}

}  // namespace logdoc
