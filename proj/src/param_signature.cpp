#include "logdoc/param_signature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "logdoc/util.hpp"

namespace logdoc {

std::vector<double> profile(std::string_view value, int window) {
  if (value.empty()) throw std::invalid_argument("profile: empty value");
  if (window < 1) throw std::invalid_argument("profile: window must be >= 1");
  std::vector<double> v;
  v.reserve(1 + 3 * (value.size() / static_cast<std::size_t>(window) + 1));
  v.push_back(static_cast<double>(value.size()));
  const std::size_t w = static_cast<std::size_t>(window);
  for (std::size_t start = 0; start < value.size(); start += w) {
    int digits = 0, letters = 0, other = 0;
    const std::size_t end = std::min(value.size(), start + w);
    for (std::size_t i = start; i < end; ++i) {
      const char c = value[i];
      if (c >= '0' && c <= '9') {
        ++digits;
      } else if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) {
        ++letters;
      } else {
        ++other;  // punctuation, symbols, non-ASCII bytes
      }
    }
    v.push_back(digits);
    v.push_back(letters);
    v.push_back(other);
  }
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

ParameterSignature::ParameterSignature(std::string name, int window)
    : name_(std::move(name)), window_(window) {}

ParameterSignature ParameterSignature::restore(std::string name, int window,
                                               std::vector<double> sums, std::size_t n,
                                               std::set<std::uint64_t> value_hashes) {
  ParameterSignature sig(std::move(name), window);
  sig.sums_ = std::move(sums);
  sig.n_ = n;
  sig.hashes_ = std::move(value_hashes);
  return sig;
}

bool ParameterSignature::update(std::string_view value) {
  if (value.empty()) return false;
  if (!hashes_.insert(fnv1a64(value)).second) return false;
  std::vector<double> p = profile(value, window_);
  if (p.size() > sums_.size()) sums_.resize(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) sums_[i] += p[i];
  ++n_;
  return true;
}

std::vector<double> ParameterSignature::mean_vector() const {
  std::vector<double> mean(sums_.size(), 0.0);
  if (n_ == 0) return mean;
  for (std::size_t i = 0; i < sums_.size(); ++i) mean[i] = sums_[i] / static_cast<double>(n_);
  return mean;
}

bool ParameterSignature::contains(std::string_view value) const {
  return hashes_.count(fnv1a64(value)) > 0;
}

bool token_matches_parameter(std::string_view token, const ParameterSignature& sig,
                             double threshold) {
  if (sig.distinct_count() == 0)
    throw std::invalid_argument("token_matches_parameter: empty signature");
  if (token.empty()) return false;
  const auto mean = sig.mean_vector();
  return cosine(profile(token, sig.window()), mean) > threshold;
}

double parameter_similarity(const ParameterSignature& a, const ParameterSignature& b) {
  if (a.distinct_count() == 0 || b.distinct_count() == 0)
    throw std::invalid_argument("parameter_similarity: empty signature");
  const auto ma = a.mean_vector();
  const auto mb = b.mean_vector();
  return cosine(ma, mb);
}

bool SignatureStore::update(const std::string& name, std::string_view value) {
  auto it = sigs_.find(name);
  if (it == sigs_.end()) it = sigs_.emplace(name, ParameterSignature(name, window_)).first;
  return it->second.update(value);
}

const ParameterSignature* SignatureStore::find(const std::string& name) const {
  auto it = sigs_.find(name);
  return it == sigs_.end() ? nullptr : &it->second;
}

void SignatureStore::insert(ParameterSignature sig) {
  std::string key = sig.name();
  sigs_.insert_or_assign(std::move(key), std::move(sig));
}

}  // namespace logdoc
