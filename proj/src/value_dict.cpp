#include "logdoc/value_dict.hpp"

#include <json.hpp>

#include <algorithm>

#include "logdoc/util.hpp"

namespace logdoc {

bool complexity_filter(std::string_view value, const ComplexityConfig& config) {
  if (value.size() < config.min_len) return false;
  if (config.reject_numeric) {
    bool numeric_shape = !value.empty();
    for (char c : value) {
      if (!((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == ',')) {
        numeric_shape = false;
        break;
      }
    }
    if (numeric_shape) return false;
  }
  return true;
}

bool ValueDictionary::record(const std::string& value, const std::string& name,
                             const std::string& message_id) {
  if (!complexity_filter(value, config_)) return false;
  entries_[value][name].insert(message_id);
  const std::size_t space = value.find(' ');
  if (space != std::string::npos) {
    auto& list = first_token_index_[value.substr(0, space)];
    if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
  }
  return true;
}

std::string ValueDictionary::best_name(const std::string& value) const {
  auto it = entries_.find(value);
  if (it == entries_.end()) return {};
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [name, ids] : it->second) {
    if (ids.size() > best_count) {  // map order makes ties lexicographic
      best_count = ids.size();
      best = name;
    }
  }
  return best;
}

std::size_t ValueDictionary::count_for(const std::string& value, const std::string& name) const {
  auto it = entries_.find(value);
  if (it == entries_.end()) return 0;
  auto nit = it->second.find(name);
  return nit == it->second.end() ? 0 : nit->second.size();
}

std::vector<Annotation> ValueDictionary::annotate(std::span<const Token> tokens) const {
  std::vector<Annotation> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::string& t = tokens[i].text;
    std::size_t best_len = 0;
    const std::string* best_value = nullptr;
    if (auto it = entries_.find(t); it != entries_.end()) {
      best_len = 1;
      best_value = &it->first;
    }
    if (auto ft = first_token_index_.find(t); ft != first_token_index_.end()) {
      for (const std::string& candidate : ft->second) {
        const std::vector<std::string> parts = split(candidate, ' ');
        if (parts.size() <= best_len || i + parts.size() > tokens.size()) continue;
        bool all = true;
        for (std::size_t k = 0; k < parts.size(); ++k) {
          if (tokens[i + k].text != parts[k]) {
            all = false;
            break;
          }
        }
        if (all) {
          auto eit = entries_.find(candidate);
          if (eit != entries_.end()) {
            best_len = parts.size();
            best_value = &eit->first;
          }
        }
      }
    }
    if (best_value) {
      out.push_back(Annotation{{i, i + best_len}, best_name(*best_value), *best_value});
      i += best_len;
    } else {
      ++i;
    }
  }
  return out;
}

namespace {

using nlohmann::json;

}  // namespace

std::string stores_to_json(const ValueDictionary& dict, const SignatureStore& sigs) {
  json values = json::object();
  for (const auto& [value, names] : dict.entries()) {
    json name_list = json::array();
    for (const auto& [name, ids] : names) {
      json rec;
      rec["name"] = name;
      rec["count"] = ids.size();
      rec["ids"] = json::array();
      for (const auto& id : ids) rec["ids"].push_back(id);
      name_list.push_back(std::move(rec));
    }
    values[value] = std::move(name_list);
  }
  json signatures = json::object();
  for (const auto& [name, sig] : sigs) {
    json rec;
    rec["mean_vector"] = sig.mean_vector();
    rec["sum_vector"] = sig.component_sums();
    rec["n"] = sig.distinct_count();
    rec["value_hashes"] = json::array();
    for (std::uint64_t h : sig.value_hashes()) rec["value_hashes"].push_back(h);
    signatures[name] = std::move(rec);
  }
  json doc;
  doc["values"] = std::move(values);
  doc["signatures"] = std::move(signatures);
  doc["window"] = sigs.window();
  return doc.dump(2) + "\n";
}

LoadedStores stores_from_json(std::string_view json_text, ComplexityConfig config) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("dictionary file is not valid json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("values"))
    throw SchemaError("dictionary file: missing 'values' object");
  LoadedStores out{ValueDictionary(config), SignatureStore(doc.value("window", 4))};
  for (auto it = doc["values"].begin(); it != doc["values"].end(); ++it) {
    const std::string& value = it.key();
    if (!it.value().is_array())
      throw SchemaError("dictionary value '" + value + "': name list must be an array");
    for (const auto& rec : it.value()) {
      if (!rec.is_object() || !rec.contains("name") || !rec.contains("ids"))
        throw SchemaError("dictionary value '" + value + "': malformed name record");
      const std::string name = rec["name"].get<std::string>();
      for (const auto& id : rec["ids"])
        out.dict.record(value, name, id.get<std::string>());
      if (rec.contains("count") &&
          rec["count"].get<std::size_t>() != out.dict.count_for(value, name))
        throw SchemaError("dictionary value '" + value + "': count does not match ids for '" +
                          name + "'");
    }
  }
  if (doc.contains("signatures")) {
    for (auto it = doc["signatures"].begin(); it != doc["signatures"].end(); ++it) {
      const json& rec = it.value();
      if (!rec.is_object() || !rec.contains("n"))
        throw SchemaError("signature '" + it.key() + "': malformed record");
      std::vector<double> sums;
      if (rec.contains("sum_vector")) {
        sums = rec["sum_vector"].get<std::vector<double>>();
      } else if (rec.contains("mean_vector")) {
        sums = rec["mean_vector"].get<std::vector<double>>();
        for (double& s : sums) s *= static_cast<double>(rec["n"].get<std::size_t>());
      }
      std::set<std::uint64_t> hashes;
      if (rec.contains("value_hashes"))
        for (const auto& h : rec["value_hashes"]) hashes.insert(h.get<std::uint64_t>());
      out.signatures.insert(ParameterSignature::restore(
          it.key(), out.signatures.window(), std::move(sums), rec["n"].get<std::size_t>(),
          std::move(hashes)));
    }
  }
  return out;
}

void save_stores(const std::filesystem::path& path, const ValueDictionary& dict,
                 const SignatureStore& sigs) {
  write_text_file_atomic(path, stores_to_json(dict, sigs));
}

LoadedStores load_stores(const std::filesystem::path& path, ComplexityConfig config) {
  return stores_from_json(read_text_file(path), config);
}

}  // namespace logdoc
