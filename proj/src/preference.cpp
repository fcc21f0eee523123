#include "tvrec/preference.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace tvrec {

std::string_view to_string(PreferenceMode mode) {
  return mode == PreferenceMode::global ? "global" : "time-aware";
}

PreferenceMode parse_preference_mode(std::string_view name) {
  if (name == "global") return PreferenceMode::global;
  if (name == "time-aware") return PreferenceMode::time_aware;
  throw ConfigError("unknown preference mode '" + std::string(name) + "'");
}

namespace {

Embedding mean_of(const std::vector<ProgramIdx>& items, const ItemEmbeddings& embeddings) {
  std::vector<const Embedding*> vectors;
  vectors.reserve(items.size());
  for (auto i : items) vectors.push_back(&*embeddings[i]);
  return Embedding::mean(vectors);
}

void sort_unique(std::vector<ProgramIdx>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

nlohmann::json embedding_json(const Embedding& e) {
  return {{"i", std::vector<std::uint32_t>(e.indices().begin(), e.indices().end())},
          {"v", std::vector<double>(e.values().begin(), e.values().end())}};
}

Embedding embedding_from_json(const nlohmann::json& j) {
  return Embedding(j.at("i").get<std::vector<std::uint32_t>>(), j.at("v").get<std::vector<double>>());
}

}  // namespace

PreferenceModel PreferenceModel::build(const InteractionTensor& tensor, const Catalog& catalog,
                                       const ItemEmbeddings& embeddings, PreferenceMode mode) {
  std::set<std::string> missing;
  for (UserIdx u = 0; u < tensor.user_count(); ++u) {
    for (const auto& c : tensor.cells(u)) {
      if (c.item >= embeddings.size() || !embeddings[c.item]) {
        missing.insert(c.item < catalog.size() ? catalog.meta(c.item).program
                                               : "#" + std::to_string(c.item));
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "items without embeddings:";
    for (const auto& id : missing) msg += " " + id;
    throw DataError(msg);
  }

  PreferenceModel m;
  m.mode_ = mode;
  m.global_.reserve(tensor.user_count());
  std::vector<ProgramIdx> items;
  for (UserIdx u = 0; u < tensor.user_count(); ++u) {
    auto row = tensor.cells(u);
    items.clear();
    for (const auto& c : row) items.push_back(c.item);
    sort_unique(items);
    m.global_.push_back(mean_of(items, embeddings));

    if (mode == PreferenceMode::time_aware) {
      // Row is sorted by slot first, so each slot is one contiguous block.
      for (std::size_t i = 0; i < row.size();) {
        std::size_t j = i;
        items.clear();
        while (j < row.size() && row[j].slot == row[i].slot) items.push_back(row[j++].item);
        sort_unique(items);
        m.slot_keys_.push_back(row[i].slot);
        m.slot_vectors_.push_back(mean_of(items, embeddings));
        i = j;
      }
    }
    m.slot_offsets_.push_back(m.slot_keys_.size());
  }
  return m;
}

const Embedding* PreferenceModel::slot_profile(UserIdx u, SlotIndex slot) const {
  if (mode_ != PreferenceMode::time_aware) return nullptr;
  const auto first = slot_keys_.begin() + static_cast<std::ptrdiff_t>(slot_offsets_[u]);
  const auto last = slot_keys_.begin() + static_cast<std::ptrdiff_t>(slot_offsets_[u + 1]);
  auto it = std::lower_bound(first, last, static_cast<std::uint16_t>(slot.value()));
  if (it == last || *it != slot.value()) return nullptr;
  return &slot_vectors_[static_cast<std::size_t>(it - slot_keys_.begin())];
}

nlohmann::json PreferenceModel::to_json(const InteractionTensor& tensor) const {
  nlohmann::json users = nlohmann::json::array();
  for (UserIdx u = 0; u < global_.size(); ++u) {
    nlohmann::json slots = nlohmann::json::array();
    for (std::size_t k = slot_offsets_[u]; k < slot_offsets_[u + 1]; ++k) {
      auto e = embedding_json(slot_vectors_[k]);
      e["slot"] = slot_keys_[k];
      slots.push_back(std::move(e));
    }
    users.push_back({{"user", tensor.user_name(u)},
                     {"global", embedding_json(global_[u])},
                     {"slots", std::move(slots)}});
  }
  return {{"mode", std::string(to_string(mode_))}, {"users", std::move(users)}};
}

PreferenceModel PreferenceModel::from_json(const nlohmann::json& j, const InteractionTensor& tensor) {
  try {
    PreferenceModel m;
    m.mode_ = parse_preference_mode(j.at("mode").get<std::string>());
    const auto& users = j.at("users");
    if (users.size() != tensor.user_count()) {
      throw DataError("preference model covers " + std::to_string(users.size()) +
                      " users, tensor has " + std::to_string(tensor.user_count()));
    }
    m.global_.resize(tensor.user_count());
    std::vector<const nlohmann::json*> by_user(tensor.user_count(), nullptr);
    for (const auto& entry : users) {
      auto u = tensor.find_user(entry.at("user").get<std::string>());
      if (!u || by_user[*u] != nullptr) throw DataError("preference model users do not match tensor");
      by_user[*u] = &entry;
    }
    for (UserIdx u = 0; u < tensor.user_count(); ++u) {
      const auto& entry = *by_user[u];
      m.global_[u] = embedding_from_json(entry.at("global"));
      for (const auto& s : entry.at("slots")) {
        m.slot_keys_.push_back(s.at("slot").get<std::uint16_t>());
        m.slot_vectors_.push_back(embedding_from_json(s));
      }
      m.slot_offsets_.push_back(m.slot_keys_.size());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed preference model: ") + e.what());
  }
}

}  // namespace tvrec
