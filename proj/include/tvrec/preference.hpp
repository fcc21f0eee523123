#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tvrec/datamodel.hpp"
#include "tvrec/textenc.hpp"

namespace tvrec {

enum class PreferenceMode { global, time_aware };

std::string_view to_string(PreferenceMode mode);
/// Accepts "global" and "time-aware"; throws ConfigError otherwise.
PreferenceMode parse_preference_mode(std::string_view name);

/// Item embeddings indexed by ProgramIdx; programs never encoded hold nullopt.
using ItemEmbeddings = std::vector<std::optional<Embedding>>;

/**
 * Content profiles of users, precomputed for inference.
 *
 * The global profile of a user is the mean embedding of the distinct items
 * with a positive count in the user's tensor row. In time-aware mode each
 * (user, slot) with at least one item also gets the mean over the distinct
 * items counted in that slot. Profiles are plain means (not renormalized).
 */
class PreferenceModel {
 public:
  PreferenceModel() = default;

  /// Throws DataError listing program ids that lack an embedding.
  static PreferenceModel build(const InteractionTensor& tensor, const Catalog& catalog,
                               const ItemEmbeddings& embeddings, PreferenceMode mode);

  PreferenceMode mode() const { return mode_; }
  std::size_t user_count() const { return global_.size(); }

  const Embedding& global_profile(UserIdx u) const { return global_[u]; }
  /// nullptr when the user has no items in that slot or the model is global.
  const Embedding* slot_profile(UserIdx u, SlotIndex slot) const;
  std::size_t slot_profile_count() const { return slot_vectors_.size(); }

  /// Profile matched against a program starting in `start_slot`: the slot
  /// profile in time-aware mode, falling back to the global profile.
  const Embedding& profile_for(UserIdx u, SlotIndex start_slot) const {
    if (mode_ == PreferenceMode::time_aware) {
      if (const Embedding* e = slot_profile(u, start_slot)) return *e;
    }
    return global_[u];
  }

  double score(UserIdx u, const Embedding& item, SlotIndex start_slot) const {
    return profile_for(u, start_slot).dot(item);
  }

  nlohmann::json to_json(const InteractionTensor& tensor) const;
  /// Users are matched by name against `tensor`; throws DataError on mismatch.
  static PreferenceModel from_json(const nlohmann::json& j, const InteractionTensor& tensor);

 private:
  PreferenceMode mode_ = PreferenceMode::global;
  std::vector<Embedding> global_;
  // Per-user slot profiles, row-compressed and sorted by slot.
  std::vector<std::size_t> slot_offsets_{0};
  std::vector<std::uint16_t> slot_keys_;
  std::vector<Embedding> slot_vectors_;
};

}  // namespace tvrec
