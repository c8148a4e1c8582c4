#include "poicalib/vocabulary.hpp"

#include <algorithm>

#include "poicalib/error.hpp"

namespace poicalib {

Vocabulary::Vocabulary(std::vector<std::string> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - ids_.begin());
}

std::uint32_t Vocabulary::at(std::string_view id, std::string_view what) const {
  if (auto index = find(id)) return *index;
  throw data_error("", "unknown " + std::string(what) + " '" + std::string(id) + "'");
}

}  // namespace poicalib
