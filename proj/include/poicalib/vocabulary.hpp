#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poicalib {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

/// Sorted set of opaque string ids with dense indices.
///
/// Indices follow lexicographic id order, so comparing two indices is the
/// same as comparing their ids. Every deterministic tie-break in the library
/// relies on this.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::string& id(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  std::optional<std::uint32_t> find(std::string_view id) const;
  /// Throws poicalib::Error (data) for unknown ids.
  std::uint32_t at(std::string_view id, std::string_view what = "id") const;
  bool contains(std::string_view id) const { return find(id).has_value(); }

 private:
  std::vector<std::string> ids_;
};

}  // namespace poicalib
