#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hanzi {

using Component = std::string;

/// Ordered components of one character; index 0 is the radical.
using ComponentList = std::vector<Component>;

/// Filler for component slots beyond a character's last listed component.
inline constexpr std::string_view kPadComponent = "<PAD>";
/// Stand-in radical for characters that have no lexicon entry.
inline constexpr std::string_view kUnkComponent = "<UNK>";

struct VariantMapping {
  Component variant;
  Component original;
};

/// The 24 radical variant rows, in printed (row-major) order. Two rows share
/// the variant 衤; lookups resolve it to the first one (示).
std::span<const VariantMapping> builtin_variant_mappings();

/// Variant component -> original component. When a variant appears more than
/// once in a batch of mappings, the first row wins.
class VariantTable {
 public:
  VariantTable() = default;

  static VariantTable builtin();
  static VariantTable from_mappings(std::span<const VariantMapping> mappings);

  /// Adds `mappings` on top of the current table. Keys present in `mappings`
  /// replace existing ones; within `mappings` the first row wins.
  void override_with(std::span<const VariantMapping> mappings);

  /// Follows the mapping chain to its fixed point, so the result is always
  /// idempotent. Unknown components map to themselves.
  Component normalize(std::string_view component) const;

  bool contains(std::string_view component) const;
  std::size_t size() const noexcept { return table_.size(); }
  const std::map<Component, Component, std::less<>>& mappings() const noexcept {
    return table_;
  }

 private:
  std::map<Component, Component, std::less<>> table_;
};

/// Parses `<variant> <original>` lines. `#` starts a comment line.
std::vector<VariantMapping> parse_variant_mappings(std::istream& in,
                                                   const std::string& source);
std::vector<VariantMapping> load_variant_mappings(
    const std::filesystem::path& path);

/// Character -> component list. Immutable after construction; all stored
/// components are fixed points of the variant table.
class ComponentLexicon {
 public:
  /// Normalizes every component through `variants`. Throws Error if any list
  /// is empty.
  ComponentLexicon(std::map<char32_t, ComponentList> entries,
                   VariantTable variants);

  const ComponentList* find(char32_t character) const;
  Component normalize_variant(std::string_view component) const {
    return variants_.normalize(component);
  }

  /// Exactly `m` components: radical first, padded with kPadComponent.
  /// Characters without an entry yield [kUnkComponent, kPadComponent, ...].
  ComponentList components_of(char32_t character, std::size_t m) const;

  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<char32_t, ComponentList>& entries() const noexcept {
    return entries_;
  }
  const VariantTable& variants() const noexcept { return variants_; }

  /// Every distinct component in the entries plus both sides of the variant
  /// table, sorted.
  std::vector<Component> component_inventory() const;

  /// Number of characters per component-list length.
  std::map<std::size_t, std::size_t> component_count_histogram() const;

 private:
  std::map<char32_t, ComponentList> entries_;
  VariantTable variants_;
};

/// Parses `<char> <radical> [<component> ...]` lines.
/// Errors (ParseError, with line): malformed character field, duplicate
/// character, empty component list, and a file with no entries at all.
ComponentLexicon parse_lexicon(std::istream& in, const std::string& source,
                               VariantTable variants = VariantTable::builtin());
ComponentLexicon load_lexicon(const std::filesystem::path& path,
                              VariantTable variants = VariantTable::builtin());

inline Component normalize_variant(std::string_view component,
                                   const ComponentLexicon& lexicon) {
  return lexicon.normalize_variant(component);
}

inline ComponentList components_of(char32_t character, std::size_t m,
                                   const ComponentLexicon& lexicon) {
  return lexicon.components_of(character, m);
}

}  // namespace hanzi
