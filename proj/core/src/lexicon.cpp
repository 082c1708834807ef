#include "hanzi/lexicon.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "hanzi/error.hpp"
#include "hanzi/utf8.hpp"

namespace hanzi {
namespace {

const std::array<VariantMapping, 24> kAppendixMappings{{
    {"艹", "艸"}, {"扌", "手"},
    {"亻", "人"}, {"氵", "水"},
    {"刂", "刀"}, {"車", "车"},
    {"犾", "犬"}, {"攴", "支"},
    {"灬", "火"}, {"纟", "糸"},
    {"钅", "金"}, {"耂", "老"},
    {"麥", "麦"}, {"牛", "牛"},
    {"亼", "食"}, {"食", "食"},
    {"衤", "示"}, {"忄", "心"},
    {"囧", "网"}, {"王", "玉"},
    {"讠", "言"}, {"衤", "衣"},
    {"月", "肉"}, {"辵", "走"},
}};

// Longest chain we follow before declaring a cycle; real tables are depth 1.
constexpr std::size_t kMaxChain = 64;

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> fields;
  for (std::string f; is >> f;) fields.push_back(std::move(f));
  return fields;
}

bool is_skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

std::span<const VariantMapping> builtin_variant_mappings() {
  return kAppendixMappings;
}

VariantTable VariantTable::builtin() {
  return from_mappings(builtin_variant_mappings());
}

VariantTable VariantTable::from_mappings(std::span<const VariantMapping> mappings) {
  VariantTable table;
  for (const auto& m : mappings) table.table_.emplace(m.variant, m.original);
  return table;
}

void VariantTable::override_with(std::span<const VariantMapping> mappings) {
  const auto incoming = from_mappings(mappings);
  for (const auto& [variant, original] : incoming.table_) {
    table_.insert_or_assign(variant, original);
  }
}

Component VariantTable::normalize(std::string_view component) const {
  Component current(component);
  for (std::size_t step = 0; step < kMaxChain; ++step) {
    const auto it = table_.find(current);
    if (it == table_.end() || it->second == current) return current;
    current = it->second;
  }
  throw Error("variant table has a cycle through " + std::string(component));
}

bool VariantTable::contains(std::string_view component) const {
  return table_.find(component) != table_.end();
}

std::vector<VariantMapping> parse_variant_mappings(std::istream& in,
                                                   const std::string& source) {
  std::vector<VariantMapping> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (is_skippable(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw ParseError(source, line_no, "expected '<variant> <original>'");
    }
    out.push_back({std::move(fields[0]), std::move(fields[1])});
  }
  return out;
}

std::vector<VariantMapping> load_variant_mappings(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_variant_mappings(in, path.string());
}

ComponentLexicon::ComponentLexicon(std::map<char32_t, ComponentList> entries,
                                   VariantTable variants)
    : entries_(std::move(entries)), variants_(std::move(variants)) {
  for (auto& [ch, list] : entries_) {
    if (list.empty()) {
      throw Error("empty component list for " + utf8::encode(ch));
    }
    for (auto& component : list) component = variants_.normalize(component);
  }
}

const ComponentList* ComponentLexicon::find(char32_t character) const {
  const auto it = entries_.find(character);
  return it == entries_.end() ? nullptr : &it->second;
}

ComponentList ComponentLexicon::components_of(char32_t character,
                                              std::size_t m) const {
  ComponentList out;
  out.reserve(m);
  if (const auto* list = find(character)) {
    for (std::size_t i = 0; i < m && i < list->size(); ++i) {
      out.push_back((*list)[i]);
    }
  } else if (m > 0) {
    out.emplace_back(kUnkComponent);
  }
  while (out.size() < m) out.emplace_back(kPadComponent);
  return out;
}

std::vector<Component> ComponentLexicon::component_inventory() const {
  std::set<Component> all;
  for (const auto& [ch, list] : entries_) all.insert(list.begin(), list.end());
  for (const auto& [variant, original] : variants_.mappings()) {
    all.insert(variant);
    all.insert(original);
  }
  return {all.begin(), all.end()};
}

std::map<std::size_t, std::size_t> ComponentLexicon::component_count_histogram() const {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& [ch, list] : entries_) ++hist[list.size()];
  return hist;
}

ComponentLexicon parse_lexicon(std::istream& in, const std::string& source,
                               VariantTable variants) {
  std::map<char32_t, ComponentList> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    auto fields = split_fields(line);
    const auto ch = utf8::single_code_point(fields[0]);
    if (!ch) {
      throw ParseError(source, line_no,
                       "first field must be a single character: '" + fields[0] + "'");
    }
    if (fields.size() < 2) {
      throw ParseError(source, line_no, "empty component list for " + fields[0]);
    }
    ComponentList list(std::make_move_iterator(fields.begin() + 1),
                       std::make_move_iterator(fields.end()));
    if (!entries.emplace(*ch, std::move(list)).second) {
      throw ParseError(source, line_no, "duplicate character " + fields[0]);
    }
  }
  if (entries.empty()) {
    throw ParseError(source, line_no, "lexicon has no entries");
  }
  return ComponentLexicon(std::move(entries), std::move(variants));
}

ComponentLexicon load_lexicon(const std::filesystem::path& path,
                              VariantTable variants) {
  auto in = open_or_throw(path);
  return parse_lexicon(in, path.string(), std::move(variants));
}

}  // namespace hanzi
