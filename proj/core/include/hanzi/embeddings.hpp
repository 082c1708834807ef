#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hanzi/matrix.hpp"

namespace hanzi {

/// Named vectors, one row per name.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Throws Error on duplicate names or a row count mismatch.
  EmbeddingSet(std::vector<std::string> names, Matrix vectors);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Empty span when `name` is unknown.
  std::span<const double> find(std::string_view name) const;
  std::span<const double> row(std::size_t i) const { return vectors_.row(i); }

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.names_ == b.names_ && a.vectors_ == b.vectors_;
  }

 private:
  std::vector<std::string> names_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Text format: header `<count> <dim>`, then `<name> <v_1> ... <v_dim>` per
/// line, values printed with 9 significant digits.
void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet load_embedding_set(const std::filesystem::path& path);

void write_embedding_set(const EmbeddingSet& set, std::ostream& out);
/// Throws ParseError (with line) on a bad header, a short or long row, a
/// non-numeric value, or a row count that differs from the header.
EmbeddingSet read_embedding_set(std::istream& in, const std::string& source);

/// Path of the component-vector file that accompanies `path`.
std::filesystem::path component_file_for(const std::filesystem::path& path);

}  // namespace hanzi
