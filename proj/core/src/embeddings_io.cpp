#include "hanzi/embeddings.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hanzi/error.hpp"

namespace hanzi {

EmbeddingSet::EmbeddingSet(std::vector<std::string> names, Matrix vectors)
    : names_(std::move(names)), vectors_(std::move(vectors)) {
  if (names_.size() != vectors_.rows()) {
    throw Error("embedding names and rows differ in count");
  }
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) {
      throw Error("duplicate embedding name " + names_[i]);
    }
  }
}

std::optional<std::size_t> EmbeddingSet::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingSet::find(std::string_view name) const {
  const auto i = index_of(name);
  return i ? vectors_.row(*i) : std::span<const double>{};
}

void write_embedding_set(const EmbeddingSet& set, std::ostream& out) {
  out << set.size() << ' ' << set.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set.names()[i];
    for (double v : set.row(i)) {
      std::snprintf(buf, sizeof buf, " %.9g", v);
      out << buf;
    }
    out << '\n';
  }
}

void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_embedding_set(set, out);
  if (!out) throw Error("write failed: " + path.string());
}

EmbeddingSet read_embedding_set(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  std::size_t count = 0;
  std::size_t dim = 0;
  {
    std::istringstream is(line);
    std::string extra;
    if (!(is >> count >> dim) || (is >> extra) || dim == 0) {
      throw ParseError(source, 1, "header must be '<count> <dim>'");
    }
  }
  std::vector<std::string> names;
  names.reserve(count);
  Matrix vectors(count, dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (names.size() == count) {
      throw ParseError(source, line_no, "more rows than the header's " + std::to_string(count));
    }
    std::istringstream is(line);
    std::string name;
    is >> name;
    auto row = vectors.row(names.size());
    std::size_t filled = 0;
    for (std::string field; is >> field;) {
      if (filled == dim) {
        throw ParseError(source, line_no, "row has more than " + std::to_string(dim) + " values");
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(source, line_no, "not a number: '" + field + "'");
      }
      row[filled++] = v;
    }
    if (filled != dim) {
      throw ParseError(source, line_no,
                       "row has " + std::to_string(filled) + " values, header says " +
                           std::to_string(dim));
    }
    names.push_back(std::move(name));
  }
  if (names.size() != count) {
    throw ParseError(source, line_no,
                     "header declares " + std::to_string(count) + " rows, found " +
                         std::to_string(names.size()));
  }
  try {
    return EmbeddingSet(std::move(names), std::move(vectors));
  } catch (const Error& e) {
    throw ParseError(source, line_no, e.what());
  }
}

EmbeddingSet load_embedding_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_embedding_set(in, path.string());
}

std::filesystem::path component_file_for(const std::filesystem::path& path) {
  auto p = path;
  p += ".components";
  return p;
}

}  // namespace hanzi
