#include "hanzi/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace hanzi {
namespace {

std::string percent(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
  return buf;
}

std::string raw(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  return buf;
}

std::string pad(std::string_view s, std::size_t width) {
  // Column widths count code points, not bytes, so CJK labels line up.
  std::size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  std::string out(s);
  if (cps < width) out.append(width - cps, ' ');
  return out;
}

std::string table(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::size_t cps = 0;
      for (unsigned char ch : row[c]) cps += (ch & 0xC0) != 0x80;
      widths[c] = std::max(widths[c], cps);
    }
  }
  std::ostringstream os;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      line += pad(row[c], widths[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
  return os.str();
}

}  // namespace

std::vector<MetricRow> similarity_rows(std::string_view model, const SimilarityReport& report) {
  std::vector<MetricRow> rows;
  const std::string m(model);
  auto emit = [&](const CategoryCorrelation& c) {
    rows.push_back({m, c.category, "spearman", c.rho});
    rows.push_back({m, c.category, "pairs_used", static_cast<double>(c.used)});
    rows.push_back({m, c.category, "pairs_total", static_cast<double>(c.total)});
  };
  for (const auto& c : report.categories) emit(c);
  emit(report.overall);
  return rows;
}

std::vector<MetricRow> classification_rows(std::string_view model,
                                           const ClassificationReport& report) {
  std::vector<MetricRow> rows;
  const std::string m(model);
  for (const auto& c : report.metrics) {
    rows.push_back({m, c.label, "precision", c.precision});
    rows.push_back({m, c.label, "recall", c.recall});
    rows.push_back({m, c.label, "f1", c.f1});
    rows.push_back({m, c.label, "support", static_cast<double>(c.support)});
  }
  rows.push_back({m, "overall", "accuracy", report.accuracy});
  rows.push_back({m, "overall", "titles_without_vectors",
                  static_cast<double>(report.titles_without_vectors)});
  return rows;
}

std::string format_rows(std::span<const MetricRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.model + "," + r.category + "," + r.metric + "," + raw(r.value) + "\n";
  }
  return out;
}

std::string format_similarity_table(std::string_view model, const SimilarityReport& report) {
  std::vector<std::string> header{"Model"};
  std::vector<std::string> values{std::string(model)};
  for (const auto& c : report.categories) {
    header.push_back(c.category);
    values.push_back(percent(c.rho));
  }
  header.emplace_back("All");
  values.push_back(percent(report.overall.rho));
  return table({header, values});
}

std::string format_classification_table(std::string_view model,
                                        const ClassificationReport& report) {
  std::vector<std::string> top{""};
  std::vector<std::string> header{"Model"};
  std::vector<std::string> values{std::string(model)};
  for (const auto& c : report.metrics) {
    top.insert(top.end(), {c.label, "", ""});
    header.insert(header.end(), {"P", "R", "F"});
    values.insert(values.end(), {percent(c.precision), percent(c.recall), percent(c.f1)});
  }
  return table({top, header, values});
}

}  // namespace hanzi
