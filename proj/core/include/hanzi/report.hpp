#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hanzi/classify.hpp"
#include "hanzi/similarity.hpp"

namespace hanzi {

/// One machine-readable result: `<model>,<category>,<metric>,<value>`.
struct MetricRow {
  std::string model;
  std::string category;
  std::string metric;
  std::optional<double> value;  ///< printed as "undefined" when empty
};

std::vector<MetricRow> similarity_rows(std::string_view model, const SimilarityReport& report);
std::vector<MetricRow> classification_rows(std::string_view model,
                                           const ClassificationReport& report);

std::string format_rows(std::span<const MetricRow> rows);

/// Aligned table, one column per category, values in percent.
std::string format_similarity_table(std::string_view model, const SimilarityReport& report);
/// Aligned table with P/R/F columns per class, values in percent.
std::string format_classification_table(std::string_view model,
                                        const ClassificationReport& report);

}  // namespace hanzi
