#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skintone/records.hpp"
#include "skintone/stats.hpp"

namespace skintone {

struct ReportOptions {
    Correction correction = Correction::Bonferroni;
    std::optional<nlohmann::json> ledger;  // parsed ledger.json, summarised in the index when present
};

// Box-plot SVG of the groups in the given order.
std::string boxplot_svg(const std::vector<NamedGroup>& groups, const std::string& title, const std::string& y_label,
                        const std::string& config_hash);

std::string confusion_svg(const ConfusionMatrix& matrix, const std::string& config_hash);

// Writes the report bundle into `dir` and returns the file names written, in
// order. Output depends only on the records and options, byte for byte.
// Throws DataError when there are no records.
std::vector<std::string> write_report(const RecordTable& table, const std::filesystem::path& dir,
                                      const ReportOptions& options = {});

}  // namespace skintone
