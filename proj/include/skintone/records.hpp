#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skintone/analysis.hpp"

namespace skintone {

// Records CSV: one row per evaluated cell, reals in round-trip precision.
// The first column carries the config hash of the run that produced the row.
std::string records_to_csv(const std::vector<EvalRecord>& records, std::string_view config_hash);

struct RecordTable {
    std::string config_hash;  // empty when the file has no rows
    std::vector<EvalRecord> records;
};

// Throws ParseError with the offending line on malformed input.
RecordTable records_from_csv(std::string_view text);
RecordTable read_records(const std::filesystem::path& path);

}  // namespace skintone
