#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skintone/face_detect.hpp"

namespace skintone {

struct ManifestRow {
    std::string id;
    std::filesystem::path photo;
    std::optional<std::filesystem::path> albedo;
    std::optional<std::filesystem::path> landmarks;
    std::optional<FaceBox> face;
    std::optional<std::filesystem::path> sh;
    int line = 0;  // 1-based data row, header excluded (JSON: array index + 1)
};

struct Manifest {
    std::vector<ManifestRow> rows;
};

// CSV header: id,photo[,albedo][,landmarks][,face_x,face_y,face_w,face_h][,sh].
// JSON: an array (or {"rows": [...]}) of objects with the same keys and
// "face": [x, y, w, h]. Relative paths resolve against the manifest's directory.
// Every problem found is reported at once in a single DataError / ParseError.
Manifest parse_manifest_csv(std::string_view text, const std::filesystem::path& base_dir, bool check_files = true);
Manifest parse_manifest_json(std::string_view text, const std::filesystem::path& base_dir, bool check_files = true);
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest_csv(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace skintone
