#pragma once

#include "smip/datasets.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace smip {

/// GET with redirects. Throws std::runtime_error on transport or HTTP error.
std::string http_get(const std::string& url);

std::string sha256_hex(std::string_view data);

/// Uncompressed bytes of one member of a zip archive (stored or deflated).
std::string zip_member(const std::string& archive, const std::string& member);

struct ConvertedTable {
    std::string csv;
    Schema schema;
};

/// Header-less comma-separated rows, label last. '@' lines are skipped.
ConvertedTable convert_keel(const std::string& text, const std::string& positive_label, bool categorical);

/// Tab-separated table with name, type and flag rows; the column flagged
/// "class" is the label. Discrete columns become categorical.
ConvertedTable convert_orange_tab(const std::string& text, const std::string& positive_label);

using Downloader = std::function<std::string(const std::string& url)>;

/// Downloads every archive named in the manifest, checks archive and member
/// checksums, and writes `<name>.csv` plus `<name>.schema.json` into
/// `out_dir`. Returns the CSV paths written.
std::vector<std::filesystem::path> fetch_uci(const std::filesystem::path& manifest,
                                             const std::filesystem::path& out_dir,
                                             const Downloader& get = http_get);

} // namespace smip
