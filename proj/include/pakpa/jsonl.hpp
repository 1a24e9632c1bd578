#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace pakpa {

/// Reads line-delimited JSON. Blank lines are skipped; a malformed line
/// raises ParseError carrying its 1-based line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// Writes rows as compact JSONL via a temp file + rename so readers never
/// observe a partial file.
void write_jsonl_atomic(const std::filesystem::path& path,
                        const std::vector<nlohmann::json>& rows);

void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

}  // namespace pakpa
