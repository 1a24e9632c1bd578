#include "pakpa/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "pakpa/error.hpp"

namespace pakpa {

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::vector<nlohmann::json> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded()) {
      throw Error(ErrorCode::ParseError,
                  path.filename().string() + " line " + std::to_string(line_number));
    }
    rows.push_back(std::move(parsed));
  }
  return rows;
}

namespace {

void commit_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_jsonl_atomic(const std::filesystem::path& path,
                        const std::vector<nlohmann::json>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    out << row.dump() << '\n';
  }
  commit_atomic(path, out.str());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  commit_atomic(path, content);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace pakpa
