#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

namespace factcheck {

using json = nlohmann::json;

/// Calls `fn(record, line_number)` for every non-blank line. Parse errors are
/// reported as FormatError with the file name and line number.
void read_jsonl(const std::filesystem::path &path,
                const std::function<void(const json &, std::size_t)> &fn);

class JsonlWriter {
   public:
    explicit JsonlWriter(const std::filesystem::path &path);

    void write(const json &record);
    void close();

   private:
    std::filesystem::path path_;
    std::ofstream out_;
};

[[nodiscard]] json read_json_file(const std::filesystem::path &path);
void write_json_file(const std::filesystem::path &path, const json &value);

}  // namespace factcheck
