#include "factcheck/jsonl.hpp"

#include "factcheck/error.hpp"

namespace factcheck {

void read_jsonl(const std::filesystem::path &path,
                const std::function<void(const json &, std::size_t)> &fn)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error &e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        try {
            fn(record, line_no);
        } catch (const json::exception &e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

JsonlWriter::JsonlWriter(const std::filesystem::path &path) : path_(path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) {
        throw Error("cannot write " + path.string());
    }
}

void JsonlWriter::write(const json &record)
{
    out_ << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
}

void JsonlWriter::close()
{
    out_.close();
    if (out_.fail()) {
        throw Error("error writing " + path_.string());
    }
}

json read_json_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path &path, const json &value)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << value.dump(2) << '\n';
}

}  // namespace factcheck
