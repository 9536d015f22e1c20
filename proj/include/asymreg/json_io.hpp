#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "asymreg/corpus.hpp"

namespace asymreg {

using Json = nlohmann::json;

/// A file that cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Readable file with malformed content.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

/// {expr, rules, key, c0, cinf, m, len}; c0/cinf/m are null for zero and
/// undefined functions.
Json to_json(const CorpusRecord& record);
/// Re-derives rules, key and condition from "expr".
CorpusRecord record_from_json(const Json& row);

void write_corpus(const std::filesystem::path& path, const std::vector<CorpusRecord>& records);
std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path);

Json to_json(const LengthStats& stats);

/// Manifest written next to every output: command, configuration, version.
Json make_manifest(const std::string& command, const Json& config);

}  // namespace asymreg
