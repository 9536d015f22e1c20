#include "asymreg/json_io.hpp"

#include <fstream>

namespace asymreg {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
  auto out = open_out(path);
  for (const auto& row : rows) out << row.dump() << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& value) {
  auto out = open_out(path);
  out << value.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

Json to_json(const CorpusRecord& r) {
  Json row = {{"expr", r.expr}, {"rules", rules_to_ints(r.rules)}, {"key", r.key.str()}};
  if (r.condition) {
    row["c0"] = r.condition->c0;
    row["cinf"] = r.condition->cinf;
    row["m"] = r.condition->complexity();
  } else {
    row["c0"] = nullptr;
    row["cinf"] = nullptr;
    row["m"] = nullptr;
  }
  row["len"] = r.length();
  return row;
}

CorpusRecord record_from_json(const Json& row) {
  if (!row.is_object() || !row.contains("expr") || !row["expr"].is_string()) {
    throw DataError("record without string field \"expr\": " + row.dump());
  }
  try {
    return make_record(parse_text(row["expr"].get<std::string>()));
  } catch (const GrammarError& e) {
    throw DataError("bad expression " + row["expr"].dump() + ": " + e.what());
  }
}

void write_corpus(const std::filesystem::path& path, const std::vector<CorpusRecord>& records) {
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path) {
  std::vector<CorpusRecord> out;
  std::size_t i = 0;
  for (const auto& row : read_jsonl(path)) {
    ++i;
    try {
      out.push_back(record_from_json(row));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": record " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

Json to_json(const LengthStats& s) {
  return {{"count", s.count}, {"min", s.min}, {"median", s.median}, {"max", s.max}};
}

Json make_manifest(const std::string& command, const Json& config) {
  return {{"tool", "asymreg"}, {"version", ASYMREG_VERSION}, {"command", command}, {"config", config}};
}

}  // namespace asymreg
