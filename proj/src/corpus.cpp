#include "keo/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

std::vector<Record> load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus: " + path);
  std::vector<Record> records;
  std::string line;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("corpus line is not valid JSON: ") + e.what(), ln);
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text") ||
        !j["id"].is_string() || !j["text"].is_string()) {
      throw ParseError("corpus record needs string fields \"id\" and \"text\"", ln);
    }
    Record r;
    r.id = j["id"].get<std::string>();
    r.text = j["text"].get<std::string>();
    if (j.contains("date") && j["date"].is_string()) r.date = j["date"].get<std::string>();
    if (r.id.empty()) throw ParseError("empty record id", ln);
    records.push_back(std::move(r));
  }
  return records;
}

void save_corpus_jsonl(const std::vector<Record>& records, const std::string& path) {
  std::ostringstream out;
  for (const auto& r : records) {
    json j{{"id", r.id}, {"text", r.text}};
    if (r.date) j["date"] = *r.date;
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

void save_chunks_jsonl(const std::vector<Chunk>& chunks, const std::string& path) {
  std::ostringstream out;
  for (const auto& c : chunks) {
    out << json{{"id", c.id}, {"text", c.text}, {"source_record_ids", c.source_record_ids}}
               .dump()
        << "\n";
  }
  write_file(path, out.str());
}

std::vector<Chunk> load_chunks_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open chunk file: " + path);
  std::vector<Chunk> chunks;
  std::string line;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("chunk line is not valid JSON: ") + e.what(), ln);
    }
    Chunk c;
    c.id = j.at("id").get<std::int64_t>();
    c.text = j.at("text").get<std::string>();
    c.source_record_ids = j.at("source_record_ids").get<std::vector<std::string>>();
    chunks.push_back(std::move(c));
  }
  return chunks;
}

std::vector<Chunk> chunk_corpus(const std::vector<Record>& records, std::size_t chunk_size,
                                std::size_t overlap) {
  if (chunk_size == 0 || overlap >= chunk_size) {
    throw ValidationError("chunking requires 0 <= overlap < chunk_size");
  }
  std::vector<Chunk> chunks;
  const std::size_t step = chunk_size - overlap;
  std::int64_t next_id = 0;
  for (const auto& r : records) {
    if (r.text.empty()) continue;
    std::size_t start = 0;
    while (true) {
      const std::size_t len = std::min(chunk_size, r.text.size() - start);
      chunks.push_back(Chunk{next_id++, r.text.substr(start, len), {r.id}});
      if (start + len >= r.text.size()) break;
      start += step;
    }
  }
  return chunks;
}

}  // namespace keo
