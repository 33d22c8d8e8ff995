#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace keo {

struct Record {
  std::string id;
  std::string text;
  std::optional<std::string> date;  // free-form; insights bucket by YYYY-MM prefix
};

// JSON-lines corpus, one object per record with "id" and "text" (optional
// "date"). Malformed lines raise ParseError with the line number.
std::vector<Record> load_corpus_jsonl(const std::string& path);
void save_corpus_jsonl(const std::vector<Record>& records, const std::string& path);

struct Chunk {
  std::int64_t id = 0;
  std::string text;
  std::vector<std::string> source_record_ids;
};

// Sliding-window chunking per record: windows of at most chunk_size
// characters advancing by chunk_size - overlap, never spanning records.
std::vector<Chunk> chunk_corpus(const std::vector<Record>& records, std::size_t chunk_size,
                                std::size_t overlap);

void save_chunks_jsonl(const std::vector<Chunk>& chunks, const std::string& path);
std::vector<Chunk> load_chunks_jsonl(const std::string& path);

}  // namespace keo
