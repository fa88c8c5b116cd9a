#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "versemt/types.hpp"

namespace versemt {

// Verse-aligned corpus construction: XML ingestion, text normalization,
// alignment by verse key, duplicate removal, and line-aligned text I/O.

// Parses Bible-corpus XML. Verse segments are <seg> elements whose id
// attribute has the form "b.<BOOK>.<chapter>.<verse>"; all other markup is
// ignored. Text content is kept verbatim.
// Throws ParseError (with byte offset) on malformed XML and DataError on a
// duplicate verse id.
MonolingualDocument parse_bible_xml(std::string_view raw,
                                    const std::string& language = "");

// Strips markup tags, drops bytes outside printable ASCII (0x20-0x7E),
// lowercases, maps tab/newline-class bytes to spaces, collapses whitespace
// runs, and trims. Total and idempotent; may return "".
std::string normalize_text(std::string_view raw);

// Pairs verses present in both documents and in `books`, normalizes and
// whitespace-tokenizes each side, drops pairs where either side normalizes
// to nothing, and orders output by VerseRef.
// Throws DataError when no pair survives (mismatched inputs).
ParallelCorpus build_parallel(const MonolingualDocument& src,
                              const MonolingualDocument& tgt,
                              const std::set<std::string>& books);

// Removes pairs whose (source, target) token sequences both duplicate an
// earlier pair. First occurrence wins; order is preserved.
ParallelCorpus dedup_pairs(const ParallelCorpus& corpus);

struct AlignmentOutlier {
  VerseRef ref;
  std::size_t source_len = 0;
  std::size_t target_len = 0;
  double ratio = 0.0;
};

// Length-ratio outliers for manual alignment review, sorted by descending
// ratio. Requires ratio_limit > 1.
std::vector<AlignmentOutlier> alignment_report(const ParallelCorpus& corpus,
                                               double ratio_limit);

// Line-aligned parallel text: one sentence per line in each of two files,
// plus a tab-separated index mapping line number to VerseRef.
void write_parallel(const ParallelCorpus& corpus,
                    const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path,
                    const std::filesystem::path& index_path);

// Reads a file pair back. When index_path is empty, refs are synthesized
// from line numbers.
ParallelCorpus read_parallel(const std::filesystem::path& source_path,
                             const std::filesystem::path& target_path,
                             const std::filesystem::path& index_path = {},
                             const std::string& source_language = "",
                             const std::string& target_language = "");

Tokens tokenize(std::string_view normalized);

}  // namespace versemt
