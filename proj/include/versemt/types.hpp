#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace versemt {

using Tokens = std::vector<std::string>;

// (book, chapter, verse) key shared by both sides of the corpus. Ordering is
// lexicographic on the book code, then numeric on chapter and verse.
struct VerseRef {
  std::string book;
  int chapter = 0;
  int verse = 0;

  auto operator<=>(const VerseRef&) const = default;

  std::string str() const {
    return book + "." + std::to_string(chapter) + "." + std::to_string(verse);
  }
};

// One language's verses, keyed by VerseRef. Text is raw, pre-normalization.
struct MonolingualDocument {
  std::string language;
  std::map<VerseRef, std::string> entries;
};

struct SentencePair {
  VerseRef ref;
  Tokens source;
  Tokens target;
};

struct ParallelCorpus {
  std::string source_language;
  std::string target_language;
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

}  // namespace versemt
