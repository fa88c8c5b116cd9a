#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "versemt/types.hpp"

namespace versemt {

// Token indices with BOS prefix and EOS suffix.
using EncodedSentence = std::vector<std::uint32_t>;

// Token <-> index maps with four reserved specials at fixed slots.
// Construction is deterministic: frequency-descending, ties lexicographic.
class Vocabulary {
public:
  static constexpr std::uint32_t kPad = 0;
  static constexpr std::uint32_t kUnk = 1;
  static constexpr std::uint32_t kBos = 2;
  static constexpr std::uint32_t kEos = 3;
  static constexpr std::size_t kNumSpecials = 4;

  Vocabulary();

  // Keeps tokens with count >= min_count, ranked by descending count then
  // ascending token, truncated to max_size - 4. Requires max_size > 4.
  static Vocabulary build(const std::vector<Tokens>& side, std::size_t max_size,
                          std::size_t min_count);

  // Rebuilds from the non-special token list, in index order. Throws
  // DataError on duplicates.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::size_t size() const { return id_to_token_.size(); }

  // UNK for unknown tokens.
  std::uint32_t index_of(const std::string& token) const;

  // Throws DataError for an out-of-range index.
  const std::string& token_at(std::uint32_t index) const;

  // BOS + per-token indices + EOS.
  EncodedSentence encode(const Tokens& tokens) const;

  // Inverse of encode: strips PAD/BOS/EOS, renders UNK as "<unk>".
  // Throws DataError for an out-of-range index.
  Tokens decode(const EncodedSentence& indices) const;

  // One non-special token per line; line number = index - 4.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const {
    return id_to_token_ == other.id_to_token_;
  }

private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, std::uint32_t> token_to_id_;
};

}  // namespace versemt
