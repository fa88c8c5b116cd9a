#include "versemt/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "versemt/errors.hpp"

namespace versemt {

namespace {
const std::string kSpecialNames[] = {"<pad>", "<unk>", "<s>", "</s>"};
}

Vocabulary::Vocabulary() {
  for (const auto& name : kSpecialNames) id_to_token_.push_back(name);
}

Vocabulary Vocabulary::build(const std::vector<Tokens>& side, std::size_t max_size,
                             std::size_t min_count) {
  if (max_size <= kNumSpecials)
    throw DataError("vocabulary max_size must exceed " + std::to_string(kNumSpecials));

  std::map<std::string, std::size_t> counts;
  for (const Tokens& sentence : side)
    for (const std::string& token : sentence) ++counts[token];

  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(counts.size());
  for (auto& [token, count] : counts)
    if (count >= min_count) ranked.emplace_back(token, count);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > max_size - kNumSpecials) ranked.resize(max_size - kNumSpecials);

  Vocabulary v;
  for (auto& [token, count] : ranked) {
    v.token_to_id_.emplace(token, static_cast<std::uint32_t>(v.id_to_token_.size()));
    v.id_to_token_.push_back(token);
  }
  return v;
}

std::uint32_t Vocabulary::index_of(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_at(std::uint32_t index) const {
  if (index >= id_to_token_.size())
    throw DataError("token index " + std::to_string(index) + " out of range (size " +
                    std::to_string(id_to_token_.size()) + ")");
  return id_to_token_[index];
}

EncodedSentence Vocabulary::encode(const Tokens& tokens) const {
  EncodedSentence out;
  out.reserve(tokens.size() + 2);
  out.push_back(kBos);
  for (const std::string& token : tokens) out.push_back(index_of(token));
  out.push_back(kEos);
  return out;
}

Tokens Vocabulary::decode(const EncodedSentence& indices) const {
  Tokens out;
  for (std::uint32_t index : indices) {
    if (index >= id_to_token_.size())
      throw DataError("token index " + std::to_string(index) + " out of range (size " +
                      std::to_string(id_to_token_.size()) + ")");
    if (index == kPad || index == kBos || index == kEos) continue;
    out.push_back(id_to_token_[index]);
  }
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = kNumSpecials; i < id_to_token_.size(); ++i)
    out << id_to_token_[i] << '\n';
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (const std::string& token : tokens) {
    if (v.token_to_id_.contains(token))
      throw DataError("duplicate token in vocabulary: " + token);
    v.token_to_id_.emplace(token, static_cast<std::uint32_t>(v.id_to_token_.size()));
    v.id_to_token_.push_back(token);
  }
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) tokens.push_back(line);
  }
  return from_tokens(tokens);
}

}  // namespace versemt
