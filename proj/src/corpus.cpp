#include "versemt/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "versemt/errors.hpp"

namespace versemt {

namespace {

// Minimal XML scanner, enough for the Bible corpus files: elements,
// attributes, character data, entity references, comments, CDATA, and
// prolog/DOCTYPE skipping. Position is tracked for error reporting.
class XmlScanner {
public:
  explicit XmlScanner(std::string_view text) : text_(text) {}

  struct Seg {
    std::string id;
    std::string text;
  };

  // Returns the text of every <seg> element, keyed by its id attribute.
  std::vector<Seg> scan_segments() {
    std::vector<Seg> segs;
    std::vector<std::string> open;  // element name stack
    bool in_seg = false;
    std::string seg_id;
    std::string seg_text;
    std::size_t seg_depth = 0;

    while (pos_ < text_.size()) {
      if (peek() == '<') {
        std::size_t tag_start = pos_;
        if (starts_with("<!--")) {
          skip_until("-->", "unterminated comment");
        } else if (starts_with("<![CDATA[")) {
          std::size_t body = pos_ + 9;
          std::size_t end = text_.find("]]>", body);
          if (end == std::string_view::npos)
            throw ParseError("unterminated CDATA section", tag_start);
          if (in_seg) seg_text.append(text_.substr(body, end - body));
          pos_ = end + 3;
        } else if (starts_with("<?") || starts_with("<!")) {
          skip_until(">", "unterminated declaration");
        } else if (starts_with("</")) {
          pos_ += 2;
          std::string name = read_name(tag_start);
          skip_space();
          expect('>', tag_start);
          if (open.empty() || open.back() != name)
            throw ParseError("mismatched closing tag </" + name + ">", tag_start);
          open.pop_back();
          if (in_seg && open.size() < seg_depth) {
            segs.push_back({seg_id, seg_text});
            in_seg = false;
          }
        } else {
          ++pos_;
          std::string name = read_name(tag_start);
          auto [attrs, self_closing] = read_attributes(tag_start);
          if (name == "seg") {
            if (in_seg) throw ParseError("nested <seg> element", tag_start);
            auto it = attrs.find("id");
            if (it == attrs.end())
              throw ParseError("<seg> without id attribute", tag_start);
            if (self_closing) {
              segs.push_back({it->second, ""});
            } else {
              in_seg = true;
              seg_id = it->second;
              seg_text.clear();
              seg_depth = open.size() + 1;
            }
          }
          if (!self_closing) open.push_back(name);
        }
      } else {
        std::size_t next = text_.find('<', pos_);
        if (next == std::string_view::npos) next = text_.size();
        if (in_seg) append_decoded(seg_text, text_.substr(pos_, next - pos_), pos_);
        pos_ = next;
      }
    }
    if (!open.empty())
      throw ParseError("unclosed element <" + open.back() + ">", text_.size());
    return segs;
  }

private:
  char peek() const { return text_[pos_]; }

  bool starts_with(std::string_view s) const {
    return text_.substr(pos_, s.size()) == s;
  }

  void skip_until(std::string_view terminator, const char* err) {
    std::size_t start = pos_;
    std::size_t end = text_.find(terminator, pos_);
    if (end == std::string_view::npos) throw ParseError(err, start);
    pos_ = end + terminator.size();
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  void expect(char c, std::size_t context) {
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(std::string("expected '") + c + "'", context);
    ++pos_;
  }

  std::string read_name(std::size_t context) {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/' || c == '=')
        break;
      ++pos_;
    }
    if (pos_ == start) throw ParseError("empty element name", context);
    return std::string(text_.substr(start, pos_ - start));
  }

  std::pair<std::map<std::string, std::string>, bool> read_attributes(std::size_t context) {
    std::map<std::string, std::string> attrs;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unterminated tag", context);
      if (starts_with("/>")) {
        pos_ += 2;
        return {attrs, true};
      }
      if (peek() == '>') {
        ++pos_;
        return {attrs, false};
      }
      std::string name = read_name(pos_);
      skip_space();
      expect('=', pos_);
      skip_space();
      if (pos_ >= text_.size() || (peek() != '"' && peek() != '\''))
        throw ParseError("attribute value must be quoted", pos_);
      char quote = text_[pos_++];
      std::size_t start = pos_;
      std::size_t end = text_.find(quote, pos_);
      if (end == std::string_view::npos)
        throw ParseError("unterminated attribute value", start);
      std::string value;
      append_decoded(value, text_.substr(start, end - start), start);
      pos_ = end + 1;
      attrs[name] = value;
    }
  }

  // Decodes entity references while appending raw character data.
  void append_decoded(std::string& out, std::string_view chunk, std::size_t base) {
    for (std::size_t i = 0; i < chunk.size();) {
      if (chunk[i] != '&') {
        out += chunk[i++];
        continue;
      }
      std::size_t semi = chunk.find(';', i);
      if (semi == std::string_view::npos || semi - i > 10)
        throw ParseError("unterminated entity reference", base + i);
      std::string_view ent = chunk.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (!ent.empty() && ent[0] == '#') {
        append_codepoint(out, ent.substr(1), base + i);
      } else {
        throw ParseError("unknown entity &" + std::string(ent) + ";", base + i);
      }
      i = semi + 1;
    }
  }

  void append_codepoint(std::string& out, std::string_view digits, std::size_t at) {
    unsigned long cp = 0;
    bool ok = !digits.empty();
    if (ok && (digits[0] == 'x' || digits[0] == 'X')) {
      auto [p, ec] = std::from_chars(digits.data() + 1, digits.data() + digits.size(), cp, 16);
      ok = ec == std::errc() && p == digits.data() + digits.size();
    } else if (ok) {
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, 10);
      ok = ec == std::errc() && p == digits.data() + digits.size();
    }
    if (!ok || cp > 0x10FFFF) throw ParseError("bad character reference", at);
    // UTF-8 encode; non-ASCII is dropped later by normalize_text anyway.
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// "b.GEN.1.1" -> VerseRef{GEN, 1, 1}. Returns false for ids of other shapes
// (chapter headings and the like), which are skipped.
bool parse_verse_id(const std::string& id, VerseRef& out) {
  if (id.size() < 2 || id.compare(0, 2, "b.") != 0) return false;
  std::size_t p1 = id.find('.', 2);
  if (p1 == std::string::npos) return false;
  std::size_t p2 = id.find('.', p1 + 1);
  if (p2 == std::string::npos) return false;
  std::string book = id.substr(2, p1 - 2);
  if (book.empty()) return false;
  auto parse_int = [](std::string_view s, int& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size() && v >= 1;
  };
  int chapter = 0, verse = 0;
  if (!parse_int(std::string_view(id).substr(p1 + 1, p2 - p1 - 1), chapter)) return false;
  if (!parse_int(std::string_view(id).substr(p2 + 1), verse)) return false;
  out = VerseRef{book, chapter, verse};
  return true;
}

bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

MonolingualDocument parse_bible_xml(std::string_view raw, const std::string& language) {
  XmlScanner scanner(raw);
  MonolingualDocument doc;
  doc.language = language;
  for (auto& seg : scanner.scan_segments()) {
    VerseRef ref;
    if (!parse_verse_id(seg.id, ref)) continue;
    auto [it, inserted] = doc.entries.emplace(ref, seg.text);
    if (!inserted) throw DataError("duplicate verse id " + ref.str());
  }
  return doc;
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < raw.size()) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c == '<') {
      // Markup tag: drop through the matching '>'. A tag that never closes
      // swallows the rest of the input.
      std::size_t close = raw.find('>', i + 1);
      if (close == std::string_view::npos) break;
      i = close + 1;
      continue;
    }
    if (is_space_byte(c)) {
      pending_space = true;
      ++i;
      continue;
    }
    if (c < 0x20 || c > 0x7E) {
      ++i;  // non-printable or non-ASCII byte: removed outright
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
    ++i;
  }
  return out;
}

Tokens tokenize(std::string_view normalized) {
  Tokens tokens;
  std::size_t i = 0;
  while (i < normalized.size()) {
    while (i < normalized.size() && normalized[i] == ' ') ++i;
    std::size_t start = i;
    while (i < normalized.size() && normalized[i] != ' ') ++i;
    if (i > start) tokens.emplace_back(normalized.substr(start, i - start));
  }
  return tokens;
}

ParallelCorpus build_parallel(const MonolingualDocument& src,
                              const MonolingualDocument& tgt,
                              const std::set<std::string>& books) {
  ParallelCorpus corpus;
  corpus.source_language = src.language;
  corpus.target_language = tgt.language;
  for (const auto& [ref, src_text] : src.entries) {
    if (!books.empty() && !books.contains(ref.book)) continue;
    auto it = tgt.entries.find(ref);
    if (it == tgt.entries.end()) continue;
    Tokens s = tokenize(normalize_text(src_text));
    Tokens t = tokenize(normalize_text(it->second));
    if (s.empty() || t.empty()) continue;
    corpus.pairs.push_back({ref, std::move(s), std::move(t)});
  }
  if (corpus.pairs.empty())
    throw DataError("no aligned verses between " + src.language + " and " +
                    tgt.language + " for the requested books");
  return corpus;
}

ParallelCorpus dedup_pairs(const ParallelCorpus& corpus) {
  ParallelCorpus out;
  out.source_language = corpus.source_language;
  out.target_language = corpus.target_language;
  std::set<std::pair<Tokens, Tokens>> seen;
  for (const auto& pair : corpus.pairs) {
    if (seen.emplace(pair.source, pair.target).second) out.pairs.push_back(pair);
  }
  return out;
}

std::vector<AlignmentOutlier> alignment_report(const ParallelCorpus& corpus,
                                               double ratio_limit) {
  if (ratio_limit <= 1.0) throw DataError("ratio_limit must exceed 1");
  std::vector<AlignmentOutlier> report;
  for (const auto& pair : corpus.pairs) {
    double longer = static_cast<double>(std::max(pair.source.size(), pair.target.size()));
    double shorter = static_cast<double>(std::min(pair.source.size(), pair.target.size()));
    double ratio = longer / shorter;
    if (ratio > ratio_limit)
      report.push_back({pair.ref, pair.source.size(), pair.target.size(), ratio});
  }
  std::stable_sort(report.begin(), report.end(),
                   [](const AlignmentOutlier& a, const AlignmentOutlier& b) {
                     return a.ratio > b.ratio;
                   });
  return report;
}

namespace {

std::string join_tokens(const Tokens& tokens) {
  std::string line;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) line += ' ';
    line += tokens[i];
  }
  return line;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

void write_parallel(const ParallelCorpus& corpus,
                    const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path,
                    const std::filesystem::path& index_path) {
  std::ofstream src = open_out(source_path);
  std::ofstream tgt = open_out(target_path);
  std::ofstream idx;
  if (!index_path.empty()) idx = open_out(index_path);
  std::size_t line = 1;
  for (const auto& pair : corpus.pairs) {
    src << join_tokens(pair.source) << '\n';
    tgt << join_tokens(pair.target) << '\n';
    if (idx.is_open())
      idx << line << '\t' << pair.ref.book << '\t' << pair.ref.chapter << '\t'
          << pair.ref.verse << '\n';
    ++line;
  }
}

ParallelCorpus read_parallel(const std::filesystem::path& source_path,
                             const std::filesystem::path& target_path,
                             const std::filesystem::path& index_path,
                             const std::string& source_language,
                             const std::string& target_language) {
  std::ifstream src = open_in(source_path);
  std::ifstream tgt = open_in(target_path);

  std::vector<VerseRef> refs;
  if (!index_path.empty()) {
    std::ifstream idx = open_in(index_path);
    std::string line;
    while (std::getline(idx, line)) {
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::size_t lineno;
      VerseRef ref;
      if (!(fields >> lineno >> std::ws) || !std::getline(fields, ref.book, '\t'))
        throw DataError("bad index line: " + line);
      if (!(fields >> ref.chapter >> ref.verse))
        throw DataError("bad index line: " + line);
      refs.push_back(ref);
    }
  }

  ParallelCorpus corpus;
  corpus.source_language = source_language;
  corpus.target_language = target_language;
  std::string sline, tline;
  std::size_t n = 0;
  while (true) {
    bool got_s = static_cast<bool>(std::getline(src, sline));
    bool got_t = static_cast<bool>(std::getline(tgt, tline));
    if (got_s != got_t)
      throw DataError(source_path.string() + " and " + target_path.string() +
                      " have different line counts");
    if (!got_s) break;
    SentencePair pair;
    if (n < refs.size()) pair.ref = refs[n];
    else pair.ref = VerseRef{"LINE", 1, static_cast<int>(n + 1)};
    pair.source = tokenize(sline);
    pair.target = tokenize(tline);
    corpus.pairs.push_back(std::move(pair));
    ++n;
  }
  if (!refs.empty() && refs.size() != corpus.pairs.size())
    throw DataError("index length does not match sentence count");
  return corpus;
}

}  // namespace versemt
