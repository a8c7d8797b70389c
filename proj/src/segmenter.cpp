// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "erm/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "erm/annotation.hpp"
#include "erm/errors.hpp"

namespace erm {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Byte length of the punctuation character starting at text[i], or 0 if the
// byte is not punctuation. Recognizes ASCII punctuation plus the common
// UTF-8 typographic marks (dashes, curly quotes, ellipsis, guillemets).
std::size_t punct_len(std::string_view text, std::size_t i) {
  unsigned char c = static_cast<unsigned char>(text[i]);
  if (c < 0x80) {
    return std::ispunct(c) ? 1 : 0;
  }
  static constexpr std::array<std::string_view, 9> kWide = {
      "\xE2\x80\x94", "\xE2\x80\x93", "\xE2\x80\x9C", "\xE2\x80\x9D",
      "\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\xA6", "\xC2\xAB",
      "\xC2\xBB"};
  for (std::string_view p : kWide) {
    if (text.substr(i, p.size()) == p) return p.size();
  }
  return 0;
}

// Closing punctuation that attaches to the sentence it terminates.
std::size_t closer_len(std::string_view text, std::size_t i) {
  char c = text[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  static constexpr std::array<std::string_view, 3> kWide = {
      "\xE2\x80\x9D", "\xE2\x80\x99", "\xC2\xBB"};
  for (std::string_view p : kWide) {
    if (text.substr(i, p.size()) == p) return p.size();
  }
  return 0;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Bundled abbreviation list; a period ending one of these never closes a
// sentence. Matched case-sensitively against the text ending at the period.
constexpr std::array<std::string_view, 12> kAbbreviations = {
    "Dr.", "Mr.",  "Mrs.", "Ms.", "Prof.",  "e.g.",
    "i.e.", "etc.", "vs.",  "Fig.", "Eq.", "et al.",
};

bool ends_with_abbreviation(std::string_view text, std::size_t period_pos) {
  std::string_view head = text.substr(0, period_pos + 1);
  for (std::string_view abbr : kAbbreviations) {
    if (head.size() < abbr.size()) continue;
    if (head.substr(head.size() - abbr.size()) != abbr) continue;
    if (head.size() == abbr.size()) return true;
    char before = head[head.size() - abbr.size() - 1];
    if (is_space(before) ||
        punct_len(std::string_view(&before, 1), 0) > 0) {
      return true;
    }
  }
  return false;
}

std::size_t trim_end(std::string_view text, std::size_t begin,
                     std::size_t end) {
  while (end > begin && is_space(text[end - 1])) --end;
  return end;
}

}  // namespace

std::vector<TokenSpan> tokenize_words(std::string_view text) {
  std::vector<TokenSpan> words;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    const std::size_t run_begin = i;
    while (i < n && !is_space(text[i])) ++i;
    const std::size_t run_end = i;

    // Decompose the raw run into units (a punctuation mark or a single word
    // byte), then strip punctuation units from both ends. Interior
    // punctuation (hyphens, apostrophes) stays part of the word.
    struct Unit {
      std::size_t begin;
      std::size_t end;
      bool punct;
    };
    std::vector<Unit> units;
    std::size_t pos = run_begin;
    while (pos < run_end) {
      std::size_t len = punct_len(text, pos);
      if (len > 0) {
        units.push_back({pos, pos + len, true});
        pos += len;
      } else {
        units.push_back({pos, pos + 1, false});
        ++pos;
      }
    }
    std::size_t lo = 0;
    std::size_t hi = units.size();
    while (lo < hi && units[lo].punct) ++lo;
    while (hi > lo && units[hi - 1].punct) --hi;
    if (lo < hi) words.push_back({units[lo].begin, units[hi - 1].end});
  }
  return words;
}

std::size_t SentenceSequence::total_words() const {
  std::size_t total = 0;
  for (const Sentence& s : sentences) total += s.word_count;
  return total;
}

std::size_t SentenceSequence::first_word_position(
    std::size_t sentence_index) const {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < sentence_index && i < sentences.size(); ++i) {
    pos += sentences[i].word_count;
  }
  return pos;
}

std::size_t WindowPartition::window_of(std::size_t pos) const {
  for (const Window& w : windows) {
    if (pos >= w.begin_word && pos < w.end_word) return w.index;
  }
  return windows.empty() ? 0 : windows.back().index;
}

SentenceSequence split_sentences(std::string_view text) {
  const std::vector<TokenSpan> words = tokenize_words(text);
  if (words.empty()) {
    throw Error(ErrorCode::EmptyDocument, "no word tokens after normalization");
  }

  auto words_in = [&](std::size_t begin, std::size_t end) {
    std::size_t count = 0;
    for (const TokenSpan& w : words) {
      if (w.begin >= begin && w.begin < end) ++count;
    }
    return count;
  };

  const std::size_t n = text.size();
  std::vector<std::pair<std::size_t, std::size_t>> spans;

  std::size_t i = 0;
  while (i < n && is_space(text[i])) ++i;
  std::size_t sentence_start = i;

  while (i < n) {
    char c = text[i];
    if (!is_terminator(c)) {
      ++i;
      continue;
    }
    // Attach any following terminators ("?!", "...") and closing
    // quotes/brackets to the current sentence.
    std::size_t j = i + 1;
    while (j < n) {
      if (is_terminator(text[j])) {
        ++j;
        continue;
      }
      std::size_t len = closer_len(text, j);
      if (len == 0) break;
      j += len;
    }
    // A terminator glued to following text (decimals, intra-token periods)
    // never closes a sentence.
    if (j < n && !is_space(text[j])) {
      i = j;
      continue;
    }
    if (c == '.' && ends_with_abbreviation(text, i)) {
      i = j;
      continue;
    }
    if (words_in(sentence_start, j) >= 1) {
      spans.emplace_back(sentence_start, j);
      i = j;
      while (i < n && is_space(text[i])) ++i;
      sentence_start = i;
    } else {
      i = j;
    }
  }

  // Trailing text without a terminator still forms a sentence when it holds
  // at least one word; an all-punctuation tail attaches to the previous one.
  if (sentence_start < n) {
    std::size_t end = trim_end(text, sentence_start, n);
    if (end > sentence_start) {
      if (words_in(sentence_start, end) >= 1) {
        spans.emplace_back(sentence_start, end);
      } else if (!spans.empty()) {
        spans.back().second = end;
      }
    }
  }

  if (spans.empty()) {
    throw Error(ErrorCode::EmptyDocument, "no sentence with a word token");
  }

  SentenceSequence seq;
  seq.sentences.reserve(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    Sentence s;
    s.index = k;
    s.begin = spans[k].first;
    s.end = trim_end(text, spans[k].first, spans[k].second);
    s.text = std::string(text.substr(s.begin, s.end - s.begin));
    s.word_count = words_in(s.begin, s.end);
    seq.sentences.push_back(std::move(s));
  }
  return seq;
}

WindowPartition partition_windows(std::string_view text,
                                  std::size_t window_size) {
  if (window_size < 1) {
    throw Error(ErrorCode::ConfigError, "window_size must be >= 1");
  }
  const std::size_t total = tokenize_words(text).size();
  if (total == 0) {
    throw Error(ErrorCode::EmptyDocument, "no word tokens to window");
  }
  WindowPartition part;
  part.window_size = window_size;
  const std::size_t count = (total + window_size - 1) / window_size;
  part.windows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Window w;
    w.index = k;
    w.begin_word = k * window_size;
    w.end_word = std::min((k + 1) * window_size, total);
    part.windows.push_back(w);
  }
  return part;
}

ChunkSequence validate_chunk_partition(ChunkSequence chunks,
                                       std::size_t sentence_count) {
  if (chunks.chunks.empty()) {
    throw Error(ErrorCode::GapError, "empty chunk sequence");
  }
  std::sort(chunks.chunks.begin(), chunks.chunks.end(),
            [](const Chunk& a, const Chunk& b) {
              return a.begin_sentence < b.begin_sentence;
            });
  std::size_t expected = 0;
  for (const Chunk& c : chunks.chunks) {
    if (c.begin_sentence >= c.end_sentence) {
      throw Error(ErrorCode::RangeError,
                  "empty sentence range at chunk starting " +
                      std::to_string(c.begin_sentence));
    }
    if (c.end_sentence > sentence_count) {
      throw Error(ErrorCode::RangeError,
                  "range [" + std::to_string(c.begin_sentence) + ", " +
                      std::to_string(c.end_sentence) + ") exceeds " +
                      std::to_string(sentence_count) + " sentences");
    }
    if (c.begin_sentence < expected) {
      throw Error(ErrorCode::OverlapError,
                  "ranges intersect at sentence " +
                      std::to_string(c.begin_sentence));
    }
    if (c.begin_sentence > expected) {
      throw Error(ErrorCode::GapError,
                  "sentence " + std::to_string(expected) + " uncovered");
    }
    expected = c.end_sentence;
  }
  if (expected != sentence_count) {
    throw Error(ErrorCode::GapError,
                "sentence " + std::to_string(expected) + " uncovered");
  }
  for (std::size_t k = 0; k < chunks.chunks.size(); ++k) {
    chunks.chunks[k].index = k;
  }
  return chunks;
}

ChunkSequence chunk_document(std::string_view text,
                             const SentenceSequence& sentences,
                             AnnotatorBackend& backend, int max_attempts) {
  if (!backend.supports(Pass::Chunking)) {
    throw Error(ErrorCode::UnsupportedPass,
                "backend '" + backend.id() + "' cannot propose chunks");
  }
  std::string last_failure;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<ChunkProposal> proposals =
        backend.propose_chunks(sentences, text);
    ChunkSequence chunks;
    chunks.chunks.reserve(proposals.size());
    for (std::size_t k = 0; k < proposals.size(); ++k) {
      auto label = toulmin_from_string(proposals[k].label);
      if (!label) {
        throw Error(ErrorCode::SchemaError,
                    "label '" + proposals[k].label +
                        "' outside the Toulmin typology");
      }
      chunks.chunks.push_back(
          {k, proposals[k].begin_sentence, proposals[k].end_sentence, *label});
    }
    try {
      return validate_chunk_partition(std::move(chunks), sentences.size());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OverlapError &&
          e.code() != ErrorCode::GapError &&
          e.code() != ErrorCode::RangeError) {
        throw;
      }
      last_failure = e.what();
    }
  }
  throw Error(ErrorCode::BackendError,
              "no valid chunk partition after " +
                  std::to_string(max_attempts) +
                  " attempts (last: " + last_failure + ")");
}

}  // namespace erm
