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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "erm/taxonomy.hpp"

namespace erm {

class AnnotatorBackend;

// Half-open [begin, end) byte span into the source document.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Shared word tokenizer: whitespace-delimited tokens with outer punctuation
// stripped; tokens that are all punctuation do not count as words. Every
// downstream word count (sentence word counts, window positions) uses this
// one tokenization, so totals agree by construction.
std::vector<TokenSpan> tokenize_words(std::string_view text);

struct Sentence {
  std::size_t index = 0;  // contiguous from 0
  std::string text;       // trimmed surface text
  std::size_t word_count = 0;
  std::size_t begin = 0;  // byte span into the document, half-open
  std::size_t end = 0;
};

struct SentenceSequence {
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  std::size_t total_words() const;
  // Document word position of the first word of sentence i (prefix sum).
  std::size_t first_word_position(std::size_t sentence_index) const;
};

struct Chunk {
  std::size_t index = 0;
  std::size_t begin_sentence = 0;  // half-open range over sentence indices
  std::size_t end_sentence = 0;
  ToulminLabel label = ToulminLabel::NonArgumentative;
};

struct ChunkSequence {
  std::vector<Chunk> chunks;

  std::size_t size() const { return chunks.size(); }
};

struct Window {
  std::size_t index = 0;
  std::size_t begin_word = 0;  // half-open range over document word positions
  std::size_t end_word = 0;
};

struct WindowPartition {
  std::vector<Window> windows;
  std::size_t window_size = 50;

  std::size_t count() const { return windows.size(); }
  // Window index holding document word position `pos`.
  std::size_t window_of(std::size_t pos) const;
};

inline constexpr std::size_t kDefaultWindowSize = 50;

// Deterministic rule-based sentence segmentation. Terminators . ! ? close a
// sentence unless the period ends a known abbreviation, sits inside a
// number, or is followed by a closing quote/bracket (which attaches to the
// current sentence). Throws EmptyDocument when no word tokens survive.
SentenceSequence split_sentences(std::string_view text);

// Greedy left-to-right fill of fixed-size word windows over the document;
// all windows hold exactly window_size words except possibly the last.
// Throws EmptyDocument.
WindowPartition partition_windows(std::string_view text,
                                  std::size_t window_size = kDefaultWindowSize);

// Returns the input unchanged iff the chunk ranges tile [0, sentence_count)
// exactly. Throws OverlapError, GapError, or RangeError otherwise.
ChunkSequence validate_chunk_partition(ChunkSequence chunks,
                                       std::size_t sentence_count);

// Requests a Toulmin chunking from the backend and validates it. Partition
// failures consume retry attempts; an invalid label is a SchemaError
// immediately. Throws BackendError once max_attempts are exhausted.
ChunkSequence chunk_document(std::string_view text,
                             const SentenceSequence& sentences,
                             AnnotatorBackend& backend, int max_attempts = 3);

}  // namespace erm
