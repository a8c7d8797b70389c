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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erm/segmentation.hpp"
#include "erm/taxonomy.hpp"

namespace erm {

// Dense row-major 0/1 matrix. Annotation matrices are small (rows = sentence
// or chunk count, cols <= 5), so no sparse machinery.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint8_t at(std::size_t r, std::size_t c) const {
    return cells_[r * cols_ + c];
  }
  void set(std::size_t r, std::size_t c, std::uint8_t value) {
    cells_[r * cols_ + c] = value ? 1 : 0;
  }
  void set_row(std::size_t r, std::span<const std::uint8_t> row);

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {cells_.data() + r * cols_, cols_};
  }

  std::size_t sum() const;
  std::size_t row_sum(std::size_t r) const;
  std::size_t column_sum(std::size_t c) const;

  bool operator==(const BinaryMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

// The per-document annotation bundle: six binary matrices whose shapes are
// locked to the document's segmentation (m sentences, p chunks):
// l1a m x 5, l1b p x 3, l1c 1 x 2, l2a m x 4, l2b m x 2, l3 1 x 4.
struct AnnotationVector {
  BinaryMatrix l1a;
  BinaryMatrix l1b;
  BinaryMatrix l1c;
  BinaryMatrix l2a;
  BinaryMatrix l2b;
  BinaryMatrix l3;
  std::string annotator_id;
  std::string schema_version{kSchemaVersion};
};

// Throws ShapeError unless every matrix matches the schema-locked shape
// for (sentence_count, chunk_count).
void validate_shapes(const AnnotationVector& vec, std::size_t sentence_count,
                     std::size_t chunk_count);

// The five annotation capabilities a backend may provide. SentenceRhetoric
// and SentenceEpistemic run once per sentence; ChunkRhetoric once per
// argumentative chunk; DocumentLevel once per document; Chunking serves the
// segmenter's Toulmin chunk proposal.
enum class Pass {
  SentenceRhetoric,
  SentenceEpistemic,
  ChunkRhetoric,
  DocumentLevel,
  Chunking,
};

std::string_view to_string(Pass pass);

struct SentenceContext {
  std::string_view text;
  // Previous sentence, when one exists; anaphora is detected on the second
  // and later of consecutive sentences sharing an opening.
  std::optional<std::string_view> previous;
  // Whether this sentence closes its chunk; sententia requires final
  // position. Callers without chunk structure should leave it false.
  bool chunk_final = false;
};

struct DocumentContext {
  std::string_view text;
  const SentenceSequence* sentences = nullptr;
  // Toulmin chunk structure supplied as context for document-level
  // judgements.
  const ChunkSequence* chunks = nullptr;
};

struct ChunkProposal {
  std::size_t begin_sentence = 0;
  std::size_t end_sentence = 0;
  std::string label;  // must name a Toulmin label
};

struct SentenceRhetoricRow {
  std::vector<std::uint8_t> l1a;  // 5 entries, column order = inventory order
};

struct SentenceEpistemicRows {
  std::vector<std::uint8_t> l2a;  // 4 entries
  std::vector<std::uint8_t> l2b;  // 2 entries
};

struct DocumentRows {
  std::vector<std::uint8_t> l1c;  // 2 entries
  std::vector<std::uint8_t> l3;   // 4 entries
};

// Behavioral contract shared by the rule and LLM annotators. A backend
// claiming a pass must return complete rows for every unit of that pass;
// the orchestrator enforces row widths and assembles the matrices.
class AnnotatorBackend {
 public:
  virtual ~AnnotatorBackend() = default;

  virtual std::string id() const = 0;
  virtual bool supports(Pass pass) const = 0;

  virtual SentenceRhetoricRow annotate_sentence_rhetoric(
      const SentenceContext& ctx) = 0;
  virtual SentenceEpistemicRows annotate_sentence_epistemic(
      const SentenceContext& ctx) = 0;
  virtual std::vector<std::uint8_t> annotate_chunk(std::string_view chunk_text,
                                                   ToulminLabel label) = 0;
  virtual DocumentRows annotate_document_level(const DocumentContext& ctx) = 0;
  virtual std::vector<ChunkProposal> propose_chunks(
      const SentenceSequence& sentences, std::string_view doc_text) = 0;
};

// Runs the four annotation passes over a segmented document, preferring
// `primary` for every pass it supports and falling back to `fallback`
// otherwise. Pass 3 visits only non-NonArgumentative chunks; rows for
// NonArgumentative chunks stay zero. Throws UnsupportedPass when no backend
// covers a required pass, ShapeError on row-width violations.
AnnotationVector annotate_document(std::string_view doc_text,
                                   const SentenceSequence& sentences,
                                   const ChunkSequence& chunks,
                                   AnnotatorBackend& primary,
                                   AnnotatorBackend* fallback = nullptr);

}  // namespace erm
