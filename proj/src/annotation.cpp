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

#include "erm/annotation.hpp"

#include <numeric>

#include "erm/errors.hpp"

namespace erm {

void BinaryMatrix::set_row(std::size_t r, std::span<const std::uint8_t> row) {
  if (row.size() != cols_) {
    throw Error(ErrorCode::ShapeError,
                "row width " + std::to_string(row.size()) + " != " +
                    std::to_string(cols_) + " columns");
  }
  for (std::size_t c = 0; c < cols_; ++c) set(r, c, row[c]);
}

std::size_t BinaryMatrix::sum() const {
  return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0});
}

std::size_t BinaryMatrix::row_sum(std::size_t r) const {
  std::size_t total = 0;
  for (std::size_t c = 0; c < cols_; ++c) total += at(r, c);
  return total;
}

std::size_t BinaryMatrix::column_sum(std::size_t c) const {
  std::size_t total = 0;
  for (std::size_t r = 0; r < rows_; ++r) total += at(r, c);
  return total;
}

namespace {

void require_shape(const BinaryMatrix& m, std::size_t rows, std::size_t cols,
                   std::string_view name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::ShapeError,
                std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::vector<std::uint8_t> checked_row(std::vector<std::uint8_t> row,
                                      std::size_t width,
                                      std::string_view what) {
  if (row.size() != width) {
    throw Error(ErrorCode::ShapeError,
                std::string(what) + " returned " +
                    std::to_string(row.size()) + " entries, expected " +
                    std::to_string(width));
  }
  return row;
}

AnnotatorBackend& backend_for(Pass pass, AnnotatorBackend& primary,
                              AnnotatorBackend* fallback) {
  if (primary.supports(pass)) return primary;
  if (fallback != nullptr && fallback->supports(pass)) return *fallback;
  throw Error(ErrorCode::UnsupportedPass,
              "no backend covers pass " + std::string(to_string(pass)));
}

}  // namespace

std::string_view to_string(Pass pass) {
  switch (pass) {
    case Pass::SentenceRhetoric: return "sentence-rhetoric";
    case Pass::SentenceEpistemic: return "sentence-epistemic";
    case Pass::ChunkRhetoric: return "chunk-rhetoric";
    case Pass::DocumentLevel: return "document-level";
    case Pass::Chunking: return "chunking";
  }
  return "?";
}

void validate_shapes(const AnnotationVector& vec, std::size_t sentence_count,
                     std::size_t chunk_count) {
  require_shape(vec.l1a, sentence_count, column_count(Level::L1a), "lambda_1a");
  require_shape(vec.l1b, chunk_count, column_count(Level::L1b), "lambda_1b");
  require_shape(vec.l1c, 1, column_count(Level::L1c), "lambda_1c");
  require_shape(vec.l2a, sentence_count, column_count(Level::L2a), "lambda_2a");
  require_shape(vec.l2b, sentence_count, column_count(Level::L2b), "lambda_2b");
  require_shape(vec.l3, 1, column_count(Level::L3), "lambda_3");
}

AnnotationVector annotate_document(std::string_view doc_text,
                                   const SentenceSequence& sentences,
                                   const ChunkSequence& chunks,
                                   AnnotatorBackend& primary,
                                   AnnotatorBackend* fallback) {
  const std::size_t m = sentences.size();
  const std::size_t p = chunks.size();
  if (m == 0) {
    throw Error(ErrorCode::EmptyDocument, "document has no sentences");
  }
  validate_chunk_partition(chunks, m);

  AnnotationVector vec;
  vec.l1a = BinaryMatrix(m, column_count(Level::L1a));
  vec.l1b = BinaryMatrix(p, column_count(Level::L1b));
  vec.l1c = BinaryMatrix(1, column_count(Level::L1c));
  vec.l2a = BinaryMatrix(m, column_count(Level::L2a));
  vec.l2b = BinaryMatrix(m, column_count(Level::L2b));
  vec.l3 = BinaryMatrix(1, column_count(Level::L3));

  // Sentence index -> closes-its-chunk flag, for sententia.
  std::vector<bool> chunk_final(m, false);
  for (const Chunk& c : chunks.chunks) {
    chunk_final[c.end_sentence - 1] = true;
  }

  AnnotatorBackend& pass1 = backend_for(Pass::SentenceRhetoric, primary, fallback);
  AnnotatorBackend& pass2 = backend_for(Pass::SentenceEpistemic, primary, fallback);
  AnnotatorBackend& pass3 = backend_for(Pass::ChunkRhetoric, primary, fallback);
  AnnotatorBackend& pass4 = backend_for(Pass::DocumentLevel, primary, fallback);

  for (std::size_t i = 0; i < m; ++i) {
    SentenceContext ctx;
    ctx.text = sentences.sentences[i].text;
    if (i > 0) ctx.previous = sentences.sentences[i - 1].text;
    ctx.chunk_final = chunk_final[i];

    SentenceRhetoricRow r1 = pass1.annotate_sentence_rhetoric(ctx);
    vec.l1a.set_row(i, checked_row(std::move(r1.l1a),
                                   column_count(Level::L1a), "pass 1"));

    SentenceEpistemicRows r2 = pass2.annotate_sentence_epistemic(ctx);
    vec.l2a.set_row(i, checked_row(std::move(r2.l2a),
                                   column_count(Level::L2a), "pass 2 (2a)"));
    vec.l2b.set_row(i, checked_row(std::move(r2.l2b),
                                   column_count(Level::L2b), "pass 2 (2b)"));
  }

  for (const Chunk& c : chunks.chunks) {
    if (c.label == ToulminLabel::NonArgumentative) continue;  // row stays zero
    std::size_t begin = sentences.sentences[c.begin_sentence].begin;
    std::size_t end = sentences.sentences[c.end_sentence - 1].end;
    std::string_view chunk_text = doc_text.substr(begin, end - begin);
    std::vector<std::uint8_t> row = pass3.annotate_chunk(chunk_text, c.label);
    vec.l1b.set_row(c.index, checked_row(std::move(row),
                                         column_count(Level::L1b), "pass 3"));
  }

  DocumentContext doc_ctx{doc_text, &sentences, &chunks};
  DocumentRows r4 = pass4.annotate_document_level(doc_ctx);
  vec.l1c.set_row(0, checked_row(std::move(r4.l1c),
                                 column_count(Level::L1c), "pass 4 (1c)"));
  vec.l3.set_row(0, checked_row(std::move(r4.l3),
                                column_count(Level::L3), "pass 4 (3)"));

  vec.annotator_id = primary.id();
  if (fallback != nullptr && fallback->id() != primary.id()) {
    vec.annotator_id += "+" + fallback->id();
  }
  validate_shapes(vec, m, p);
  return vec;
}

}  // namespace erm
