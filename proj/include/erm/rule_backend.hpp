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

#include <atomic>
#include <cstddef>
#include <string>

#include "erm/annotation.hpp"

namespace erm {

struct RuleSentenceRows {
  std::vector<std::uint8_t> l1a;  // 5 bits
  std::vector<std::uint8_t> l2a;  // 4 bits
  std::vector<std::uint8_t> l2b;  // 2 bits
};

// Deterministic sentence-level detection: surface heuristics for the
// sentence-scale rhetorical devices plus curated lexicons for the epistemic
// marker classes. Pure function of the context; low confidence reads as 0.
// Chiasmus has no reliable surface signature and is always 0 here.
RuleSentenceRows rule_annotate_sentence(const SentenceContext& ctx);

// Rule/lexicon annotator. Covers the sentence passes natively. With
// cover_all_passes (the rule-only pipeline), the chunk- and document-level
// passes return zero rows and count a warning, and chunking falls back to a
// deterministic paragraph heuristic; without it those passes are
// unsupported, so an orchestrator routes them to another backend.
class RuleBackend : public AnnotatorBackend {
 public:
  explicit RuleBackend(bool cover_all_passes = true)
      : cover_all_passes_(cover_all_passes) {}

  std::string id() const override { return "rule-1"; }
  bool supports(Pass pass) const override;

  SentenceRhetoricRow annotate_sentence_rhetoric(
      const SentenceContext& ctx) override;
  SentenceEpistemicRows annotate_sentence_epistemic(
      const SentenceContext& ctx) override;
  std::vector<std::uint8_t> annotate_chunk(std::string_view chunk_text,
                                           ToulminLabel label) override;
  DocumentRows annotate_document_level(const DocumentContext& ctx) override;
  std::vector<ChunkProposal> propose_chunks(const SentenceSequence& sentences,
                                            std::string_view doc_text) override;

  // Units that received a zero fill because the pass has no rule coverage.
  std::size_t zero_fill_count() const { return zero_fill_count_.load(); }

 private:
  bool cover_all_passes_;
  std::atomic<std::size_t> zero_fill_count_{0};
};

}  // namespace erm
