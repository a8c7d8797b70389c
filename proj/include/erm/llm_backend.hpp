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

#include <string>

#include "erm/annotation.hpp"
#include "nlohmann/json.hpp"

namespace erm {

struct LlmConfig {
  std::string base_url;  // scheme://host:port of a chat-completions API
  std::string api_key;
  std::string model;
  int max_attempts = 3;       // transport / malformed-output retry budget
  int backoff_base_ms = 250;  // doubles per retry; 0 disables waiting
  int timeout_seconds = 60;

  // Reads ERM_LLM_BASE_URL, ERM_LLM_API_KEY, ERM_LLM_MODEL. Throws
  // ConfigError before any request when one is unset.
  static LlmConfig from_env();
};

// Annotation backend speaking a chat-completions JSON API. Every request
// pins temperature 0 and embeds the pass's marker definitions and examples
// from the taxonomy; the reply content must be a strict JSON object mapping
// each marker of the pass to 0 or 1. Transport failures and non-JSON
// replies are retried with exponential backoff (BackendError once the
// budget is spent); a well-formed reply with missing/extra keys or
// non-binary values is a SchemaError immediately.
class LlmBackend : public AnnotatorBackend {
 public:
  explicit LlmBackend(LlmConfig config);

  std::string id() const override { return "llm:" + config_.model; }
  bool supports(Pass) const override { return true; }

  SentenceRhetoricRow annotate_sentence_rhetoric(
      const SentenceContext& ctx) override;
  SentenceEpistemicRows annotate_sentence_epistemic(
      const SentenceContext& ctx) override;
  std::vector<std::uint8_t> annotate_chunk(std::string_view chunk_text,
                                           ToulminLabel label) override;
  DocumentRows annotate_document_level(const DocumentContext& ctx) override;
  std::vector<ChunkProposal> propose_chunks(const SentenceSequence& sentences,
                                            std::string_view doc_text) override;

 private:
  // One annotated unit: sends the request, enforces the strict reply
  // schema, returns the content object.
  nlohmann::json complete(const std::string& system_prompt,
                          const std::string& user_prompt);

  LlmConfig config_;
};

}  // namespace erm
