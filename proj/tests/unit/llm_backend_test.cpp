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

#include "erm/llm_backend.hpp"

#include <atomic>
#include <cstdlib>

#include "doctest.h"
#include "erm/errors.hpp"
#include "mock_llm_server.hpp"
#include "nlohmann/json.hpp"

using namespace erm;
using erm::testing::MockServer;

namespace {

SentenceContext sentence_ctx(std::string_view text) {
  return {text, std::nullopt, false};
}

}  // namespace

TEST_CASE("llm backend parses a strict binary row") {
  MockServer server;
  server.reply = [](const nlohmann::json&) {
    return R"({"tricolon":1,"anaphora":0,"chiasmus":0,"erotema":0,"sententia":0})";
  };
  LlmBackend backend(server.config());
  SentenceRhetoricRow row =
      backend.annotate_sentence_rhetoric(sentence_ctx("A test sentence."));
  CHECK(row.l1a == std::vector<std::uint8_t>{1, 0, 0, 0, 0});

  // Request pins deterministic sampling and carries the key.
  REQUIRE_FALSE(server.requests.empty());
  const nlohmann::json& request = server.requests.front();
  CHECK(request["temperature"] == 0);
  CHECK(request["model"] == "mock-model");
  CHECK(server.auth_headers.front() == "Bearer test-key");

  // The system prompt embeds the pass's marker definitions and examples.
  const std::string system =
      request["messages"][0]["content"].get<std::string>();
  CHECK(system.find("tricolon") != std::string::npos);
  CHECK(system.find("sententia") != std::string::npos);
  CHECK(system.find("parsimonious, falsifiable") != std::string::npos);
  const std::string user = request["messages"][1]["content"].get<std::string>();
  CHECK(user.find("A test sentence.") != std::string::npos);
}

TEST_CASE("llm reply schema violations are SchemaError without retry") {
  MockServer server;
  LlmBackend backend(server.config());

  SUBCASE("non-binary value") {
    server.reply = [](const nlohmann::json&) {
      return R"({"tricolon":"yes","anaphora":0,"chiasmus":0,"erotema":0,"sententia":0})";
    };
    try {
      backend.annotate_sentence_rhetoric(sentence_ctx("S."));
      FAIL("expected SchemaError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaError);
    }
    CHECK(server.requests.size() == 1);
  }

  SUBCASE("missing marker key") {
    server.reply = [](const nlohmann::json&) {
      return R"({"tricolon":0,"anaphora":0,"chiasmus":0,"erotema":0})";
    };
    CHECK_THROWS_AS(backend.annotate_sentence_rhetoric(sentence_ctx("S.")),
                    Error);
    CHECK(server.requests.size() == 1);
  }

  SUBCASE("extra key") {
    server.reply = [](const nlohmann::json&) {
      return R"({"tricolon":0,"anaphora":0,"chiasmus":0,"erotema":0,"sententia":0,"extra":1})";
    };
    CHECK_THROWS_AS(backend.annotate_sentence_rhetoric(sentence_ctx("S.")),
                    Error);
  }

  SUBCASE("out-of-range integer") {
    server.reply = [](const nlohmann::json&) {
      return R"({"tricolon":2,"anaphora":0,"chiasmus":0,"erotema":0,"sententia":0})";
    };
    CHECK_THROWS_AS(backend.annotate_sentence_rhetoric(sentence_ctx("S.")),
                    Error);
  }
}

TEST_CASE("malformed reply content retries, then succeeds or fails") {
  MockServer server;
  std::atomic<int> call{0};

  SUBCASE("recovers on the second attempt") {
    server.reply = [&call](const nlohmann::json&) -> std::string {
      if (call.fetch_add(1) == 0) return "not json at all";
      return R"({"tricolon":0,"anaphora":1,"chiasmus":0,"erotema":0,"sententia":0})";
    };
    LlmBackend backend(server.config());
    SentenceRhetoricRow row =
        backend.annotate_sentence_rhetoric(sentence_ctx("S."));
    CHECK(row.l1a[1] == 1);
    CHECK(server.requests.size() == 2);
  }

  SUBCASE("exhausting the budget is a BackendError") {
    server.reply = [](const nlohmann::json&) { return "still not json"; };
    LlmBackend backend(server.config());
    try {
      backend.annotate_sentence_rhetoric(sentence_ctx("S."));
      FAIL("expected BackendError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BackendError);
    }
    CHECK(server.requests.size() == 3);  // max_attempts
  }
}

TEST_CASE("unreachable endpoint is a BackendError") {
  LlmConfig config;
  config.base_url = "http://127.0.0.1:9";  // discard port, nothing listens
  config.api_key = "k";
  config.model = "m";
  config.max_attempts = 2;
  config.backoff_base_ms = 0;
  config.timeout_seconds = 1;
  LlmBackend backend(config);
  try {
    backend.annotate_sentence_rhetoric(sentence_ctx("S."));
    FAIL("expected BackendError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendError);
  }
}

TEST_CASE("environment configuration fails fast when unset") {
  ::unsetenv("ERM_LLM_BASE_URL");
  ::unsetenv("ERM_LLM_API_KEY");
  ::unsetenv("ERM_LLM_MODEL");
  try {
    LlmConfig::from_env();
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }

  ::setenv("ERM_LLM_BASE_URL", "http://127.0.0.1:1", 1);
  ::setenv("ERM_LLM_MODEL", "m", 1);
  CHECK_THROWS_AS(LlmConfig::from_env(), Error);  // key still missing

  ::setenv("ERM_LLM_API_KEY", "k", 1);
  LlmConfig config = LlmConfig::from_env();
  CHECK(config.base_url == "http://127.0.0.1:1");
  CHECK(config.model == "m");
  ::unsetenv("ERM_LLM_BASE_URL");
  ::unsetenv("ERM_LLM_API_KEY");
  ::unsetenv("ERM_LLM_MODEL");
}

TEST_CASE("epistemic pass splits the six markers into 2a and 2b rows") {
  MockServer server;
  server.reply = [](const nlohmann::json&) {
    return R"({"modal_auxiliaries":1,"adverbial_expressions":0,"syntactic_restrictors":0,"evidential_markers":1,"complexity_tokens":0,"meta_epistemic_gestures":1})";
  };
  LlmBackend backend(server.config());
  SentenceEpistemicRows rows =
      backend.annotate_sentence_epistemic(sentence_ctx("S."));
  CHECK(rows.l2a == std::vector<std::uint8_t>{1, 0, 0, 1});
  CHECK(rows.l2b == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("document pass returns narrative and structure rows with chunk "
          "context") {
  MockServer server;
  server.reply = [](const nlohmann::json&) {
    return R"({"peripeteia":0,"evr":1,"aporetic_endpoint":1,"synthetic_closure":0,"premature_closure":0,"speculative_depth":0})";
  };
  LlmBackend backend(server.config());

  SentenceSequence sentences = split_sentences("One here. Two there.");
  ChunkSequence chunks;
  chunks.chunks = {{0, 0, 2, ToulminLabel::Claim}};
  DocumentContext ctx{"One here. Two there.", &sentences, &chunks};
  DocumentRows rows = backend.annotate_document_level(ctx);
  CHECK(rows.l1c == std::vector<std::uint8_t>{0, 1});
  CHECK(rows.l3 == std::vector<std::uint8_t>{1, 0, 0, 0});

  const std::string user =
      server.requests.front()["messages"][1]["content"].get<std::string>();
  CHECK(user.find("Claim") != std::string::npos);
  CHECK(user.find("[0, 2)") != std::string::npos);
}

TEST_CASE("llm chunk proposals flow through chunk_document") {
  MockServer server;
  LlmBackend backend(server.config());
  const std::string text = "First one. Second one. Third one.";
  SentenceSequence sentences = split_sentences(text);

  SUBCASE("valid proposal") {
    server.reply = [](const nlohmann::json&) {
      return R"({"chunks":[{"start":0,"end":2,"label":"Claim"},{"start":2,"end":3,"label":"Grounds"}]})";
    };
    ChunkSequence chunks = chunk_document(text, sentences, backend);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks.chunks[0].label == ToulminLabel::Claim);
  }

  SUBCASE("label outside the typology") {
    server.reply = [](const nlohmann::json&) {
      return R"({"chunks":[{"start":0,"end":3,"label":"Evidence"}]})";
    };
    try {
      chunk_document(text, sentences, backend);
      FAIL("expected SchemaError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaError);
    }
  }

  SUBCASE("persistent overlap exhausts the partition retry budget") {
    server.reply = [](const nlohmann::json&) {
      return R"({"chunks":[{"start":0,"end":2,"label":"Claim"},{"start":1,"end":3,"label":"Grounds"}]})";
    };
    try {
      chunk_document(text, sentences, backend, /*max_attempts=*/2);
      FAIL("expected BackendError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BackendError);
    }
    CHECK(server.requests.size() == 2);
  }

  SUBCASE("missing chunks array is a SchemaError") {
    server.reply = [](const nlohmann::json&) { return R"({"spans":[]})"; };
    CHECK_THROWS_AS(chunk_document(text, sentences, backend), Error);
  }
}

TEST_CASE("llm backend annotates a full document end to end") {
  MockServer server;
  server.reply = [](const nlohmann::json& request) -> std::string {
    const std::string system =
        request["messages"][0]["content"].get<std::string>();
    if (system.find("segment argumentative documents") != std::string::npos) {
      return R"({"chunks":[{"start":0,"end":2,"label":"Claim"}]})";
    }
    if (system.find("\"tricolon\"") != std::string::npos) {
      return R"({"tricolon":1,"anaphora":0,"chiasmus":1,"erotema":0,"sententia":0})";
    }
    if (system.find("\"modal_auxiliaries\"") != std::string::npos) {
      return R"({"modal_auxiliaries":0,"adverbial_expressions":1,"syntactic_restrictors":0,"evidential_markers":0,"complexity_tokens":1,"meta_epistemic_gestures":0})";
    }
    if (system.find("\"correctio\"") != std::string::npos) {
      return R"({"correctio":1,"enumeratio":0,"auxesis":0})";
    }
    return R"({"peripeteia":1,"evr":0,"aporetic_endpoint":0,"synthetic_closure":1,"premature_closure":0,"speculative_depth":0})";
  };
  LlmBackend backend(server.config());

  const std::string text = "One claim here. A second follows.";
  SentenceSequence sentences = split_sentences(text);
  ChunkSequence chunks = chunk_document(text, sentences, backend);
  AnnotationVector vec = annotate_document(text, sentences, chunks, backend);

  CHECK(vec.l1a.column_sum(0) == 2);  // tricolon on both sentences
  CHECK(vec.l1a.column_sum(2) == 2);  // chiasmus: judgement-level coverage
  CHECK(vec.l1b.at(0, 0) == 1);
  CHECK(vec.l1c.at(0, 0) == 1);
  CHECK(vec.l3.at(0, 1) == 1);
  CHECK(vec.annotator_id == "llm:mock-model");
}
