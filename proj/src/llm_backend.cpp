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

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "erm/errors.hpp"
#include "httplib.h"

namespace erm {

namespace {

std::string env_or_fail(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::ConfigError,
                std::string(name) + " is not set; the LLM backend needs "
                "ERM_LLM_BASE_URL, ERM_LLM_API_KEY, and ERM_LLM_MODEL");
  }
  return value;
}

std::string marker_brief(std::span<const MarkerInfo> markers) {
  std::ostringstream out;
  for (const MarkerInfo& m : markers) {
    out << "- " << m.name << ": " << m.definition << " Example: \""
        << m.example << "\"\n";
  }
  return out.str();
}

std::string marker_key_list(std::span<const MarkerInfo> markers) {
  std::string keys;
  for (const MarkerInfo& m : markers) {
    if (!keys.empty()) keys += ", ";
    keys += "\"";
    keys += m.name;
    keys += "\"";
  }
  return keys;
}

std::string binary_system_prompt(std::span<const MarkerInfo> markers) {
  std::ostringstream out;
  out << "You annotate epistemic-rhetorical markers in argumentative "
         "prose.\nDecide for each marker whether it is present (1) or "
         "absent (0) in the unit.\n\nMarkers:\n"
      << marker_brief(markers)
      << "\nRespond with one JSON object whose keys are exactly "
      << marker_key_list(markers)
      << " and whose values are 0 or 1. No other keys, no prose.";
  return out.str();
}

// Strict reply schema: exactly the pass's marker keys, each 0 or 1.
std::vector<std::uint8_t> validate_row(const nlohmann::json& content,
                                       std::span<const MarkerInfo> markers) {
  if (!content.is_object()) {
    throw Error(ErrorCode::SchemaError, "annotator reply is not an object");
  }
  if (content.size() != markers.size()) {
    throw Error(ErrorCode::SchemaError,
                "annotator reply has " + std::to_string(content.size()) +
                    " keys, expected " + std::to_string(markers.size()));
  }
  std::vector<std::uint8_t> row;
  row.reserve(markers.size());
  for (const MarkerInfo& m : markers) {
    auto it = content.find(std::string(m.name));
    if (it == content.end()) {
      throw Error(ErrorCode::SchemaError,
                  "annotator reply missing '" + std::string(m.name) + "'");
    }
    if (!it->is_number_integer() && !it->is_number_unsigned()) {
      throw Error(ErrorCode::SchemaError,
                  "non-binary value for '" + std::string(m.name) + "'");
    }
    const long long bit = it->get<long long>();
    if (bit != 0 && bit != 1) {
      throw Error(ErrorCode::SchemaError,
                  "non-binary value for '" + std::string(m.name) + "'");
    }
    row.push_back(static_cast<std::uint8_t>(bit));
  }
  return row;
}

std::string sentence_user_prompt(const SentenceContext& ctx) {
  std::ostringstream out;
  if (ctx.previous) {
    out << "Previous sentence: " << *ctx.previous << "\n";
  }
  out << "Sentence: " << ctx.text;
  if (ctx.chunk_final) {
    out << "\n(This sentence closes its argument chunk.)";
  }
  return out.str();
}

}  // namespace

LlmConfig LlmConfig::from_env() {
  LlmConfig config;
  config.base_url = env_or_fail("ERM_LLM_BASE_URL");
  config.api_key = env_or_fail("ERM_LLM_API_KEY");
  config.model = env_or_fail("ERM_LLM_MODEL");
  return config;
}

LlmBackend::LlmBackend(LlmConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty() || config_.model.empty()) {
    throw Error(ErrorCode::ConfigError, "LLM base_url and model are required");
  }
}

nlohmann::json LlmBackend::complete(const std::string& system_prompt,
                                    const std::string& user_prompt) {
  nlohmann::json request{
      {"model", config_.model},
      {"temperature", 0},
      {"messages",
       nlohmann::json::array({
           nlohmann::json{{"role", "system"}, {"content", system_prompt}},
           nlohmann::json{{"role", "user"}, {"content", user_prompt}},
       })},
  };
  const std::string body = request.dump();

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0 && config_.backoff_base_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          config_.backoff_base_ms * (1 << (attempt - 1))));
    }
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers{
        {"Authorization", "Bearer " + config_.api_key},
    };
    httplib::Result response = client.Post("/v1/chat/completions", headers,
                                           body, "application/json");
    if (!response) {
      last_failure = "transport: " + httplib::to_string(response.error());
      continue;
    }
    if (response->status != 200) {
      last_failure = "HTTP " + std::to_string(response->status);
      continue;
    }
    nlohmann::json envelope =
        nlohmann::json::parse(response->body, nullptr, false);
    if (envelope.is_discarded()) {
      last_failure = "response body is not JSON";
      continue;
    }
    if (!envelope.contains("choices") || !envelope["choices"].is_array() ||
        envelope["choices"].empty() ||
        !envelope["choices"][0].contains("message") ||
        !envelope["choices"][0]["message"].contains("content") ||
        !envelope["choices"][0]["message"]["content"].is_string()) {
      last_failure = "response lacks choices[0].message.content";
      continue;
    }
    const std::string content =
        envelope["choices"][0]["message"]["content"].get<std::string>();
    nlohmann::json parsed = nlohmann::json::parse(content, nullptr, false);
    if (parsed.is_discarded()) {
      last_failure = "reply content is not JSON";
      continue;
    }
    return parsed;
  }
  throw Error(ErrorCode::BackendError,
              "LLM request failed after " +
                  std::to_string(config_.max_attempts) +
                  " attempts (last: " + last_failure + ")");
}

SentenceRhetoricRow LlmBackend::annotate_sentence_rhetoric(
    const SentenceContext& ctx) {
  const auto markers = marker_inventory(Level::L1a);
  nlohmann::json reply =
      complete(binary_system_prompt(markers), sentence_user_prompt(ctx));
  return {validate_row(reply, markers)};
}

SentenceEpistemicRows LlmBackend::annotate_sentence_epistemic(
    const SentenceContext& ctx) {
  // One request covers both epistemic layers.
  std::vector<MarkerInfo> markers;
  for (const MarkerInfo& m : marker_inventory(Level::L2a)) markers.push_back(m);
  for (const MarkerInfo& m : marker_inventory(Level::L2b)) markers.push_back(m);
  nlohmann::json reply =
      complete(binary_system_prompt(markers), sentence_user_prompt(ctx));
  std::vector<std::uint8_t> row = validate_row(reply, markers);
  const std::size_t split = column_count(Level::L2a);
  return {std::vector<std::uint8_t>(row.begin(), row.begin() + split),
          std::vector<std::uint8_t>(row.begin() + split, row.end())};
}

std::vector<std::uint8_t> LlmBackend::annotate_chunk(
    std::string_view chunk_text, ToulminLabel label) {
  const auto markers = marker_inventory(Level::L1b);
  std::ostringstream user;
  user << "Argument chunk (Toulmin role: " << to_string(label) << "):\n"
       << chunk_text;
  nlohmann::json reply = complete(binary_system_prompt(markers), user.str());
  return validate_row(reply, markers);
}

DocumentRows LlmBackend::annotate_document_level(const DocumentContext& ctx) {
  std::vector<MarkerInfo> markers;
  for (const MarkerInfo& m : marker_inventory(Level::L1c)) markers.push_back(m);
  for (const MarkerInfo& m : marker_inventory(Level::L3)) markers.push_back(m);

  std::ostringstream user;
  user << "Document:\n" << ctx.text << "\n\nToulmin chunk outline:\n";
  if (ctx.chunks != nullptr && ctx.sentences != nullptr) {
    for (const Chunk& c : ctx.chunks->chunks) {
      user << "- sentences [" << c.begin_sentence << ", " << c.end_sentence
           << "): " << to_string(c.label) << "\n";
    }
  }
  nlohmann::json reply = complete(binary_system_prompt(markers), user.str());
  std::vector<std::uint8_t> row = validate_row(reply, markers);
  const std::size_t split = column_count(Level::L1c);
  return {std::vector<std::uint8_t>(row.begin(), row.begin() + split),
          std::vector<std::uint8_t>(row.begin() + split, row.end())};
}

std::vector<ChunkProposal> LlmBackend::propose_chunks(
    const SentenceSequence& sentences, std::string_view) {
  std::ostringstream system;
  system << "You segment argumentative documents into contiguous chunks of "
            "sentences and label each chunk with exactly one Toulmin role "
            "out of: Claim, Grounds, Warrant, Backing, Qualifier, Rebuttal, "
            "NonArgumentative.\nChunks must cover every sentence index from "
            "0 to m-1 with no gaps or overlaps, using half-open [start, end) "
            "ranges.\nRespond with one JSON object of the form "
            "{\"chunks\": [{\"start\": 0, \"end\": 2, \"label\": \"Claim\"}, "
            "...]}. No other keys, no prose.";

  std::ostringstream user;
  user << "Sentences (m = " << sentences.size() << "):\n";
  for (const Sentence& s : sentences.sentences) {
    user << s.index << ": " << s.text << "\n";
  }

  nlohmann::json reply = complete(system.str(), user.str());
  if (!reply.is_object() || !reply.contains("chunks") ||
      !reply["chunks"].is_array()) {
    throw Error(ErrorCode::SchemaError,
                "chunking reply lacks a 'chunks' array");
  }
  std::vector<ChunkProposal> proposals;
  for (const auto& item : reply["chunks"]) {
    if (!item.is_object() || !item.contains("start") ||
        !item.contains("end") || !item.contains("label") ||
        !item["start"].is_number_unsigned() ||
        !item["end"].is_number_unsigned() || !item["label"].is_string()) {
      throw Error(ErrorCode::SchemaError, "malformed chunk proposal entry");
    }
    proposals.push_back({item["start"].get<std::size_t>(),
                         item["end"].get<std::size_t>(),
                         item["label"].get<std::string>()});
  }
  return proposals;
}

}  // namespace erm
