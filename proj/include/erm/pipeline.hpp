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

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "erm/llm_backend.hpp"
#include "erm/segmentation.hpp"

namespace erm {

enum class BackendKind { Rule, Llm, Hybrid };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> backend_from_string(std::string_view text);

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path output_dir;
  BackendKind backend = BackendKind::Rule;
  std::size_t window_size = kDefaultWindowSize;
  std::size_t concurrency_bound = 1;
  bool force = false;
  // Filled from the environment when an LLM-backed run starts; tests may
  // inject a configuration directly.
  std::optional<LlmConfig> llm;
};

// Exit codes shared by every command: 0 success, 1 partial (one or more
// documents failed), 2 configuration or I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

int cmd_segment(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_annotate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_features(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
// compare plus the raw marker-count exports.
int cmd_report(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace erm
