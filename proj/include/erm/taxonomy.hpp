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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace erm {

// The marker schema is the single source of truth for every other module:
// annotation matrices are shape- and column-locked to the inventories below.
//
// Column order of every annotation matrix equals marker_inventory() order
// for its level. Changing an inventory is a schema change and must bump
// kSchemaVersion.

inline constexpr std::string_view kSchemaVersion = "erm-1";

enum class Level { L1a, L1b, L1c, L2a, L2b, L3 };

enum class Granularity { Sentence, Chunk, Document };

enum class ToulminLabel {
  Claim,
  Grounds,
  Warrant,
  Backing,
  Qualifier,
  Rebuttal,
  NonArgumentative,
};

inline constexpr std::size_t kToulminLabelCount = 7;

struct MarkerInfo {
  Level level;
  std::string_view name;  // canonical snake_case id, used in all file formats
  std::string_view definition;
  std::string_view example;
};

// Ordered marker list for one level; ordering is the fixed column order of
// the level's annotation matrix.
std::span<const MarkerInfo> marker_inventory(Level level);

// All 20 markers in level order (L1a, L1b, L1c, L2a, L2b, L3).
std::span<const MarkerInfo> all_markers();

Granularity granularity_of(Level level);
Granularity granularity_of(const MarkerInfo& marker);

// Column count of the level's annotation matrix (5, 3, 2, 4, 2, 4).
std::size_t column_count(Level level);

const MarkerInfo* find_marker(std::string_view name);

std::string_view to_string(Level level);
std::optional<Level> level_from_string(std::string_view text);

std::string_view to_string(Granularity unit);

std::string_view to_string(ToulminLabel label);
std::optional<ToulminLabel> toulmin_from_string(std::string_view text);

// Machine-readable schema document (erm-taxonomy.json): per marker its
// name, level, granularity, definition, and example. Consumed by the LLM
// annotator's prompt builder and by docs generation.
std::string taxonomy_json();
void write_taxonomy_json(const std::filesystem::path& path);

}  // namespace erm
