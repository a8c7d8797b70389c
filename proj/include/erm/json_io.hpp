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
#include <string>

#include "nlohmann/json.hpp"

namespace erm {

// Canonical serialization for every persisted record: keys sorted, floats
// at 12 significant digits, two-space indent, trailing newline. Twelve
// digits round-trip through double exactly, so load-then-dump is
// byte-stable and golden tests can compare bytes.
std::string canonical_dump(const nlohmann::json& value);

// Canonical float-to-text used by both JSON and CSV writers.
std::string format_double(double value);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json parse_json_file(const std::filesystem::path& path);

}  // namespace erm
