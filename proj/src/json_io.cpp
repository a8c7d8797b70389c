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

#include "erm/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "erm/errors.hpp"

namespace erm {

namespace {

void escape_string(const std::string& s, std::string& out) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void dump_value(const nlohmann::json& value, std::string& out, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string child_indent(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (value.type()) {
    case nlohmann::json::value_t::null: out += "null"; break;
    case nlohmann::json::value_t::boolean:
      out += value.get<bool>() ? "true" : "false";
      break;
    case nlohmann::json::value_t::number_integer:
      out += std::to_string(value.get<long long>());
      break;
    case nlohmann::json::value_t::number_unsigned:
      out += std::to_string(value.get<unsigned long long>());
      break;
    case nlohmann::json::value_t::number_float:
      out += format_double(value.get<double>());
      break;
    case nlohmann::json::value_t::string:
      escape_string(value.get<std::string>(), out);
      break;
    case nlohmann::json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ",\n";
        first = false;
        out += child_indent;
        dump_value(item, out, depth + 1);
      }
      out += "\n" + indent + "]";
      break;
    }
    case nlohmann::json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        break;
      }
      // nlohmann objects iterate in key order, which gives sorted keys.
      out += "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += child_indent;
        escape_string(it.key(), out);
        out += ": ";
        dump_value(it.value(), out, depth + 1);
      }
      out += "\n" + indent + "}";
      break;
    }
    default:
      throw Error(ErrorCode::SchemaError, "unsupported JSON value type");
  }
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) value = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string canonical_dump(const nlohmann::json& value) {
  std::string out;
  dump_value(value, out, 0);
  out += '\n';
  return out;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  // Write-then-rename so concurrent readers never observe a partial file.
  std::filesystem::path temp = path;
  temp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(
                        std::this_thread::get_id()) %
                    100000);
  {
    std::ofstream out(temp, std::ios::binary);
    if (!out) {
      throw Error(ErrorCode::IoError, "cannot write " + temp.string());
    }
    out << content;
    if (!out) {
      throw Error(ErrorCode::IoError, "short write to " + temp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw Error(ErrorCode::IoError, "cannot replace " + path.string());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::ParseError, "invalid JSON in " + path.string());
  }
  return parsed;
}

}  // namespace erm
