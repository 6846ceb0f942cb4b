// Copyright 2026 The Equiscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "equiscope/json_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "equiscope/errors.h"

namespace equiscope {
namespace {

void Indent(std::string& out, int depth) { out.append(2 * depth, ' '); }

void DumpTo(const Json& value, int depth, std::string& out) {
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        Indent(out, depth + 1);
        out += Json(it.key()).dump();
        out += ": ";
        DumpTo(it.value(), depth + 1, out);
      }
      out += "\n";
      Indent(out, depth);
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i > 0) out += ",\n";
        Indent(out, depth + 1);
        DumpTo(value[i], depth + 1, out);
      }
      out += "\n";
      Indent(out, depth);
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = value.get<double>();
      if (std::isfinite(v)) {
        out += FormatDouble(v);
      } else {
        out += EncodeDouble(v).dump();
      }
      return;
    }
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  std::string text(buffer, result.ptr);
  if (std::isfinite(value) &&
      text.find_first_of(".e") == std::string::npos) {
    text += ".0";
  }
  return text;
}

std::string CanonicalDump(const Json& value) {
  std::string out;
  DumpTo(value, 0, out);
  out += "\n";
  return out;
}

Json EncodeDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double ReadDouble(const Json& value) {
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw SchemaError("expected a number, got string \"" + s + "\"");
  }
  if (!value.is_number()) throw SchemaError("expected a number");
  return value.get<double>();
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace equiscope
