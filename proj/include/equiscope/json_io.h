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

#ifndef EQUISCOPE_JSON_IO_H_
#define EQUISCOPE_JSON_IO_H_

#include <filesystem>
#include <string>

#include "json.hpp"

namespace equiscope {

using Json = nlohmann::json;

// Canonical serialization: object keys sorted, two-space indent, floats as
// the shortest decimal that round-trips (std::to_chars). Non-finite floats
// become the strings "inf", "-inf" and "nan".
std::string CanonicalDump(const Json& value);

// Shortest round-trip decimal for a double (no exponent normalization).
std::string FormatDouble(double value);

// Inverse of the non-finite encoding above; plain numbers pass through.
double ReadDouble(const Json& value);

// Encodes a double so that non-finite values survive CanonicalDump.
Json EncodeDouble(double value);

Json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace equiscope

#endif  // EQUISCOPE_JSON_IO_H_
