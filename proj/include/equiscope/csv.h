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

#ifndef EQUISCOPE_CSV_H_
#define EQUISCOPE_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace equiscope::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or npos.
  std::size_t ColumnIndex(std::string_view name) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// RFC-4180 parser: quoted fields, doubled quotes, embedded separators and
// newlines, CRLF or LF line endings, optional UTF-8 BOM. The first record is
// the header. Throws SchemaError on ragged rows or an unterminated quote.
Table Parse(std::string_view text);
Table ReadFile(const std::filesystem::path& path);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string EscapeField(std::string_view field);
void WriteRow(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace equiscope::csv

#endif  // EQUISCOPE_CSV_H_
