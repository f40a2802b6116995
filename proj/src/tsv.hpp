// Copyright 2026 The Qrec Authors
//
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

#include "qrec/common.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace qrec::tsv {

// Splits one line on tabs. A trailing '\r' is stripped.
std::vector<std::string_view> split(std::string_view line);

// "\n", "\t", "\\" escapes used inside the document column.
std::string unescape(std::string_view field);
std::string escape(std::string_view field);

double parse_double(std::string_view field, const std::filesystem::path& file, std::size_t line);

std::ifstream open_input(const std::filesystem::path& file);

// Header rows are recognized by their first column name.
inline bool is_header(const std::vector<std::string_view>& cols, std::string_view first) {
  return !cols.empty() && cols.front() == first;
}

[[noreturn]] void fail(ErrorCode code, const std::filesystem::path& file, std::size_t line,
                       const std::string& message);

}  // namespace qrec::tsv
