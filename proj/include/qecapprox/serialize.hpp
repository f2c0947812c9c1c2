// Copyright 2026 The qecapprox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qecapprox/approx.hpp"

namespace qecapprox {

using Json = nlohmann::json;

/// {kind, labels, probs}
Json to_json(const ChannelModel& m);
ChannelModel model_from_json(const Json& j);

/// {target, set_kind, constraint, probs, objective, constraint_satisfied,
///  max_violation, status}
Json to_json(const FitResult& r, const Json& target);

/// 12 significant digits, '.' decimal point, locale independent.
std::string format_number(double v);

using CsvRow = std::vector<std::string>;

void write_csv(const std::filesystem::path& path, const CsvRow& header, const std::vector<CsvRow>& rows);

/// Returns the rows after the header; checks the header matches.
std::vector<CsvRow> read_csv(const std::filesystem::path& path, const CsvRow& expected_header);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

std::uint64_t fnv1a(std::string_view data);

}  // namespace qecapprox
