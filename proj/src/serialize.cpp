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

#include "qecapprox/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qecapprox {

Json to_json(const ChannelModel& m) {
  Json labels = Json::array(), probs = Json::array();
  for (std::size_t i = 0; i < m.set.size(); ++i) {
    labels.push_back(m.set.elements()[i].label);
    probs.push_back(m.probs(static_cast<Index>(i)));
  }
  return {{"kind", to_string(m.set.kind())}, {"labels", labels}, {"probs", probs}};
}

ChannelModel model_from_json(const Json& j) {
  try {
    const SetKind kind = set_kind_from_string(j.at("kind").get<std::string>());
    const auto probs = j.at("probs").get<std::vector<double>>();
    return make_model(kind, Eigen::Map<const Eigen::VectorXd>(probs.data(), static_cast<Index>(probs.size())));
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed channel model JSON: ") + e.what());
  }
}

Json to_json(const FitResult& r, const Json& target) {
  Json probs = Json::array();
  for (Index i = 0; i < r.model.probs.size(); ++i) probs.push_back(r.model.probs(i));
  return {{"target", target},
          {"set_kind", to_string(r.model.set.kind())},
          {"constraint", to_string(r.constraint)},
          {"probs", probs},
          {"objective", r.objective},
          {"constraint_satisfied", r.constraint_satisfied},
          {"max_violation", r.max_violation},
          {"status", to_string(r.status)}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string join(const CsvRow& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i].find_first_of(",\n\"") != std::string::npos)
      throw InvalidInput("CSV field needs quoting, which is unsupported: " + row[i]);
    if (i) out += ',';
    out += row[i];
  }
  return out;
}

CsvRow split(const std::string& line) {
  CsvRow out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << join(header) << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::logic_error("CSV row width differs from header in " + path.string());
    f << join(r) << '\n';
  }
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path, const CsvRow& expected_header) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line) || split(line) != expected_header)
    throw std::runtime_error("unexpected CSV header in " + path.string());
  std::vector<CsvRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    CsvRow r = split(line);
    if (r.size() != expected_header.size()) throw std::runtime_error("ragged CSV row in " + path.string());
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace qecapprox
