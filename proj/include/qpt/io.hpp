// Copyright 2026 The msqpt Authors
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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qpt/ionsim.hpp"
#include "qpt/process.hpp"
#include "qpt/recon.hpp"

namespace qpt {

/// Malformed or unreadable input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Json chi_to_json(const ProcessMatrix& chi);
ProcessMatrix chi_from_json(const Json& j);

Json noise_to_json(const NoiseModel& noise);
NoiseModel noise_from_json(const Json& j);

Json timing_to_json(const TimingModel& timing);
TimingModel timing_from_json(const Json& j);

Json plan_to_json(const ExperimentPlan& plan);

/// {meta: {seed, process_label, noise, timing, shots, order}, records: [{k, shots, n2, n1, n0}]}
Json dataset_to_json(const ShotDataset& data);
ShotDataset dataset_from_json(const Json& j);

/// {iterations, final_log_likelihood, converged}
Json convergence_to_json(const ConvergenceRecord& record);

/// Writes through a temporary file in the same directory and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// 16 x 16 real table with II..ZZ row and column labels.
std::string chi_component_csv(const ComplexMatrix& m, bool imaginary);

/// Two numeric columns; a non-numeric first line is taken as a header.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::filesystem::path& path);
std::string two_column_csv(const std::string& x_name, const std::string& y_name, const std::vector<double>& x,
                           const std::vector<double>& y);

}  // namespace qpt
