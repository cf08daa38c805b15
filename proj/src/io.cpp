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

#include "qpt/io.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qpt {

namespace {

constexpr const char* kConvention = "unnormalized-pauli-trace-one";

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

Json chi_to_json(const ProcessMatrix& chi) {
  Json re = Json::array(), im = Json::array();
  for (int m = 0; m < 16; ++m) {
    Json rr = Json::array(), ii = Json::array();
    for (int n = 0; n < 16; ++n) {
      rr.push_back(chi(m, n).real());
      ii.push_back(chi(m, n).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"basis_order", pauli_labels()}, {"convention", kConvention}, {"re", re}, {"im", im}};
}

ProcessMatrix chi_from_json(const Json& j) {
  const auto order = field<std::vector<std::string>>(j, "basis_order");
  const auto& labels = pauli_labels();
  if (order.size() != 16 || !std::equal(order.begin(), order.end(), labels.begin())) {
    throw FormatError("chi: basis_order must be II, IX, ..., ZZ");
  }
  if (j.contains("convention") && j.at("convention") != kConvention) {
    throw FormatError("chi: unsupported convention " + j.at("convention").dump());
  }
  const auto re = field<std::vector<std::vector<double>>>(j, "re");
  const auto im = field<std::vector<std::vector<double>>>(j, "im");
  if (re.size() != 16 || im.size() != 16) throw FormatError("chi: expected 16 rows");
  ComplexMatrix m(16, 16);
  for (int r = 0; r < 16; ++r) {
    if (re[r].size() != 16 || im[r].size() != 16) throw FormatError("chi: expected 16 columns");
    for (int c = 0; c < 16; ++c) m(r, c) = Complex(re[r][c], im[r][c]);
  }
  return ProcessMatrix(std::move(m));
}

Json noise_to_json(const NoiseModel& noise) {
  return {{"drift_hz_per_min", noise.drift_hz_per_min},
          {"fast_freq_sigma_hz", noise.fast_freq_sigma_hz},
          {"phase_diffusion_rad_per_sqrt_us", noise.phase_diffusion_rad_per_sqrt_us},
          {"phi_p_error_mrad", noise.phi_p_error_mrad},
          {"scaling_phase_error_mrad_ion2", noise.scaling_phase_error_mrad_ion2},
          {"pulse_area_fractional_error", noise.pulse_area_fractional_error}};
}

NoiseModel noise_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("noise: expected an object");
  // Absent keys are zero, so a file can name only the sources it switches on.
  NoiseModel n = NoiseModel::noiseless();
  auto opt = [&](const char* key, double& out) {
    if (j.contains(key)) out = field<double>(j, key);
  };
  opt("drift_hz_per_min", n.drift_hz_per_min);
  opt("fast_freq_sigma_hz", n.fast_freq_sigma_hz);
  opt("phase_diffusion_rad_per_sqrt_us", n.phase_diffusion_rad_per_sqrt_us);
  opt("phi_p_error_mrad", n.phi_p_error_mrad);
  opt("scaling_phase_error_mrad_ion2", n.scaling_phase_error_mrad_ion2);
  opt("pulse_area_fractional_error", n.pulse_area_fractional_error);
  try {
    n.validate();
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  return n;
}

Json timing_to_json(const TimingModel& t) {
  return {{"composite_block_us", t.composite_block_us},
          {"pulse_pi_us", t.pulse_pi_us},
          {"second_pulse_offset_us", t.second_pulse_offset_us},
          {"process_duration_us", t.process_duration_us},
          {"shot_overhead_ms", t.shot_overhead_ms}};
}

TimingModel timing_from_json(const Json& j) {
  TimingModel t;
  t.composite_block_us = field<double>(j, "composite_block_us");
  t.pulse_pi_us = field<double>(j, "pulse_pi_us");
  t.second_pulse_offset_us = field<double>(j, "second_pulse_offset_us");
  t.process_duration_us = field<double>(j, "process_duration_us");
  t.shot_overhead_ms = field<double>(j, "shot_overhead_ms");
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  return t;
}

Json plan_to_json(const ExperimentPlan& plan) {
  Json seqs = Json::array();
  for (const auto& s : plan.sequences) {
    seqs.push_back({{"k", s.index},
                    {"prep", {rotation_code(s.prep.ion1), rotation_code(s.prep.ion2)}},
                    {"meas", {rotation_code(s.meas.ion1), rotation_code(s.meas.ion2)}},
                    {"start_time_s", s.start_time_s}});
  }
  return {{"shots", plan.shots},
          {"order", plan.order == SequenceOrder::kPrepOuter ? "prep_outer" : "meas_outer"},
          {"timing", timing_to_json(plan.timing)},
          {"sequences", seqs}};
}

Json dataset_to_json(const ShotDataset& data) {
  Json records = Json::array();
  for (const auto& r : data.records) {
    Json rec = {{"k", r.k}, {"shots", r.shots}, {"n2", r.n2}};
    if (r.n1) rec["n1"] = *r.n1;
    if (r.n0) rec["n0"] = *r.n0;
    records.push_back(std::move(rec));
  }
  return {{"meta",
           {{"seed", data.seed},
            {"process_label", data.process.label()},
            {"noise", noise_to_json(data.noise)},
            {"plan", plan_to_json(data.plan)},
            {"shots", data.plan.shots}}},
          {"records", records}};
}

ShotDataset dataset_from_json(const Json& j) {
  const Json meta = field<Json>(j, "meta");
  const Json plan_j = field<Json>(meta, "plan");
  ShotDataset data;
  try {
    data.process = ProcessSpec::from_label(field<std::string>(meta, "process_label"));
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  data.seed = field<std::uint64_t>(meta, "seed");
  data.noise = noise_from_json(field<Json>(meta, "noise"));
  const std::string order = field<std::string>(plan_j, "order");
  if (order != "prep_outer" && order != "meas_outer") throw FormatError("plan: unknown order '" + order + "'");
  data.plan.order = order == "prep_outer" ? SequenceOrder::kPrepOuter : SequenceOrder::kMeasOuter;
  data.plan.shots = field<int>(plan_j, "shots");
  data.plan.timing = timing_from_json(field<Json>(plan_j, "timing"));
  for (const auto& s : field<Json>(plan_j, "sequences")) {
    SequenceSpec spec;
    spec.index = field<int>(s, "k");
    const auto prep = field<std::vector<std::string>>(s, "prep");
    const auto meas = field<std::vector<std::string>>(s, "meas");
    if (prep.size() != 2 || meas.size() != 2) throw FormatError("plan: settings need one rotation per ion");
    try {
      spec.prep = {rotation_from_code(prep[0]), rotation_from_code(prep[1])};
      spec.meas = {rotation_from_code(meas[0]), rotation_from_code(meas[1])};
    } catch (const ValidationError& e) {
      throw FormatError(e.what());
    }
    spec.start_time_s = field<double>(s, "start_time_s");
    if (spec.index != static_cast<int>(data.plan.sequences.size())) {
      throw FormatError("plan: sequences must be listed in index order");
    }
    data.plan.sequences.push_back(spec);
  }
  for (const auto& r : field<Json>(j, "records")) {
    ShotRecord rec;
    rec.k = field<int>(r, "k");
    rec.shots = field<int>(r, "shots");
    rec.n2 = field<int>(r, "n2");
    if (r.contains("n1")) rec.n1 = field<int>(r, "n1");
    if (r.contains("n0")) rec.n0 = field<int>(r, "n0");
    data.records.push_back(rec);
  }
  try {
    data.validate();
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  return data;
}

Json convergence_to_json(const ConvergenceRecord& record) {
  return {{"iterations", record.iterations},
          {"final_log_likelihood", record.final_log_likelihood},
          {"converged", record.converged}};
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string() + ": " + std::strerror(errno));
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw FormatError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw FormatError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

void write_json_atomic(const std::filesystem::path& path, const Json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string chi_component_csv(const ComplexMatrix& m, bool imaginary) {
  if (m.rows() != 16 || m.cols() != 16) throw ValidationError("chi_component_csv: expected a 16 x 16 matrix");
  const auto& labels = pauli_labels();
  std::ostringstream out;
  out << "row";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (int r = 0; r < 16; ++r) {
    out << labels[r];
    for (int c = 0; c < 16; ++c) out << ',' << format_double(imaginary ? m(r, c).imag() : m(r, c).real());
    out << '\n';
  }
  return out.str();
}

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<double> x, y;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double va = std::stod(a, &u1);
      const double vb = std::stod(b, &u2);
      x.push_back(va);
      y.push_back(vb);
    } catch (const std::exception&) {
      if (x.empty() && line_no == 1) continue;  // header
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return {std::move(x), std::move(y)};
}

std::string two_column_csv(const std::string& x_name, const std::string& y_name, const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("two_column_csv: column lengths differ");
  std::ostringstream out;
  out << x_name << ',' << y_name << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) out << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
  return out.str();
}

}  // namespace qpt
