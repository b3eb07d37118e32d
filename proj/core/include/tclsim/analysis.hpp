/*
 * Copyright 2026 The tclsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tclsim/analytics.hpp"

namespace tclsim::analysis {

struct AnalyzeOptions {
  int cluster_k = 5;
  analytics::ShapeDistance distance = analytics::ShapeDistance::euclidean_znorm;
  analytics::LoadShape::Basis shape_basis = analytics::LoadShape::Basis::mean;
  std::uint64_t seed = 0;
  double duty_on_threshold_w = 10.0;
  analytics::EpiContents epi_contents;
  analytics::OutlierRule duration_outlier_rule = analytics::OutlierRule::iqr(3.0);
  int start_day_of_week = 0;  // 0 = Monday; used for the weekend split

  bool thermal_sections = true;  // shapes, clustering, duty, dead-band, EPI
  bool network_sections = true;  // probe-based fits and KS comparisons
};

struct AnalyzeReport {
  std::vector<std::string> files_written;
  std::vector<std::string> notices;  // skipped sections etc.
  int devices_seen = 0;
  int clusters = 0;
};

/// Runs the full statistics pipeline over a directory of trace CSVs
/// (temps.csv / power.csv / door.csv / probes.csv, any subset) and writes
/// plot-ready long-format CSVs plus report.txt into out_dir. Sections whose
/// inputs are missing are skipped with a notice; a directory with no usable
/// inputs at all raises ValidationError.
AnalyzeReport run_analysis(const std::filesystem::path& traces_dir,
                           const std::filesystem::path& out_dir,
                           const AnalyzeOptions& options);

}  // namespace tclsim::analysis
