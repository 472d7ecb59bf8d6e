// Copyright 2026 The Relightkit Authors. All Rights Reserved.
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

// Paired evaluation of predicted against ground-truth frames, grouped by
// task: binary (a light fully switched on or off), color (non-neutral
// target color) and intensity (everything else).

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "relightkit/keyvalue.hpp"
#include "relightkit/manifest.hpp"
#include "relightkit/metrics.hpp"
#include "relightkit/parallel.hpp"
#include "relightkit/png.hpp"

namespace relightkit {

enum class TaskGroup { kBinary, kIntensity, kColor };

inline constexpr std::array<TaskGroup, 3> kTaskGroups = {TaskGroup::kBinary, TaskGroup::kIntensity,
                                                         TaskGroup::kColor};

inline std::string task_group_name(TaskGroup g) {
  switch (g) {
    case TaskGroup::kBinary:
      return "binary";
    case TaskGroup::kIntensity:
      return "intensity";
    case TaskGroup::kColor:
      return "color";
  }
  return "unknown";
}

// A binary record wins over color, which wins over intensity.
inline TaskGroup classify(const SampleRecord& r) {
  if (std::abs(r.delta_gamma) == 1.0 || std::abs(r.delta_alpha) == 1.0) return TaskGroup::kBinary;
  if (!is_neutral(r.color)) return TaskGroup::kColor;
  return TaskGroup::kIntensity;
}

struct ImageMetric {
  std::string id;
  TaskGroup group = TaskGroup::kIntensity;
  double psnr_db = 0.0;  // +inf for identical images
  double ssim = 0.0;
};

struct GroupSummary {
  std::size_t count = 0;
  std::size_t psnr_infinite = 0;  // excluded from psnr_db
  double psnr_db = 0.0;           // NaN when no finite value
  double ssim = 0.0;              // NaN when count == 0
};

struct MetricReport {
  std::map<TaskGroup, GroupSummary> groups;
  GroupSummary overall;
  std::vector<ImageMetric> images;  // sorted by id
};

inline GroupSummary summarize(const std::vector<const ImageMetric*>& rows) {
  GroupSummary s;
  s.count = rows.size();
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  for (const auto* r : rows) {
    if (std::isinf(r->psnr_db)) {
      ++s.psnr_infinite;
    } else {
      psnr_sum += r->psnr_db;
    }
    ssim_sum += r->ssim;
  }
  const std::size_t finite = s.count - s.psnr_infinite;
  s.psnr_db = finite ? psnr_sum / static_cast<double>(finite) : std::nan("");
  s.ssim = s.count ? ssim_sum / static_cast<double>(s.count) : std::nan("");
  return s;
}

// Sorting first makes the sums independent of input order.
inline MetricReport aggregate(std::vector<ImageMetric> images) {
  std::sort(images.begin(), images.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  MetricReport rep;
  std::vector<const ImageMetric*> all;
  for (const auto& m : images) all.push_back(&m);
  for (TaskGroup g : kTaskGroups) {
    std::vector<const ImageMetric*> rows;
    for (const auto* m : all) {
      if (m->group == g) rows.push_back(m);
    }
    rep.groups[g] = summarize(rows);
  }
  rep.overall = summarize(all);
  rep.images = std::move(images);
  return rep;
}

struct EvalItem {
  SampleRecord record;
  SdrImage prediction;
  SdrImage ground_truth;
};

inline MetricReport evaluate_records(const std::vector<EvalItem>& items) {
  std::vector<ImageMetric> rows(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    const auto& it = items[i];
    rows[i] = {it.record.id, classify(it.record), psnr(it.prediction, it.ground_truth),
               ssim(it.prediction, it.ground_truth)};
  });
  return aggregate(std::move(rows));
}

inline std::filesystem::path resolve_relative(const std::filesystem::path& manifest, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : manifest.parent_path() / path;
}

// Aligns the two manifests by record id and compares each record's target
// frame. Image paths are relative to their manifest's directory.
inline MetricReport evaluate_paired(const std::filesystem::path& pred_manifest,
                                    const std::filesystem::path& gt_manifest) {
  const auto pred = read_manifest(pred_manifest);
  const auto gt = read_manifest(gt_manifest);
  std::map<std::string, const SampleRecord*> pred_by_id;
  for (const auto& r : pred) {
    if (!pred_by_id.emplace(r.id, &r).second) {
      throw Error(ErrorCode::kReconciliation, "duplicate id '" + r.id + "' in " + pred_manifest.string());
    }
  }
  std::map<std::string, const SampleRecord*> gt_by_id;
  for (const auto& r : gt) {
    if (!gt_by_id.emplace(r.id, &r).second) {
      throw Error(ErrorCode::kReconciliation, "duplicate id '" + r.id + "' in " + gt_manifest.string());
    }
  }
  std::vector<std::string> orphans;
  for (const auto& [id, _] : pred_by_id) {
    if (!gt_by_id.count(id)) orphans.push_back("prediction-only: " + id);
  }
  for (const auto& [id, _] : gt_by_id) {
    if (!pred_by_id.count(id)) orphans.push_back("ground-truth-only: " + id);
  }
  if (!orphans.empty()) {
    std::string msg = "manifests do not align (" + std::to_string(orphans.size()) + " orphans):";
    for (const auto& o : orphans) msg += "\n  " + o;
    throw Error(ErrorCode::kReconciliation, msg);
  }

  std::vector<std::pair<const SampleRecord*, const SampleRecord*>> jobs;
  for (const auto& [id, g] : gt_by_id) jobs.emplace_back(pred_by_id.at(id), g);
  std::vector<ImageMetric> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& [p, g] = jobs[i];
    const SdrImage a = read_png(resolve_relative(pred_manifest, p->target_path));
    const SdrImage b = read_png(resolve_relative(gt_manifest, g->target_path));
    try {
      rows[i] = {g->id, classify(*g), psnr(a, b), ssim(a, b)};
    } catch (const Error& e) {
      throw e.with_context("record '" + g->id + "'");
    }
  });
  return aggregate(std::move(rows));
}

inline std::string format_metric(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

// key=value blocks, one per group, then the overall block.
inline std::string report_text(const MetricReport& rep) {
  std::ostringstream out;
  auto block = [&](const std::string& name, const GroupSummary& s) {
    out << "[" << name << "]\n";
    out << "count=" << s.count << "\n";
    out << "psnr_db=" << format_metric(s.psnr_db) << "\n";
    out << "psnr_infinite=" << s.psnr_infinite << "\n";
    out << "ssim=" << format_metric(s.ssim) << "\n\n";
  };
  for (TaskGroup g : kTaskGroups) block(task_group_name(g), rep.groups.at(g));
  block("all", rep.overall);
  return out.str();
}

inline std::string report_csv(const MetricReport& rep) {
  std::ostringstream out;
  out << "id,group,psnr_db,ssim\n";
  for (const auto& m : rep.images) {
    out << m.id << "," << task_group_name(m.group) << "," << format_metric(m.psnr_db) << ","
        << format_metric(m.ssim) << "\n";
  }
  return out.str();
}

inline void write_report(const MetricReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  detail::write_file_bytes(dir / "report.txt", report_text(rep));
  detail::write_file_bytes(dir / "per_image.csv", report_csv(rep));
}

}  // namespace relightkit
