#include "squarecut/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "squarecut/error.hpp"

namespace squarecut {

OverlapReport dsc(const BinaryMask& a, const BinaryMask& r) {
  if (a.width() != r.width() || a.height() != r.height()) {
    throw Error(Errc::dimension_mismatch, "mask sizes differ: " + std::to_string(a.width()) + "x" +
                                              std::to_string(a.height()) + " vs " + std::to_string(r.width()) +
                                              "x" + std::to_string(r.height()));
  }
  if (!(a.spacing() == r.spacing())) throw Error(Errc::dimension_mismatch, "mask spacings differ");

  OverlapReport out;
  const auto bits_a = a.bits();
  const auto bits_r = r.bits();
  for (std::size_t i = 0; i < bits_a.size(); ++i) {
    out.voxels_a += bits_a[i];
    out.voxels_r += bits_r[i];
    out.voxels_intersection += bits_a[i] & bits_r[i];
  }
  const double voxel = a.spacing().voxel_volume();
  out.volume_a = static_cast<double>(out.voxels_a) * voxel;
  out.volume_r = static_cast<double>(out.voxels_r) * voxel;
  const std::size_t denom = out.voxels_a + out.voxels_r;
  out.dsc = denom == 0 ? 1.0 : 2.0 * static_cast<double>(out.voxels_intersection) / static_cast<double>(denom);
  return out;
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "cannot summarize an empty list");
  SummaryStats s;
  s.count = values.size();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  // Rounding can push the mean a hair outside [min, max] for constant input.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

std::string overlap_csv_header() {
  return "No.,Volume manual (mm3),Volume automatic (mm3),Voxels manual,Voxels automatic,DSC (%)";
}

std::string overlap_csv_row(const std::string& label, const OverlapReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.3f,%.3f,%zu,%zu,%.2f", label.c_str(), report.volume_r, report.volume_a,
                report.voxels_r, report.voxels_a, 100.0 * report.dsc);
  return buf;
}

}  // namespace squarecut
