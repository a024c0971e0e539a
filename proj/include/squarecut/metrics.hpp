#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include "squarecut/imaging.hpp"

namespace squarecut {

/// Overlap of an automatic mask A with a reference mask R.
struct OverlapReport {
  double dsc = 0.0;
  double volume_a = 0.0;  // mm^3
  double volume_r = 0.0;  // mm^3
  std::size_t voxels_a = 0;
  std::size_t voxels_r = 0;
  std::size_t voxels_intersection = 0;
};

/// Dice similarity 2|A n R| / (|A| + |R|). Two empty masks score 1. Volumes
/// are voxel counts times the voxel size. Throws Errc::dimension_mismatch when
/// sizes or spacings differ.
OverlapReport dsc(const BinaryMask& a, const BinaryMask& r);

struct SummaryStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

/// Throws Errc::empty_input on an empty list.
SummaryStats summarize(std::span<const double> values);

/// Header matching the evaluation table: No., manual/automatic volume (mm3),
/// manual/automatic voxel count, DSC (%).
std::string overlap_csv_header();
std::string overlap_csv_row(const std::string& label, const OverlapReport& report);

}  // namespace squarecut
