#ifndef CFLOW_SEGMETRICS_HPP
#define CFLOW_SEGMETRICS_HPP

#include <cmath>
#include <cstddef>

#include "cflow/distance.hpp"
#include "cflow/fields.hpp"
#include "cflow/report.hpp"

namespace cflow {

/// Overlap in percent; two empty masks score 100.
inline double dice_score(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred.shape(), gt.shape(), "dice_score");
  std::size_t inter = 0, np = 0, ng = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    inter += pred[i] & gt[i];
    np += pred[i];
    ng += gt[i];
  }
  if (np + ng == 0) return 100.0;
  return 200.0 * static_cast<double>(inter) / static_cast<double>(np + ng);
}

struct BoundaryDistance {
  double bd = 0.0;
  double bdsd = 0.0;
  std::size_t pred_boundary = 0;
  std::size_t gt_boundary = 0;
};

/// Mean and population standard deviation of the distances from each
/// predicted-boundary pixel to the nearest ground-truth boundary pixel.
/// One-directional: pred -> gt.
inline BoundaryDistance boundary_distance(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred.shape(), gt.shape(), "boundary_distance");
  const BinaryMask pred_edge = boundary_pixels(pred);
  const BinaryMask gt_edge = boundary_pixels(gt);
  const std::size_t np = count_ones(pred_edge);
  const std::size_t ng = count_ones(gt_edge);
  if (np == 0) throw Error(ErrorKind::EmptySet, "boundary_distance: prediction has no boundary");
  if (ng == 0) throw Error(ErrorKind::EmptySet, "boundary_distance: ground truth has no boundary");

  const ScalarField dist = distance_to(gt_edge);
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (pred_edge[i]) total += dist[i];
  const double mean = total / static_cast<double>(np);
  double var = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!pred_edge[i]) continue;
    const double d = dist[i] - mean;
    var += d * d;
  }
  return {mean, std::sqrt(var / static_cast<double>(np)), np, ng};
}

/// Dice, BD and BDSD in one report.
inline MetricsReport segmentation_metrics(const BinaryMask& pred, const BinaryMask& gt) {
  MetricsReport report;
  report.dice_percent = dice_score(pred, gt);
  const BoundaryDistance b = boundary_distance(pred, gt);
  report.bd = b.bd;
  report.bdsd = b.bdsd;
  report.aux["pred_pixels"] = static_cast<double>(count_ones(pred));
  report.aux["gt_pixels"] = static_cast<double>(count_ones(gt));
  report.aux["pred_boundary_pixels"] = static_cast<double>(b.pred_boundary);
  report.aux["gt_boundary_pixels"] = static_cast<double>(b.gt_boundary);
  return report;
}

}  // namespace cflow

#endif  // CFLOW_SEGMETRICS_HPP
