#ifndef CFLOW_REPORT_HPP
#define CFLOW_REPORT_HPP

#include <map>
#include <optional>
#include <string>

namespace cflow {

/// Named scalar results. Only the metrics a routine computes are set.
struct MetricsReport {
  std::optional<double> dice_percent;
  std::optional<double> bd;
  std::optional<double> bdsd;
  std::optional<double> acs;
  std::optional<double> epe;
  std::optional<double> ade;
  std::map<std::string, double> aux;
};

}  // namespace cflow

#endif  // CFLOW_REPORT_HPP
