#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ccpdmp/estimation.hpp"
#include "ccpdmp/skeleton.hpp"

namespace ccpdmp {

/// 17 significant digits, so every double round-trips.
std::string format_real(double x);

/// Comma-separated rows with LF endings; throws on I/O failure.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(const std::string& s);
  void end_row();

 private:
  void sep();
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Header `t,theta_1..theta_p,v_1..v_p` over the recorded coordinates.
void write_skeleton_csv(const std::filesystem::path& file, const Skeleton& skeleton);
/// Header `theta_1..theta_p`, one row per discretized sample.
void write_samples_csv(const std::filesystem::path& file, const Skeleton& skeleton,
                       const MatrixXd& samples);

struct MetricsReport {
  SkeletonCounters counters;
  double efficiency = 0.0;
  double duration = 0.0;
  VectorXd mean;
  VectorXd variance;
  double ess_theta_1 = 0.0;
  std::vector<double> horizons;
  std::vector<std::string> warnings;
};

MetricsReport make_metrics(const Skeleton& skeleton, const MatrixXd& samples);
std::string metrics_json(const MetricsReport& report);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace ccpdmp
