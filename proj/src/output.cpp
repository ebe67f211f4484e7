#include "ccpdmp/output.hpp"

#include <cstdio>

#include "ccpdmp/errors.hpp"
#include "ccpdmp/tuning.hpp"
#include "json.hpp"

namespace ccpdmp {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header)
    : path_(file), out_(file, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + file.string());
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (filled_ > 0) out_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::cell(double x) {
  sep();
  out_ << format_real(x);
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row width mismatch in " + path_.string());
  out_ << '\n';
  filled_ = 0;
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

namespace {

std::vector<std::string> coordinate_names(const Skeleton& sk, const char* prefix) {
  std::vector<std::string> out;
  for (Index j : sk.recorded()) out.push_back(prefix + std::to_string(j + 1));
  return out;
}

}  // namespace

void write_skeleton_csv(const std::filesystem::path& file, const Skeleton& sk) {
  std::vector<std::string> header{"t"};
  for (auto& s : coordinate_names(sk, "theta_")) header.push_back(s);
  for (auto& s : coordinate_names(sk, "v_")) header.push_back(s);
  CsvWriter csv(file, header);
  for (std::size_t i = 0; i < sk.size(); ++i) {
    csv.cell(sk.time(i));
    for (Index j = 0; j < sk.width(); ++j) csv.cell(sk.position(i)(j));
    for (Index j = 0; j < sk.width(); ++j) csv.cell(sk.velocity(i)(j));
    csv.end_row();
  }
}

void write_samples_csv(const std::filesystem::path& file, const Skeleton& sk,
                       const MatrixXd& samples) {
  CsvWriter csv(file, coordinate_names(sk, "theta_"));
  for (Index r = 0; r < samples.rows(); ++r) {
    for (Index j = 0; j < samples.cols(); ++j) csv.cell(samples(r, j));
    csv.end_row();
  }
}

MetricsReport make_metrics(const Skeleton& sk, const MatrixXd& samples) {
  MetricsReport r;
  r.counters = sk.counters;
  r.efficiency = efficiency({sk.counters.events, sk.counters.shadow_events});
  r.duration = sk.duration();
  r.mean = samples.colwise().mean().transpose();
  const Index n = samples.rows();
  r.variance = n > 1 ? VectorXd(((samples.rowwise() - r.mean.transpose()).array().square())
                                    .colwise()
                                    .sum()
                                    .transpose() /
                                static_cast<double>(n - 1))
                     : VectorXd::Zero(samples.cols());
  if (n >= 10) {
    try {
      r.ess_theta_1 = ess(VectorXd(samples.col(0)));
    } catch (const DegenerateSeriesError&) {
      r.ess_theta_1 = 0.0;
    }
  }
  r.horizons = sk.horizons_used;
  r.warnings = sk.warnings;
  return r;
}

std::string metrics_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["events"] = r.counters.events;
  j["shadow_events"] = r.counters.shadow_events;
  j["efficiency"] = r.efficiency;
  j["rate_evaluations"] = r.counters.rate_evaluations;
  j["refreshes"] = r.counters.refreshes;
  j["boundary_hits"] = r.counters.boundary_hits;
  j["resimulations"] = r.counters.resimulations;
  j["degenerate_reflections"] = r.counters.degenerate_reflections;
  j["duration"] = r.duration;
  j["mean"] = std::vector<double>(r.mean.data(), r.mean.data() + r.mean.size());
  j["variance"] = std::vector<double>(r.variance.data(), r.variance.data() + r.variance.size());
  j["ess_theta_1"] = r.ess_theta_1;
  j["final_tau_max"] = r.horizons.empty() ? 0.0 : r.horizons.back();
  j["tau_max_updates"] = r.horizons.empty() ? 0 : r.horizons.size() - 1;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace ccpdmp
