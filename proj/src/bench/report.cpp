#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "odoh/bench.hpp"

namespace odoh::bench {

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "doh") return Mode::Doh;
  if (name == "pdoh") return Mode::Pdoh;
  if (name == "odoh") return Mode::Odoh;
  if (name == "cleartext-odoh") return Mode::CleartextOdoh;
  if (name == "odoh-coloc") return Mode::OdohColoc;
  return std::nullopt;
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Doh:
      return "doh";
    case Mode::Pdoh:
      return "pdoh";
    case Mode::Odoh:
      return "odoh";
    case Mode::CleartextOdoh:
      return "cleartext-odoh";
    case Mode::OdohColoc:
      return "odoh-coloc";
  }
  return "unknown";
}

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "percentile of no samples");
  if (p <= 0 || p > 100) throw Error(ErrorCode::InvalidArgument, "percentile must be in (0, 100]");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return samples[rank - 1];
}

double mean(const std::vector<double>& samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "mean of no samples");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

std::vector<CdfPoint> cdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out;
  out.reserve(samples.size());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out.push_back({samples[i], static_cast<double>(i + 1) / n});
  return out;
}

BenchReport summarize(const std::vector<LatencySample>& samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "no samples to report");
  std::map<Mode, std::vector<const LatencySample*>> by_mode;
  for (const auto& s : samples) by_mode[s.mode].push_back(&s);

  BenchReport report;
  std::vector<double> all_ok;
  for (const auto& [mode, rows] : by_mode) {
    ModeSummary m;
    m.mode = mode;
    m.count = rows.size();
    std::vector<double> ok;
    for (const auto* s : rows) {
      if (s->http_status == 200) {
        ok.push_back(s->total_ms);
      } else {
        ++m.failures;
      }
    }
    if (ok.empty()) {
      m.mean_ms = m.p50_ms = m.p90_ms = m.p95_ms = m.p99_ms = std::nan("");
    } else {
      m.mean_ms = mean(ok);
      m.p50_ms = percentile(ok, 50);
      m.p90_ms = percentile(ok, 90);
      m.p95_ms = percentile(ok, 95);
      m.p99_ms = percentile(ok, 99);
    }
    all_ok.insert(all_ok.end(), ok.begin(), ok.end());
    report.modes.push_back(m);
  }
  report.cdf = cdf(std::move(all_ok));
  return report;
}

void write_csv(std::ostream& out, const std::vector<LatencySample>& samples) {
  out << kCsvHeader << "\n";
  out << std::fixed;
  for (const auto& s : samples) {
    out << s.timestamp_ms << ',' << mode_name(s.mode) << ',' << s.domain << ',' << std::setprecision(3)
        << s.total_ms << ',' << std::setprecision(1) << s.seal_us << ',' << s.open_us << ',' << s.http_status
        << "\n";
  }
}

void write_cdf(std::ostream& out, const std::vector<CdfPoint>& points) {
  out << "total_ms,cum_fraction\n" << std::fixed;
  for (const auto& p : points) out << std::setprecision(3) << p.total_ms << ',' << std::setprecision(6) << p.cum_fraction << "\n";
}

std::string format_summary(const BenchReport& report) {
  std::ostringstream out;
  auto cell = [&out](double v) {
    if (std::isnan(v)) {
      out << std::setw(10) << "-";
    } else {
      out << std::setw(10) << std::fixed << std::setprecision(2) << v;
    }
  };
  out << std::left << std::setw(16) << "mode" << std::right << std::setw(8) << "count" << std::setw(8) << "fail"
      << std::setw(10) << "mean_ms" << std::setw(10) << "p50_ms" << std::setw(10) << "p90_ms" << std::setw(10)
      << "p95_ms" << std::setw(10) << "p99_ms" << "\n";
  for (const auto& m : report.modes) {
    out << std::left << std::setw(16) << mode_name(m.mode) << std::right << std::setw(8) << m.count << std::setw(8)
        << m.failures;
    cell(m.mean_ms);
    cell(m.p50_ms);
    cell(m.p90_ms);
    cell(m.p95_ms);
    cell(m.p99_ms);
    out << "\n";
  }
  return out.str();
}

BenchReport emit_report(const std::vector<LatencySample>& samples, const std::string& out_dir) {
  auto report = summarize(samples);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ofstream csv(dir / "samples.csv");
  write_csv(csv, samples);
  std::ofstream summary(dir / "summary.txt");
  summary << format_summary(report);
  std::ofstream cdf_file(dir / "cdf.csv");
  write_cdf(cdf_file, report.cdf);
  if (!csv || !summary || !cdf_file) throw Error(ErrorCode::InvalidArgument, "cannot write report to " + out_dir);
  return report;
}

std::vector<std::string> load_domains(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open domains file " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string name;
    if (fields >> name) out.push_back(name);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigInvalid, "domains file " + path + " is empty");
  return out;
}

}  // namespace odoh::bench
