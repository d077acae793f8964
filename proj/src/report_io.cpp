#include "catlab/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace catlab {

std::string format_double(double x) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == x || (parsed != parsed && x != x)) return buf;
  }
  return buf;
}

namespace {

void sort_reports(std::vector<CheckReport>& reports) {
  std::sort(reports.begin(), reports.end(),
            [](const CheckReport& a, const CheckReport& b) {
              return a.fingerprint < b.fingerprint;
            });
}

}  // namespace

void write_reports_csv(std::ostream& os, std::vector<CheckReport> reports) {
  sort_reports(reports);
  os << "name,lhs,rhs,slack,passed,tol,fingerprint\n";
  for (const auto& r : reports) {
    os << r.name << ',' << format_double(r.lhs) << ',' << format_double(r.rhs)
       << ',' << format_double(r.slack) << ',' << (r.passed ? "true" : "false")
       << ',' << format_double(r.tol) << ',' << r.fingerprint << '\n';
  }
}

nlohmann::json report_to_json(const CheckReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["slack"] = report.slack;
  j["passed"] = report.passed;
  j["tol"] = report.tol;
  j["fingerprint"] = report.fingerprint;
  return j;
}

void write_reports_jsonl(std::ostream& os, std::vector<CheckReport> reports) {
  sort_reports(reports);
  for (const auto& r : reports) {
    os << report_to_json(r).dump() << '\n';
  }
}

void write_reports_file(const std::string& path,
                        std::vector<CheckReport> reports,
                        const std::string& format) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open output file: " + path);
  if (format == "csv") {
    write_reports_csv(os, std::move(reports));
  } else if (format == "json") {
    write_reports_jsonl(os, std::move(reports));
  } else {
    throw Error("unknown output format: " + format);
  }
}

SweepSummary summarize(const std::string& name, const SweepResult& sweep) {
  SweepSummary s;
  s.name = name;
  s.trials = static_cast<int>(sweep.reports.size());
  s.failures = sweep.failures();
  s.min_slack = sweep.min_slack;
  s.max_ratio = sweep.max_ratio;
  return s;
}

std::string summary_line(const SweepSummary& s) {
  std::ostringstream os;
  os << s.name << ": trials=" << s.trials << " failures=" << s.failures
     << " min_slack=" << format_double(s.min_slack);
  if (s.max_ratio > 0.0) os << " max_ratio=" << format_double(s.max_ratio);
  return os.str();
}

}  // namespace catlab
