#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "catlab/inequality_lab.hpp"

namespace catlab {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

// CSV with a fixed header; rows sorted by fingerprint so identical seeds
// produce byte-identical files.
void write_reports_csv(std::ostream& os, std::vector<CheckReport> reports);

// One JSON object per line, same ordering contract as the CSV writer.
void write_reports_jsonl(std::ostream& os, std::vector<CheckReport> reports);

void write_reports_file(const std::string& path,
                        std::vector<CheckReport> reports,
                        const std::string& format);

nlohmann::json report_to_json(const CheckReport& report);

struct SweepSummary {
  std::string name;
  int trials = 0;
  int failures = 0;
  double min_slack = 0.0;
  double max_ratio = 0.0;
};

SweepSummary summarize(const std::string& name, const SweepResult& sweep);

// Human-readable one-line summary for the CLI.
std::string summary_line(const SweepSummary& s);

}  // namespace catlab
