#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "gibbstv/estimators.hpp"
#include "gibbstv/models.hpp"

namespace gibbstv {

inline constexpr const char* kVersion = "0.1.0";

struct Instance {
  SpinSystem model;
  std::vector<std::string> labels;  // dense index -> file label
};

// Throws InvalidInput with the offending field named.
Instance parse_instance(std::istream& in);
Instance parse_instance_text(const std::string& text);
Instance parse_instance_file(const std::string& path);

// Canonical document: fixed key order, edges sorted by dense index.
std::string emit_instance(const Instance& inst);

std::vector<std::string> default_labels(std::size_t n);

// FNV-1a over the canonical text.
std::uint64_t instance_hash(const Instance& inst);

// Resolves a file label (or a decimal index when no label matches).
Vertex resolve_vertex(const Instance& inst, const std::string& label);

struct RunRecord {
  EstimateReport report;
  std::uint64_t mu_hash = 0;
  std::uint64_t nu_hash = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::string mode;
  std::string command;
  bool include_timing = false;
};

std::string run_record_json(const RunRecord& rec, const EstimatorBudget& budget);

// Elapsed time is printed only when timing is set, so reports stay reproducible.
std::string report_text(const EstimateReport& rep, bool timing = false);

}  // namespace gibbstv
