#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loopsoup/stats.hpp"

namespace loopsoup {

enum class EntryKind {
  Statistical,     // |z| <= z_max
  Exact,           // |estimate - exact| <= exact_tol * max(1, |exact|)
  Gof,             // p_value > p_min
  Discriminating,  // |z| > z_max: a deliberately wrong target must be rejected
};

struct ReportEntry {
  std::string name;
  EntryKind kind = EntryKind::Statistical;
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> exact;
  std::optional<double> p_value;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;

  // (estimate - exact) / std_error; infinite when the error is zero and the
  // values differ.
  std::optional<double> z() const;
};

struct Thresholds {
  double z_max = 4.0;
  double exact_tol = 1e-10;
  double p_min = 1e-3;
};

class Report {
 public:
  explicit Report(std::string title = {}, Thresholds t = {}) : title_(std::move(title)), thresholds_(t) {}

  void add_statistical(std::string name, const RunningStats& s, double exact, std::uint64_t seed);
  void add_statistical(std::string name, double estimate, double std_error, double exact,
                       std::uint64_t n, std::uint64_t seed);
  void add_exact(std::string name, double value, double exact);
  void add_gof(std::string name, const GofResult& r, std::uint64_t n, std::uint64_t seed);
  void add_discriminating(std::string name, const RunningStats& s, double wrong_target,
                          std::uint64_t seed);
  void add_discriminating(std::string name, double estimate, double std_error, double wrong_target,
                          std::uint64_t n, std::uint64_t seed);
  // Records an exact check that must hold (value 1 vs exact 1).
  void add_check(std::string name, bool ok);

  void append(const Report& other);

  const std::string& title() const { return title_; }
  const Thresholds& thresholds() const { return thresholds_; }
  void set_thresholds(Thresholds t) { thresholds_ = t; }
  const std::vector<ReportEntry>& entries() const { return entries_; }

  bool entry_passes(const ReportEntry& e) const;
  bool passed() const;
  // Names of failing entries.
  std::vector<std::string> failures() const;

  // Deterministic JSON payload (no timestamp).
  std::string payload_json() const;
  // {"header": {...timestamp...}, "payload": {...}}.
  std::string to_json(const std::string& timestamp) const;
  // Human-readable table.
  std::string table() const;

 private:
  std::string title_;
  Thresholds thresholds_;
  std::vector<ReportEntry> entries_;
};

}  // namespace loopsoup
