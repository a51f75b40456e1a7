#include "loopsoup/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace loopsoup {

namespace {

const char* kind_name(EntryKind k) {
  switch (k) {
    case EntryKind::Statistical: return "statistical";
    case EntryKind::Exact: return "exact";
    case EntryKind::Gof: return "gof";
    case EntryKind::Discriminating: return "discriminating";
  }
  return "unknown";
}

nlohmann::json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

std::optional<double> ReportEntry::z() const {
  if (!exact) return std::nullopt;
  if (kind == EntryKind::Exact || kind == EntryKind::Gof) return std::nullopt;
  const double diff = estimate - *exact;
  if (std_error > 0.0) return diff / std_error;
  if (diff == 0.0) return 0.0;
  return diff > 0.0 ? HUGE_VAL : -HUGE_VAL;
}

void Report::add_statistical(std::string name, const RunningStats& s, double exact, std::uint64_t seed) {
  add_statistical(std::move(name), s.mean(), s.std_error(), exact, s.count(), seed);
}

void Report::add_statistical(std::string name, double estimate, double std_error, double exact,
                             std::uint64_t n, std::uint64_t seed) {
  ReportEntry e;
  e.name = std::move(name);
  e.kind = EntryKind::Statistical;
  e.estimate = estimate;
  e.std_error = std_error;
  e.exact = exact;
  e.n_samples = n;
  e.seed = seed;
  entries_.push_back(std::move(e));
}

void Report::add_exact(std::string name, double value, double exact) {
  ReportEntry e;
  e.name = std::move(name);
  e.kind = EntryKind::Exact;
  e.estimate = value;
  e.exact = exact;
  entries_.push_back(std::move(e));
}

void Report::add_gof(std::string name, const GofResult& r, std::uint64_t n, std::uint64_t seed) {
  ReportEntry e;
  e.name = std::move(name);
  e.kind = EntryKind::Gof;
  e.estimate = r.statistic;
  e.p_value = r.p_value;
  e.n_samples = n;
  e.seed = seed;
  entries_.push_back(std::move(e));
}

void Report::add_discriminating(std::string name, const RunningStats& s, double wrong_target,
                                std::uint64_t seed) {
  add_discriminating(std::move(name), s.mean(), s.std_error(), wrong_target, s.count(), seed);
}

void Report::add_discriminating(std::string name, double estimate, double std_error,
                                double wrong_target, std::uint64_t n, std::uint64_t seed) {
  ReportEntry e;
  e.name = std::move(name);
  e.kind = EntryKind::Discriminating;
  e.estimate = estimate;
  e.std_error = std_error;
  e.exact = wrong_target;
  e.n_samples = n;
  e.seed = seed;
  entries_.push_back(std::move(e));
}

void Report::add_check(std::string name, bool ok) { add_exact(std::move(name), ok ? 1.0 : 0.0, 1.0); }

void Report::append(const Report& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

bool Report::entry_passes(const ReportEntry& e) const {
  switch (e.kind) {
    case EntryKind::Statistical: {
      // a degenerate sample is judged like an exact value
      if (e.std_error == 0.0 && e.exact && std::isfinite(e.estimate)) {
        return std::abs(e.estimate - *e.exact) <= thresholds_.exact_tol * std::max(1.0, std::abs(*e.exact));
      }
      const auto z = e.z();
      return z && std::abs(*z) <= thresholds_.z_max;
    }
    case EntryKind::Discriminating: {
      const auto z = e.z();
      return z && std::abs(*z) > thresholds_.z_max;
    }
    case EntryKind::Exact:
      return e.exact && std::isfinite(e.estimate) &&
             std::abs(e.estimate - *e.exact) <= thresholds_.exact_tol * std::max(1.0, std::abs(*e.exact));
    case EntryKind::Gof:
      return e.p_value && *e.p_value > thresholds_.p_min;
  }
  return false;
}

bool Report::passed() const {
  for (const auto& e : entries_) {
    if (!entry_passes(e)) return false;
  }
  return true;
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (!entry_passes(e)) out.push_back(e.name);
  }
  return out;
}

std::string Report::payload_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["title"] = title_;
  j["thresholds"] = {{"z_max", thresholds_.z_max},
                     {"exact_tol", thresholds_.exact_tol},
                     {"p_min", thresholds_.p_min}};
  auto arr = nlohmann::json::array();
  for (const auto& e : entries_) {
    nlohmann::json je;
    je["name"] = e.name;
    je["kind"] = kind_name(e.kind);
    je["estimate"] = std::isfinite(e.estimate) ? nlohmann::json(e.estimate) : nlohmann::json(nullptr);
    je["std_error"] = e.std_error;
    je["exact"] = number_or_null(e.exact);
    je["z"] = number_or_null(e.z());
    je["p_value"] = number_or_null(e.p_value);
    je["n_samples"] = e.n_samples;
    je["seed"] = e.seed;
    je["pass"] = entry_passes(e);
    arr.push_back(std::move(je));
  }
  j["entries"] = std::move(arr);
  j["verdict"] = passed() ? "pass" : "fail";
  return j.dump(2);
}

std::string Report::to_json(const std::string& timestamp) const {
  nlohmann::json j;
  j["header"] = {{"format_version", 1}, {"generated_at", timestamp}};
  j["payload"] = nlohmann::json::parse(payload_json());
  return j.dump(2);
}

std::string Report::table() const {
  std::ostringstream os;
  if (!title_.empty()) os << "== " << title_ << " ==\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-4s %-52s %16s %12s %16s %10s\n", "ok", "check", "estimate",
                "std_err", "target", "z / p");
  os << buf;
  for (const auto& e : entries_) {
    const bool ok = entry_passes(e);
    std::string zp;
    if (e.kind == EntryKind::Gof) {
      std::snprintf(buf, sizeof buf, "p=%.3g", e.p_value.value_or(0.0));
      zp = buf;
    } else if (auto z = e.z()) {
      std::snprintf(buf, sizeof buf, "%.3g", *z);
      zp = buf;
    }
    std::snprintf(buf, sizeof buf, "%-4s %-52.52s %16.10g %12.4g %16.10g %10s\n", ok ? "PASS" : "FAIL",
                  e.name.c_str(), e.estimate, e.std_error, e.exact.value_or(std::nan("")), zp.c_str());
    os << buf;
  }
  os << "verdict: " << (passed() ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace loopsoup
