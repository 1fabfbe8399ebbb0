#include "eekd/report.hpp"

#include "eekd/tensor.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

namespace eekd {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void Report::add(const std::string& variant, std::uint64_t seed, const std::string& metric,
                 double value, bool deterministic) {
  for (const auto& r : rows_)
    if (r.variant == variant && r.seed == seed && r.metric == metric)
      throw InvariantError("report: duplicate row " + variant + "/" + std::to_string(seed) + "/" +
                           metric);
  if (!std::isfinite(value)) throw NumericError("report: non-finite value for " + metric);
  rows_.push_back({variant, seed, metric, value, deterministic});
}

std::vector<ReportRow> Report::rows() const {
  std::vector<ReportRow> sorted = rows_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.variant != b.variant) return a.variant < b.variant;
    return a.seed < b.seed;
  });
  return sorted;
}

std::vector<std::string> Report::variants() const {
  std::vector<std::string> out;
  for (const auto& r : rows()) {
    if (out.empty() || out.back() != r.variant) out.push_back(r.variant);
  }
  return out;
}

std::vector<Aggregate> Report::aggregates() const {
  std::vector<Aggregate> out;
  const auto sorted = rows();
  for (const auto& variant : variants()) {
    std::vector<std::string> metrics;
    std::map<std::string, std::vector<double>> values;
    std::map<std::string, bool> deterministic;
    for (const auto& r : sorted) {
      if (r.variant != variant) continue;
      if (!values.contains(r.metric)) metrics.push_back(r.metric);
      values[r.metric].push_back(r.value);
      deterministic[r.metric] = r.deterministic;
    }
    for (const auto& m : metrics) {
      const auto& v = values[m];
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      if (v.size() > 1) {
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
      }
      out.push_back({variant, m, mean, std::sqrt(var), deterministic[m]});
    }
  }
  return out;
}

std::string Report::to_csv() const {
  std::string out = "experiment,variant,seed,metric,value,deterministic\r\n";
  auto line = [&](const std::string& variant, const std::string& seed, const std::string& metric,
                  double value, bool det) {
    out += csv_field(experiment_) + ',' + csv_field(variant) + ',' + seed + ',' + csv_field(metric) +
           ',' + format_number(value) + ',' + (det ? "1" : "0") + "\r\n";
  };
  for (const auto& r : rows()) line(r.variant, std::to_string(r.seed), r.metric, r.value, r.deterministic);
  for (const auto& a : aggregates()) {
    line(a.variant, "mean", a.metric, a.mean, a.deterministic);
    line(a.variant, "std", a.metric, a.std, a.deterministic);
  }
  return out;
}

std::string Report::to_json() const {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["experiment"] = experiment_;
  ordered_json nondet = ordered_json::array();
  ordered_json variants_json = ordered_json::array();
  const auto sorted = rows();
  const auto aggs = aggregates();
  for (const auto& variant : variants()) {
    ordered_json v;
    v["variant"] = variant;
    ordered_json seeds = ordered_json::array();
    for (const auto& r : sorted) {
      if (r.variant != variant) continue;
      if (seeds.empty() || seeds.back()["seed"].get<std::uint64_t>() != r.seed)
        seeds.push_back({{"seed", r.seed}, {"metrics", ordered_json::object()}});
      seeds.back()["metrics"][r.metric] = r.value;
      if (!r.deterministic && std::find(nondet.begin(), nondet.end(), r.metric) == nondet.end())
        nondet.push_back(r.metric);
    }
    v["seeds"] = std::move(seeds);
    ordered_json agg = ordered_json::object();
    for (const auto& a : aggs)
      if (a.variant == variant) agg[a.metric] = {{"mean", a.mean}, {"std", a.std}};
    v["aggregate"] = std::move(agg);
    variants_json.push_back(std::move(v));
  }
  doc["nondeterministic_metrics"] = std::move(nondet);
  doc["variants"] = std::move(variants_json);
  return doc.dump(2) + "\n";
}

void Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto dump = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
  };
  dump(dir / "report.csv", to_csv());
  dump(dir / "report.json", to_json());
}

}  // namespace eekd
