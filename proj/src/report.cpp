#include "catpose/report.hpp"

#include <cstdio>
#include <sstream>

#include "catpose/io.hpp"

namespace catpose {
namespace {

std::string column_title(const ThresholdSpec& spec) {
  if (spec.kind() == ThresholdSpec::Kind::kIou) return spec.label();
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g°%gcm", spec.max_deg(), spec.max_cm());
  return buf;
}

// Display width in code points.
std::size_t width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xc0) != 0x80 ? 1 : 0;
  return w;
}

std::string pad_left(const std::string& s, std::size_t w) {
  const std::size_t n = width(s);
  return n >= w ? s : std::string(w - n, ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t w) {
  const std::size_t n = width(s);
  return n >= w ? s : s + std::string(w - n, ' ');
}

std::string cell(const std::optional<double>& ap) {
  if (!ap) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *ap);
  return buf;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string format_report_table(const EvaluationReport& report) {
  std::vector<std::string> header{"category"};
  for (const ApResult& r : report.results) header.push_back(column_title(r.spec));
  std::vector<std::vector<std::string>> rows;
  const std::size_t num_categories = report.results.empty() ? 0 : report.results.front().categories.size();
  for (std::size_t c = 0; c < num_categories; ++c) {
    std::vector<std::string> row{report.results.front().categories[c].category};
    for (const ApResult& r : report.results) row.push_back(cell(r.categories[c].ap));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> mean{"mAP"};
  for (const ApResult& r : report.results) mean.push_back(cell(r.mean_ap));

  std::vector<std::size_t> widths(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    widths[i] = width(header[i]);
    for (const auto& row : rows) widths[i] = std::max(widths[i], width(row[i]));
    widths[i] = std::max(widths[i], width(mean[i]));
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    out << pad_right(row[0], widths[0]) << " |";
    for (std::size_t i = 1; i < row.size(); ++i) out << "  " << pad_left(row[i], widths[i]);
    out << '\n';
  };
  std::size_t total = widths[0] + 2;
  for (std::size_t i = 1; i < widths.size(); ++i) total += widths[i] + 2;
  const std::string rule(total, '-');
  emit(header);
  out << rule << '\n';
  for (const auto& row : rows) emit(row);
  out << rule << '\n';
  emit(mean);
  return out.str();
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json j;
  nlohmann::json specs = nlohmann::json::array();
  nlohmann::json categories = nlohmann::json::object();
  nlohmann::json mean = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json pr = nlohmann::json::object();
  for (const ApResult& r : report.results) {
    const std::string label = r.spec.label();
    specs.push_back(label);
    mean[label] = optional_json(r.mean_ap);
    nlohmann::json pr_spec = nlohmann::json::object();
    for (const CategoryAp& c : r.categories) {
      categories[c.category][label] = optional_json(c.ap);
      counts[c.category] = {{"ground_truth", c.num_ground_truth}, {"detections", c.num_detections}};
      pr_spec[c.category] = {{"recall", c.pr.recall}, {"precision", c.pr.precision}};
    }
    pr[label] = pr_spec;
  }
  j["specs"] = specs;
  j["ap"] = categories;
  j["mean_ap"] = mean;
  j["counts"] = counts;
  j["precision_recall"] = pr;
  return j;
}

std::string curves_to_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "category,threshold,ap\n";
  for (const CurvePoint& p : curve) {
    out << p.category << ',' << io::format_double(p.threshold) << ',';
    if (p.ap) out << io::format_double(*p.ap);
    out << '\n';
  }
  return out.str();
}

}  // namespace catpose
