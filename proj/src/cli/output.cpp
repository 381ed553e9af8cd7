#include <charconv>
#include <cmath>
#include <json.hpp>

#include "tcap/cli.hpp"

namespace tcap::cli {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string optional_field(std::optional<double> v) { return v ? format_double(*v) : ""; }

Json row_json(const ResultRow& r) {
  Json j;
  j["scheme"] = std::string(to_string(r.scheme));
  j["M"] = r.params.M;
  j["N"] = r.params.N;
  j["K"] = r.params.K;
  j["alpha"] = r.params.alpha;
  j["beta"] = r.params.beta;
  j["epsilon"] = r.params.epsilon;
  j["D"] = r.params.distance;
  j["rho"] = r.params.rho;
  j["eta"] = r.params.eta;
  j["lambda_eps"] = number_or_null(r.lambda_eps);
  j["ase"] = number_or_null(r.ase);
  j["method"] = r.method;
  j["ci_low"] = number_or_null(r.ci ? std::optional(r.ci->low) : std::nullopt);
  j["ci_high"] = number_or_null(r.ci ? std::optional(r.ci->high) : std::nullopt);
  j["trials"] = r.trials;
  j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
  j["noise_limited"] = r.noise_limited;
  if (r.outage) j["outage"] = *r.outage;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& os, const ResultSet& results) {
  os << kCsvHeader << "\n";
  for (const auto& r : results.rows) {
    const NetworkParams& p = r.params;
    os << to_string(r.scheme) << ',' << p.M << ',' << p.N << ',' << p.K << ','
       << format_double(p.alpha) << ',' << format_double(p.beta) << ','
       << format_double(p.epsilon) << ',' << format_double(p.distance) << ','
       << format_double(p.rho) << ',' << format_double(p.eta) << ','
       << optional_field(r.lambda_eps) << ',' << optional_field(r.ase) << ',' << r.method << ','
       << (r.ci ? format_double(r.ci->low) : "") << ','
       << (r.ci ? format_double(r.ci->high) : "") << ',' << r.trials << ','
       << (r.seed ? std::to_string(*r.seed) : "") << "\n";
  }
}

void write_json(std::ostream& os, const ResultSet& results) {
  Json doc;
  doc["command"] = results.command;
  doc["columns"] = Json::array();
  {
    std::string_view header = kCsvHeader;
    std::size_t start = 0;
    while (start <= header.size()) {
      const auto comma = header.find(',', start);
      const auto end = comma == std::string_view::npos ? header.size() : comma;
      doc["columns"].push_back(std::string(header.substr(start, end - start)));
      start = end + 1;
    }
  }
  doc["rows"] = Json::array();
  for (const auto& r : results.rows) doc["rows"].push_back(row_json(r));
  doc["slopes"] = Json::array();
  for (const auto& s : results.slopes) {
    doc["slopes"].push_back({{"scheme", std::string(to_string(s.scheme))},
                             {"method", s.method},
                             {"slope", number_or_null(s.slope)},
                             {"points", s.points},
                             {"reference", s.reference}});
  }
  doc["exponents"] = Json::object();
  for (const auto& [scheme, value] : results.exponents) {
    doc["exponents"][std::string(to_string(scheme))] = value;
  }
  os << doc.dump(2) << "\n";
}

bool ValidationReport::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

void write_report_csv(std::ostream& os, const ValidationReport& report) {
  os << "check,pass,residual,tolerance,detail\n";
  for (const auto& c : report.checks) {
    os << c.name << ',' << (c.pass ? "true" : "false") << ',' << format_double(c.residual) << ','
       << format_double(c.tolerance) << ',' << c.detail << "\n";
  }
}

void write_report_json(std::ostream& os, const ValidationReport& report) {
  Json doc;
  doc["command"] = "validate";
  doc["pass"] = report.pass();
  doc["checks"] = Json::array();
  for (const auto& c : report.checks) {
    doc["checks"].push_back({{"name", c.name},
                             {"pass", c.pass},
                             {"residual", number_or_null(c.residual)},
                             {"tolerance", c.tolerance},
                             {"detail", c.detail}});
  }
  os << doc.dump(2) << "\n";
}

}  // namespace tcap::cli
