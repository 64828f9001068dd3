#include "localdpm/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "localdpm/error.hpp"

namespace localdpm {

const std::string& csv_header() {
  static const std::string header =
      "shape,alpha,scheme,sigma,bc,N,h,err_max,order,cond2,condInf,cond_order,gamma_count,"
      "zeta_count";
  return header;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<SolveReport>& rows) {
  std::string text = csv_header() + "\n";
  for (const SolveReport& r : rows) {
    text += r.shape + "," + format_double(r.alpha) + "," + std::to_string(r.scheme) + "," +
            format_double(r.sigma) + "," + r.bc + "," + std::to_string(r.n) + "," +
            format_double(r.h) + "," + format_double(r.err_max) + "," + format_double(r.order) +
            "," + format_double(r.cond2) + "," + format_double(r.cond_inf) + "," +
            format_double(r.cond_order) + "," + std::to_string(r.gamma_count) + "," +
            std::to_string(r.zeta_count) + "\n";
  }
  out << text;
}

void write_csv_file(const std::string& path, const std::vector<SolveReport>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_csv(out, rows);
  require(static_cast<bool>(out), ErrorCode::Io, "write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class T>
T parse_field(const std::string& text, int line) {
  T value{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    fail(ErrorCode::Io, "CSV line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return value;
}

}  // namespace

std::vector<SolveReport> read_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Io, "CSV input is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == csv_header(), ErrorCode::Io, "unexpected CSV header '" + line + "'");
  std::vector<SolveReport> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    require(f.size() == 14, ErrorCode::Io,
            "CSV line " + std::to_string(number) + " has " + std::to_string(f.size()) +
                " fields, expected 14");
    SolveReport r;
    r.shape = f[0];
    r.alpha = parse_field<double>(f[1], number);
    r.scheme = parse_field<int>(f[2], number);
    r.sigma = parse_field<double>(f[3], number);
    r.bc = f[4];
    r.n = parse_field<int>(f[5], number);
    r.h = parse_field<double>(f[6], number);
    r.err_max = parse_field<double>(f[7], number);
    r.order = parse_field<double>(f[8], number);
    r.cond2 = parse_field<double>(f[9], number);
    r.cond_inf = parse_field<double>(f[10], number);
    r.cond_order = parse_field<double>(f[11], number);
    r.gamma_count = parse_field<int>(f[12], number);
    r.zeta_count = parse_field<int>(f[13], number);
    rows.push_back(r);
  }
  return rows;
}

void write_json_file(const std::string& path, const ResultTable& table,
                     const ExperimentConfig& config) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json rows = json::array();
  for (const SolveReport& r : table.rows) {
    rows.push_back({{"shape", r.shape},
                    {"alpha", r.alpha},
                    {"scheme", r.scheme},
                    {"sigma", r.sigma},
                    {"bc", r.bc},
                    {"N", r.n},
                    {"h", r.h},
                    {"err_max", r.err_max},
                    {"order", num(r.order)},
                    {"cond2", num(r.cond2)},
                    {"condInf", num(r.cond_inf)},
                    {"cond_order", num(r.cond_order)},
                    {"gamma_count", r.gamma_count},
                    {"zeta_count", r.zeta_count},
                    {"residual", r.residual},
                    {"seconds_potentials", r.seconds_potentials},
                    {"seconds_solve", r.seconds_solve},
                    {"seconds_total", r.seconds_total}});
  }
  json exps = json::array();
  for (double e : table.cond_exponents) exps.push_back(num(e));
  const json doc = {{"preset", config.preset},
                    {"threads", config.threads},
                    {"rows", rows},
                    {"cond_exponents", exps}};
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace localdpm
