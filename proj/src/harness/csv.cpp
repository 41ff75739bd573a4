#include "scrn/harness/csv.hpp"

#include "scrn/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scrn::harness {

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{
      "k",         "f",           "f_gap",     "grad_norm",    "min_eig",     "mu_eta",
      "step_norm", "hessian_err_frob", "grad_err", "potential", "kkt_residual", "wallclock_s"};
  return cols;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_number(r.f) << ',' << format_number(r.f_gap) << ','
        << format_number(r.grad_norm) << ',' << format_number(r.min_eig) << ','
        << format_number(r.mu_eta) << ',' << format_number(r.step_norm) << ','
        << format_number(r.hessian_err_frob) << ',' << format_number(r.grad_err) << ','
        << format_number(r.potential) << ',' << format_number(r.kkt_residual) << ','
        << format_number(r.wallclock_s) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(out, trace);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw InvalidInput("csv: no column " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const std::string& s = row.at(static_cast<std::size_t>(c));
    out.push_back(std::strtod(s.c_str(), nullptr));
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

}  // namespace scrn::harness
