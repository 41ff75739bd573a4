#include "scrn/libsvm.hpp"

#include "scrn/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scrn {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

double parse_real(std::string_view tok, std::size_t line, std::size_t col, const char* what) {
  std::string_view body = tok;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size() || body.empty()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line, col);
  }
  if (!std::isfinite(v)) {
    throw ParseError(std::string("non-finite ") + what + " '" + std::string(tok) + "'", line, col);
  }
  return v;
}

long long parse_index(std::string_view tok, std::size_t line, std::size_t col) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError("invalid feature index '" + std::string(tok) + "'", line, col);
  }
  if (v < 1) throw ParseError("feature index must be >= 1", line, col);
  return v;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::optional<LabelConvention> infer_convention(const Vector& labels) {
  bool has_zero = false;
  bool has_minus = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const double b = labels(i);
    if (b == 0.0) has_zero = true;
    else if (b == -1.0) has_minus = true;
    else if (b != 1.0) return std::nullopt;
  }
  if (has_zero && has_minus) return std::nullopt;
  return has_zero ? LabelConvention::zero_one : LabelConvention::plus_minus_one;
}

}  // namespace

std::string_view to_string(LabelConvention c) {
  return c == LabelConvention::zero_one ? "zero_one" : "plus_minus_one";
}

std::size_t Dataset::nnz() const {
  std::size_t total = 0;
  for (const Row& r : rows) total += r.size();
  return total;
}

Dataset parse_libsvm(std::string_view text, const ParseOptions& opts) {
  Dataset d;
  d.name = opts.name;
  std::vector<double> labels;
  long long max_index = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }

    Dataset::Row row;
    bool have_label = false;
    long long prev = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && !is_space(line[i])) ++i;
      const std::string_view tok = line.substr(start, i - start);
      const std::size_t col = start + 1;

      if (!have_label) {
        labels.push_back(parse_real(tok, line_no, col, "label"));
        have_label = true;
        continue;
      }
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected index:value, got '" + std::string(tok) + "'", line_no, col);
      }
      const long long idx = parse_index(tok.substr(0, colon), line_no, col);
      if (idx <= prev) {
        throw ParseError("feature indices must be strictly increasing", line_no, col);
      }
      const double val = parse_real(tok.substr(colon + 1), line_no, col + colon + 1, "value");
      prev = idx;
      max_index = std::max(max_index, idx);
      row.emplace_back(static_cast<Eigen::Index>(idx - 1), val);
    }
    if (have_label) d.rows.push_back(std::move(row));
  }

  if (d.rows.empty()) throw InvalidInput("parse_libsvm: no samples");
  if (opts.n_features) {
    if (*opts.n_features < max_index) {
      throw InvalidInput("parse_libsvm: n_features is smaller than the largest index " +
                         std::to_string(max_index));
    }
    d.n = *opts.n_features;
  } else {
    d.n = static_cast<Eigen::Index>(max_index);
  }
  if (d.n < 1) throw InvalidInput("parse_libsvm: no features");
  d.labels = Eigen::Map<Vector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  d.label_convention = infer_convention(d.labels);
  return d;
}

Dataset load_libsvm(const std::filesystem::path& path, ParseOptions opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("load_libsvm: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (opts.name.empty()) opts.name = path.stem().string();
  return parse_libsvm(buf.str(), opts);
}

std::string serialize_libsvm(const Dataset& d) {
  std::string out;
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    append_number(out, d.labels(static_cast<Eigen::Index>(r)));
    for (const auto& [idx, val] : d.rows[r]) {
      out.push_back(' ');
      out += std::to_string(idx + 1);
      out.push_back(':');
      append_number(out, val);
    }
    out.push_back('\n');
  }
  return out;
}

Dataset relabel(const Dataset& d, LabelConvention target) {
  const auto conv = infer_convention(d.labels);
  if (!conv) throw InvalidInput("relabel: labels are neither {0,1} nor {-1,+1}");
  Dataset out = d;
  if (*conv == target) {
    out.label_convention = target;
    return out;
  }
  for (Eigen::Index i = 0; i < out.labels.size(); ++i) {
    double& b = out.labels(i);
    if (target == LabelConvention::zero_one && b == -1.0) b = 0.0;
    else if (target == LabelConvention::plus_minus_one && b == 0.0) b = -1.0;
  }
  out.label_convention = target;
  return out;
}

GlmData to_glm_data(const Dataset& d, bool scale_columns) {
  std::vector<double> col_scale(static_cast<std::size_t>(d.n), 1.0);
  if (scale_columns) {
    std::vector<double> sq(static_cast<std::size_t>(d.n), 0.0);
    for (const auto& row : d.rows)
      for (const auto& [idx, val] : row) sq[static_cast<std::size_t>(idx)] += val * val;
    for (std::size_t j = 0; j < sq.size(); ++j) {
      const double rms = std::sqrt(sq[j] / static_cast<double>(d.m()));
      if (rms > 0.0) col_scale[j] = 1.0 / rms;
    }
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(d.nnz());
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    for (const auto& [idx, val] : d.rows[r]) {
      trips.emplace_back(static_cast<Eigen::Index>(r), idx, val * col_scale[static_cast<std::size_t>(idx)]);
    }
  }
  GlmData g;
  g.A.resize(static_cast<Eigen::Index>(d.m()), d.n);
  g.A.setFromTriplets(trips.begin(), trips.end());
  g.A.makeCompressed();
  g.b = d.labels;
  return g;
}

std::string canonical_download_url(std::string_view name) {
  return "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/" + std::string(name);
}

}  // namespace scrn
