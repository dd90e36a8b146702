#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "historica/cli.hpp"
#include "historica/error.hpp"

namespace historica::cli {

namespace {

// Shortest decimal that round-trips.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) { row(header); }

  void row(std::initializer_list<std::string_view> cells) {
    bool first = true;
    for (auto cell : cells) {
      if (!first) out_ << ',';
      out_ << field(cell);
      first = false;
    }
    out_ << '\n';
  }

  std::string finish(const Provenance& p) { return out_.str() + provenance_block(p); }

 private:
  std::ostringstream out_;
};

std::string checkpoint_csv(const std::vector<std::vector<CheckpointRecord>>& series,
                           const Provenance& p, const char* column,
                           double CheckpointRecord::*value) {
  Csv csv({"trial", "checkpoint_n", column});
  for (std::size_t t = 0; t < series.size(); ++t) {
    for (const auto& r : series[t]) {
      csv.row({std::to_string(t), std::to_string(r.n), num(r.*value)});
    }
  }
  return csv.finish(p);
}

}  // namespace

std::string provenance_block(const Provenance& p) {
  std::ostringstream out;
  out << "# config-hash: " << p.config_hash << '\n'
      << "# seed: " << p.seed << '\n'
      << "# version: " << p.version << '\n'
      << "# trials: " << p.trials << '\n'
      << "# horizon: " << p.horizon << '\n';
  return out.str();
}

std::string fractions_csv(const OccupationReport& r) {
  Csv csv({"trial", "fraction"});
  for (std::size_t t = 0; t < r.fractions.size(); ++t) {
    csv.row({std::to_string(t), num(r.fractions[t])});
  }
  return csv.finish(r.provenance);
}

std::string cdf_csv(const OccupationReport& r, const ReferenceLaw& reference) {
  Csv csv({"alpha", "empirical", "reference"});
  for (const CdfRow& row : cdf_table(r.ecdf, reference.cdf())) {
    csv.row({num(row.value), num(row.empirical), num(row.reference)});
  }
  return csv.finish(r.provenance);
}

std::string birkhoff_csv(const BirkhoffReport& r) {
  return checkpoint_csv(r.series, r.provenance, "average", &CheckpointRecord::birkhoff_average);
}

std::string interior_csv(const InteriorReport& r) {
  return checkpoint_csv(r.series, r.provenance, "interior_fraction",
                        &CheckpointRecord::interior_fraction);
}

std::string limitset_csv(const LimitSetReport& r) {
  Csv csv({"trial", "checkpoint_n", "lambda", "rho"});
  for (std::size_t t = 0; t < r.series.size(); ++t) {
    for (const auto& rec : r.series[t]) {
      csv.row({std::to_string(t), std::to_string(rec.n), num(rec.lambda), num(rec.rho)});
    }
  }
  return csv.finish(r.provenance);
}

std::string equidist_csv(const EquidistributionReport& r) {
  Csv csv({"trial", "ks"});
  for (std::size_t t = 0; t < r.ks.size(); ++t) csv.row({std::to_string(t), num(r.ks[t])});
  return csv.finish(r.provenance);
}

std::string csv_body(std::string_view csv) {
  std::string out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t end = csv.find('\n', pos);
    end = end == std::string_view::npos ? csv.size() : end + 1;
    const auto line = csv.substr(pos, end - pos);
    if (!line.starts_with('#')) out += line;
    pos = end;
  }
  return out;
}

std::vector<CdfRow> read_cdf_csv(std::string_view text) {
  std::vector<CdfRow> rows;
  std::istringstream in{std::string(csv_body(text))};
  std::string line;
  if (!std::getline(in, line) || line != "alpha,empirical,reference") {
    throw ConfigError("cdf.csv: unexpected header");
  }
  while (std::getline(in, line)) {
    double v[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 3; ++i) {
      const auto res = std::from_chars(p, end, v[i]);
      if (res.ec != std::errc{}) throw ConfigError("cdf.csv: malformed row '" + line + "'");
      p = res.ptr;
      if (i < 2) {
        if (p == end || *p != ',') throw ConfigError("cdf.csv: malformed row '" + line + "'");
        ++p;
      }
    }
    rows.push_back({v[0], v[1], v[2]});
  }
  return rows;
}

std::string cdf_svg(const OccupationReport& r, const ReferenceLaw& reference) {
  constexpr double kW = 640, kH = 440, kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + pw * std::clamp(x, 0.0, 1.0); };
  const auto sy = [&](double y) { return kTop + ph * (1.0 - std::clamp(y, 0.0, 1.0)); };
  const auto pt = [&](double x, double y) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << sx(x) << ',' << sy(y) << ' ';
    return s.str();
  };

  std::string ecdf = pt(0.0, 0.0);
  double level = 0.0;
  for (const CdfRow& row : cdf_table(r.ecdf, [](double) { return 0.0; })) {
    ecdf += pt(row.value, level) + pt(row.value, row.empirical);
    level = row.empirical;
  }
  ecdf += pt(1.0, level);

  const Cdf f = reference.cdf();
  std::string ref;
  for (int i = 0; i <= 400; ++i) {
    const double x = i / 400.0;
    ref += pt(x, f(x));
  }

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    s << "<text x=\"" << sx(v) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << v
      << "</text>\n"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(v) + 4 << "\" text-anchor=\"end\">" << v
      << "</text>\n";
  }
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\">occupation fraction</text>\n"
    << "<text x=\"" << kLeft << "\" y=\"" << kTop - 10 << "\">n = " << r.provenance.horizon
    << ", trials = " << r.provenance.trials << ", KS = " << num(r.ks) << "</text>\n"
    << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"" << ref
    << "\"/>\n"
    << "<polyline fill=\"none\" stroke=\"#2c3e50\" stroke-width=\"1\" points=\"" << ecdf
    << "\"/>\n"
    << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 20
    << "\" fill=\"#2c3e50\">empirical</text>\n"
    << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 36
    << "\" fill=\"#c0392b\">reference</text>\n"
    << "</svg>\n";
  return s.str();
}

}  // namespace historica::cli
