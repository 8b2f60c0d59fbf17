#include "jrc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace jrc::csv {

namespace {

struct Table {
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;
};

Table read_table(std::istream& in, const std::string& header) {
  Table t;
  std::string line;
  int line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) throw ParseError("expected header '" + header + "', found '" + line + "'", line_no);
      seen_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    t.rows.push_back(std::move(fields));
    t.lines.push_back(line_no);
  }
  if (!seen_header) throw ParseError("missing header '" + header + "'", line_no);
  return t;
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("trailing characters in number '" + s + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
}

long to_long(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw ParseError("trailing characters in integer '" + s + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("not an integer: '" + s + "'", line);
  }
}

void expect_fields(const std::vector<std::string>& row, std::size_t n, int line) {
  if (row.size() != n) throw ParseError("expected " + std::to_string(n) + " fields", line);
}

}  // namespace

std::string format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_signal_set(std::ostream& out, const SignalSet& set) {
  out << "k,m,re,im\n";
  for (int k = 0; k < set.count(); ++k)
    for (int m = 0; m < set.length(); ++m)
      out << k << ',' << m << ',' << format(set.chips()(m, k).real()) << ',' << format(set.chips()(m, k).imag())
          << '\n';
}

SignalSet read_signal_set(std::istream& in) {
  const Table t = read_table(in, "k,m,re,im");
  std::map<std::pair<long, long>, cd> chips;
  long k_max = -1, m_max = -1;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const int line = t.lines[i];
    expect_fields(t.rows[i], 4, line);
    const long k = to_long(t.rows[i][0], line);
    const long m = to_long(t.rows[i][1], line);
    if (k < 0 || m < 0) throw ParseError("negative index", line);
    if (!chips.emplace(std::make_pair(k, m), cd{to_double(t.rows[i][2], line), to_double(t.rows[i][3], line)}).second)
      throw ParseError("duplicate chip", line);
    k_max = std::max(k_max, k);
    m_max = std::max(m_max, m);
  }
  if (chips.empty()) throw ParseError("signal set has no chips", 1);
  if (static_cast<long>(chips.size()) != (k_max + 1) * (m_max + 1))
    throw InvalidInput("signal set CSV: every signal must have the same length and no gaps");
  CMatrix out(m_max + 1, k_max + 1);
  for (const auto& [key, value] : chips) out(key.second, key.first) = value;
  return SignalSet(std::move(out));
}

void write_ep(std::ostream& out, const EpSequence& ep) {
  out << "n,phase_rad\n";
  for (int n = 0; n < ep.size(); ++n) out << n << ',' << format(ep.phases(n)) << '\n';
}

EpSequence read_ep(std::istream& in) {
  const Table t = read_table(in, "n,phase_rad");
  RVector phases(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    expect_fields(t.rows[i], 2, t.lines[i]);
    const long n = to_long(t.rows[i][0], t.lines[i]);
    if (n != static_cast<long>(i)) throw ParseError("EP rows must be numbered 0..N-1 in order", t.lines[i]);
    phases(static_cast<Eigen::Index>(i)) = to_double(t.rows[i][1], t.lines[i]);
  }
  return make_ep(phases);
}

void write_samples(std::ostream& out, const CVector& samples) {
  out << "n,re,im\n";
  for (Eigen::Index n = 0; n < samples.size(); ++n)
    out << n << ',' << format(samples(n).real()) << ',' << format(samples(n).imag()) << '\n';
}

CVector read_samples(std::istream& in) {
  const Table t = read_table(in, "n,re,im");
  CVector out(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    expect_fields(t.rows[i], 3, t.lines[i]);
    if (to_long(t.rows[i][0], t.lines[i]) != static_cast<long>(i))
      throw ParseError("sample rows must be numbered 0..L-1 in order", t.lines[i]);
    out(static_cast<Eigen::Index>(i)) = cd{to_double(t.rows[i][1], t.lines[i]), to_double(t.rows[i][2], t.lines[i])};
  }
  return out;
}

void write_trace(std::ostream& out, const LagSeries& series) {
  out << "lag,abs,re,im\n";
  for (Eigen::Index i = 0; i < series.values.size(); ++i) {
    const cd v = series.values(i);
    out << series.first_lag + i << ',' << format(std::abs(v)) << ',' << format(v.real()) << ',' << format(v.imag())
        << '\n';
  }
}

void write_detections(std::ostream& out, const std::vector<DetectionRow>& rows) {
  out << "trial,detected,peak_index,peak_amp,threshold\n";
  for (const auto& r : rows)
    out << r.trial << ',' << (r.report.declared ? 1 : 0) << ',' << r.report.peak_index << ','
        << format(r.report.peak_amplitude) << ',' << format(r.report.threshold) << '\n';
}

void write_surface(std::ostream& out, const AmbiguitySurface& surface, int symbols, int chips) {
  out << "lag,doppler,abs_db\n";
  const double peak = surface.values.cwiseAbs().maxCoeff();
  for (std::size_t f = 0; f < surface.dopplers.size(); ++f)
    for (std::size_t i = 0; i < surface.delays.size(); ++i)
      out << surface.delays[i] << ',' << format(doppler_to_tfd(surface.dopplers[f], symbols, chips)) << ','
          << format(amplitude_db(std::abs(surface.values(i, f)) / peak)) << '\n';
}

void write_curve(std::ostream& out, const std::vector<std::pair<double, double>>& curve) {
  out << "snr_db,value\n";
  for (const auto& [x, y] : curve) out << format(x) << ',' << format(y) << '\n';
}

void write_dissimilarity(std::ostream& out, const DissimilarityReport& report) {
  out << "pair,D_linear\n";
  for (std::size_t p = 0; p < report.d_values.size(); ++p) out << p << ',' << format(report.d_values[p]) << '\n';
  out << "D_mean_db," << format(report.d_mean_db) << '\n';
}

void write_sim_result(std::ostream& out, const SimResult& result) {
  out << "snr_db,estimate,stderr,trials\n";
  for (const auto& p : result.points)
    out << format(p.snr_db) << ',' << format(p.estimate) << ',' << format(p.std_error) << ',' << p.trials << '\n';
}

void save(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << contents;
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::string load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace jrc::csv
