#ifndef JRC_CSV_HPP
#define JRC_CSV_HPP

// CSV readers/writers for every artifact the toolkit exchanges. Doubles are
// written with 17 significant digits, which round-trips IEEE binary64 exactly.
//
//   signal set     k,m,re,im
//   EP sequence    n,phase_rad
//   samples        n,re,im
//   r_f2 trace     lag,abs,re,im
//   detections     trial,detected,peak_index,peak_amp,threshold
//   AF surface     lag,doppler,abs_db        (doppler in T f_d units)
//   theory curve   snr_db,value
//   dissimilarity  pair,D_linear  + final row  D_mean_db,<value>
//   sim result     snr_db,estimate,stderr,trials

#include "jrc/analysis.hpp"
#include "jrc/core.hpp"
#include "jrc/receiver.hpp"
#include "jrc/seqdesign.hpp"
#include "jrc/simkit.hpp"
#include "jrc/waveform.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace jrc::csv {

/// Raised on malformed CSV input; carries the offending 1-based line number.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, int line)
      : InvalidInput(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

std::string format(double value);

void write_signal_set(std::ostream& out, const SignalSet& set);
SignalSet read_signal_set(std::istream& in);

void write_ep(std::ostream& out, const EpSequence& ep);
EpSequence read_ep(std::istream& in);

void write_samples(std::ostream& out, const CVector& samples);
CVector read_samples(std::istream& in);

void write_trace(std::ostream& out, const LagSeries& series);

struct DetectionRow {
  long trial = 0;
  DetectionReport report;
};
void write_detections(std::ostream& out, const std::vector<DetectionRow>& rows);

void write_surface(std::ostream& out, const AmbiguitySurface& surface, int symbols, int chips);

void write_curve(std::ostream& out, const std::vector<std::pair<double, double>>& curve);

void write_dissimilarity(std::ostream& out, const DissimilarityReport& report);

void write_sim_result(std::ostream& out, const SimResult& result);

// File helpers; throw IoError on failure.
void save(const std::string& path, const std::string& contents);
std::string load(const std::string& path);

}  // namespace jrc::csv

#endif  // JRC_CSV_HPP
