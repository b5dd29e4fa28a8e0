#include "gpeduet/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gpeduet::csv {
namespace {

class PrecisionGuard {
 public:
  explicit PrecisionGuard(std::ostream& os) : os_(os), old_(os.precision(17)) {}
  ~PrecisionGuard() { os_.precision(old_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  std::ostream& os_;
  std::streamsize old_;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_observables(std::ostream& os, const Trajectory& trajectory) {
  PrecisionGuard guard(os);
  os << kObservablesHeader << '\n';
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const Observables& o = trajectory.snapshots[i];
    os << trajectory.times[i] << ',' << o.norm_alpha << ',' << o.norm_beta << ',' << o.center_alpha
       << ',' << o.center_beta << ',' << o.width_alpha << ',' << o.width_beta << ',' << o.energy
       << ',' << o.overlap_fraction << '\n';
  }
}

void write_snapshots(std::ostream& os, std::span<const double> times,
                     std::span<const TwoComponentState> states) {
  if (times.size() != states.size()) throw std::invalid_argument("write_snapshots: size mismatch");
  PrecisionGuard guard(os);
  os << kSnapshotHeader << '\n';
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto x = states[i].grid().points();
    const auto a = states[i].alpha();
    const auto b = states[i].beta();
    for (std::size_t j = 0; j < x.size(); ++j) {
      os << times[i] << ',' << x[j] << ',' << a[j].real() << ',' << a[j].imag() << ','
         << b[j].real() << ',' << b[j].imag() << '\n';
    }
  }
}

void write_variational(std::ostream& os, std::span<const VariationalSample> samples) {
  PrecisionGuard guard(os);
  os << kVariationalHeader << '\n';
  for (const auto& s : samples) {
    const VariationalState& v = s.state;
    os << s.t << ',' << v.x0_alpha << ',' << v.p0_alpha << ',' << v.x0_beta << ',' << v.p0_beta
       << ',' << v.w_alpha << ',' << v.v_alpha << ',' << v.w_beta << ',' << v.v_beta << '\n';
  }
}

void write_effective_potential(std::ostream& os, std::span<const double> dx,
                               std::span<const double> v_eff) {
  if (dx.size() != v_eff.size()) throw std::invalid_argument("write_effective_potential: size mismatch");
  PrecisionGuard guard(os);
  os << kEffectivePotentialHeader << '\n';
  for (std::size_t i = 0; i < dx.size(); ++i) os << dx[i] << ',' << v_eff[i] << '\n';
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("csv: no column named " + name);
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

Table read(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: missing header row");
  t.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw std::runtime_error("csv: row " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(t.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size()) {
        throw std::runtime_error("csv: non-numeric cell '" + c + "' on row " + std::to_string(line_no));
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  return read(in);
}

}  // namespace gpeduet::csv
