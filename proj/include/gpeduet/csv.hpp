#pragma once

#include "gpeduet/core.hpp"
#include "gpeduet/solver.hpp"
#include "gpeduet/variational.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gpeduet::csv {

inline constexpr const char* kObservablesHeader =
    "t,norm_a,norm_b,center_a,center_b,width_a,width_b,energy,overlap";
inline constexpr const char* kSnapshotHeader = "t,x,re_psi_alpha,im_psi_alpha,re_psi_beta,im_psi_beta";
inline constexpr const char* kVariationalHeader = "t,x0a,p0a,x0b,p0b,wa,va,wb,vb";
inline constexpr const char* kEffectivePotentialHeader = "dx,v_eff";

// All writers emit a header row and 17 significant digits.
void write_observables(std::ostream& os, const Trajectory& trajectory);
/// One block of n_points rows per recorded time.
void write_snapshots(std::ostream& os, std::span<const double> times,
                     std::span<const TwoComponentState> states);
void write_variational(std::ostream& os, std::span<const VariationalSample> samples);
void write_effective_potential(std::ostream& os, std::span<const double> dx,
                               std::span<const double> v_eff);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// Parses a numeric CSV with a header row. Throws std::runtime_error on a
/// ragged row or a non-numeric cell.
Table read(std::istream& is);
Table read_file(const std::string& path);

}  // namespace gpeduet::csv
