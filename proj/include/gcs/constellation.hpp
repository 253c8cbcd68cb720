#pragma once

#include <complex>
#include <string>
#include <vector>

namespace gcs {

using cplx = std::complex<double>;

enum class Provenance { qam, trained_fixed, trained_lw_robust, trained_snr_lw_robust };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// A 2-D constellation: M complex points with unit average power.
// Immutable after construction; construction validates the invariants
// (finite points, unit mean power within 1e-9 relative, pairwise
// separation > 1e-6).
class Constellation {
 public:
  Constellation(std::vector<cplx> points, std::string label,
                Provenance provenance, std::string metadata = "");

  const std::vector<cplx>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  const std::string& label() const { return label_; }
  Provenance provenance() const { return provenance_; }
  const std::string& metadata() const { return metadata_; }

 private:
  std::vector<cplx> points_;
  std::string label_;
  Provenance provenance_;
  std::string metadata_;
};

// Square QAM on the odd-integer grid, scaled to unit average power.
// Supported orders: 4, 16, 64, 256.
Constellation square_qam(int order);

// Scales the point list by a single positive real so the mean power is 1.
Constellation normalize_power(const std::vector<cplx>& points,
                              std::string label = "custom",
                              Provenance provenance = Provenance::qam,
                              std::string metadata = "");

double min_distance(const Constellation& c);

// Text format, one file per constellation:
//   constellation v1 <M> <label> <provenance>
//   <I> <Q>                 (M lines, >= 17 significant digits)
//   # <metadata>            (optional trailing comment lines)
// Loading also accepts comma-separated point lines.
void save(const Constellation& c, const std::string& path);
Constellation load(const std::string& path);

}  // namespace gcs
