#include "gcs/constellation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gcs {

namespace {

double mean_power(const std::vector<cplx>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s += std::norm(p);
  return s / static_cast<double>(pts.size());
}

bool finite(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

std::string format_point(cplx z, char sep) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g%c%.17g", z.real(), sep, z.imag());
  return buf;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::qam: return "qam";
    case Provenance::trained_fixed: return "trained-fixed";
    case Provenance::trained_lw_robust: return "trained-lw-robust";
    case Provenance::trained_snr_lw_robust: return "trained-snr-lw-robust";
  }
  throw std::logic_error("unknown provenance");
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "qam") return Provenance::qam;
  if (s == "trained-fixed") return Provenance::trained_fixed;
  if (s == "trained-lw-robust") return Provenance::trained_lw_robust;
  if (s == "trained-snr-lw-robust") return Provenance::trained_snr_lw_robust;
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

Constellation::Constellation(std::vector<cplx> points, std::string label,
                             Provenance provenance, std::string metadata)
    : points_(std::move(points)),
      label_(std::move(label)),
      provenance_(provenance),
      metadata_(std::move(metadata)) {
  const auto m = points_.size();
  if (m < 2) throw std::invalid_argument("constellation needs at least 2 points");
  for (const auto& p : points_) {
    if (!finite(p)) throw std::invalid_argument("constellation point not finite");
  }
  const double power = mean_power(points_);
  if (std::abs(power - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "constellation '" << label_ << "' violates the unit-power invariant: "
       << "mean power " << power << " (must be 1 within 1e-9)";
    throw std::invalid_argument(os.str());
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::abs(points_[i] - points_[j]) < 1e-6) {
        std::ostringstream os;
        os << "constellation '" << label_ << "' is degenerate: points " << i
           << " and " << j << " closer than 1e-6";
        throw std::invalid_argument(os.str());
      }
    }
  }
  if (label_.find_first_of(" \t\r\n,") != std::string::npos) {
    throw std::invalid_argument("constellation label must not contain whitespace or commas");
  }
}

Constellation square_qam(int order) {
  if (order != 4 && order != 16 && order != 64 && order != 256) {
    throw std::invalid_argument(
        "square_qam: unsupported order " + std::to_string(order) +
        " (supported: 4, 16, 64, 256)");
  }
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
  std::vector<cplx> pts;
  pts.reserve(order);
  for (int r = 0; r < side; ++r) {
    for (int q = 0; q < side; ++q) {
      pts.emplace_back(static_cast<double>(2 * r - side + 1),
                       static_cast<double>(2 * q - side + 1));
    }
  }
  const double scale = 1.0 / std::sqrt(mean_power(pts));
  for (auto& p : pts) p *= scale;
  return Constellation(std::move(pts), "qam" + std::to_string(order), Provenance::qam);
}

Constellation normalize_power(const std::vector<cplx>& points, std::string label,
                              Provenance provenance, std::string metadata) {
  if (points.empty()) throw std::invalid_argument("normalize_power: empty point list");
  for (const auto& p : points) {
    if (!finite(p)) throw std::invalid_argument("normalize_power: non-finite point");
  }
  const double power = mean_power(points);
  if (power <= 0.0) throw std::invalid_argument("normalize_power: all points are zero");
  const double scale = 1.0 / std::sqrt(power);
  std::vector<cplx> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = points[i] * scale;
  return Constellation(std::move(out), std::move(label), provenance, std::move(metadata));
}

double min_distance(const Constellation& c) {
  const auto& pts = c.points();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::min(best, std::abs(pts[i] - pts[j]));
    }
  }
  return best;
}

void save(const Constellation& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << "constellation v1 " << c.size() << ' ' << c.label() << ' '
    << to_string(c.provenance()) << '\n';
  for (const auto& p : c.points()) f << format_point(p, ' ') << '\n';
  if (!c.metadata().empty()) f << "# " << c.metadata() << '\n';
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

Constellation load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");

  std::istringstream header(line);
  std::string magic, version, label, prov;
  long long m = 0;
  if (!(header >> magic >> version >> m >> label >> prov) ||
      magic != "constellation" || version != "v1") {
    throw std::runtime_error(path + ": malformed header '" + line + "'");
  }
  if (m < 2) throw std::runtime_error(path + ": header point count " + std::to_string(m));

  std::vector<cplx> pts;
  pts.reserve(static_cast<std::size_t>(m));
  std::string metadata;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string text = line.substr(line.find_first_not_of("# \t"));
      if (!metadata.empty()) metadata += ' ';
      metadata += text;
      continue;
    }
    if (static_cast<long long>(pts.size()) >= m) {
      throw std::runtime_error(path + ": more than " + std::to_string(m) + " point lines");
    }
    for (auto& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re >> im)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed point line");
    }
    pts.emplace_back(re, im);
  }
  if (static_cast<long long>(pts.size()) != m) {
    throw std::runtime_error(path + ": header says " + std::to_string(m) + " points but file has " +
                             std::to_string(pts.size()));
  }
  try {
    return Constellation(std::move(pts), label, provenance_from_string(prov), metadata);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace gcs
