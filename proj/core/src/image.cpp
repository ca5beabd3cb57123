#include "topo/image.hpp"

#include "topo/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace topo {

void write_pgm(const std::filesystem::path& path, const Field& image, double lo, double hi,
               bool invert) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      double t = std::clamp((image(r, c) - lo) / span, 0.0, 1.0);
      if (!std::isfinite(t)) t = 0.0;
      if (invert) t = 1.0 - t;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
  }
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

void write_pgm_autoscale(const std::filesystem::path& path, const Field& image) {
  write_pgm(path, image, image.minCoeff(), image.maxCoeff());
}

void write_density_pgm(const std::filesystem::path& path, const Field& density) {
  write_pgm(path, density, 0.0, 1.0, true);
}

}  // namespace topo
