#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mrgrade/image.hpp"

namespace mrgrade {

/// Discrete Radon transform of a B x B block on a 2B-line pseudo-polar grid.
///
/// Row `l` of `slices` is the projection for pseudo-polar line `l`; columns are
/// 2B projection offsets with offset zero (the block centre) at column B.
struct RadonSlices {
  int block_size = 0;
  Eigen::MatrixXd slices;

  int angles() const { return static_cast<int>(slices.rows()); }
};

/// Ridgelet coefficients: `depth` detail bands followed by the smooth band,
/// each laid out as (angle x position), 2B x 2B.
struct RidgeletCoeffs {
  int depth = 0;
  std::vector<Eigen::MatrixXd> bands;
};

/// Spectral direction (kx, ky) of pseudo-polar line `line`; the larger
/// component is 1. Lines 0..B-1 have kx = 1 (slope -1 .. 1-2/B), lines
/// B..2B-1 have ky = 1 (kx from 1 down to -1+2/B). Angles increase with the
/// index and cover [-45, 135) degrees.
Eigen::Vector2d pseudo_polar_direction(int line, int block_size);

/// Angle of `pseudo_polar_direction` in radians, measured from the x axis.
double pseudo_polar_angle(int line, int block_size);

/// Reusable Radon/ridgelet engine for one block size. Holds the FFT plans and
/// scratch buffers, so one instance must not be shared between threads.
class RidgeletTransform {
 public:
  explicit RidgeletTransform(int block_size);
  ~RidgeletTransform();
  RidgeletTransform(RidgeletTransform&&) noexcept;
  RidgeletTransform& operator=(RidgeletTransform&&) noexcept;

  int block_size() const { return block_size_; }

  RadonSlices radon(const Eigen::Ref<const RowArrayXXd>& block);
  RidgeletCoeffs ridgelet(const Eigen::Ref<const RowArrayXXd>& block, int depth);

 private:
  struct Workspace;
  int block_size_;
  std::unique_ptr<Workspace> ws_;
};

/// Throws InvalidInput unless the block is square with a power-of-two side >= 2.
RadonSlices radon_block(const ImageGrid& block);

/// 1-D a trous transform along the position axis of every Radon slice.
/// Requires depth <= log2(2B) - 2.
RidgeletCoeffs ridgelet_block(const ImageGrid& block, int depth);

/// Sum of squared slice values per angle.
Eigen::VectorXd angle_energies(const RadonSlices& radon);

/// Sum of squared coefficients per angle, over every band.
Eigen::VectorXd angle_energies(const RidgeletCoeffs& coeffs);

/// Adds the bands back together, giving the Radon slices the coefficients came from.
Eigen::MatrixXd reconstruct_slices(const RidgeletCoeffs& coeffs);

}  // namespace mrgrade
