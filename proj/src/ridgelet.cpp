#include "mrgrade/atrous.hpp"
#include "mrgrade/ridgelet.hpp"

namespace mrgrade {

RidgeletCoeffs RidgeletTransform::ridgelet(const Eigen::Ref<const RowArrayXXd>& block, int depth) {
  const int n = 2 * block_size_;
  if (depth < 1 || depth > max_atrous_levels(n)) {
    throw InvalidInput("ridgelet: depth " + std::to_string(depth) + " exceeds log2(2B) - 2 for B = " +
                       std::to_string(block_size_));
  }
  const RadonSlices radon = this->radon(block);

  // 1-D a trous along the offset axis of every slice at once: columns of the
  // slice matrix are positions, so each tap is a whole-column update.
  RidgeletCoeffs out;
  out.depth = depth;
  out.bands.assign(depth + 1, Eigen::MatrixXd());
  Eigen::MatrixXd current = radon.slices;
  Eigen::MatrixXd next(n, n);
  for (int j = 0; j < depth; ++j) {
    const int step = 1 << j;
    for (int p = 0; p < n; ++p) {
      next.col(p) = kB3Taps[0] * current.col(reflect_index(p - 2 * step, n)) +
                    kB3Taps[1] * current.col(reflect_index(p - step, n)) +
                    kB3Taps[2] * current.col(p) +
                    kB3Taps[3] * current.col(reflect_index(p + step, n)) +
                    kB3Taps[4] * current.col(reflect_index(p + 2 * step, n));
    }
    out.bands[j] = current - next;
    current.swap(next);
  }
  out.bands[depth] = std::move(current);
  return out;
}

RidgeletCoeffs ridgelet_block(const ImageGrid& block, int depth) {
  if (block.width() != block.height()) throw InvalidInput("ridgelet: block must be square");
  RidgeletTransform transform(block.width());
  return transform.ridgelet(block.pixels(), depth);
}

Eigen::VectorXd angle_energies(const RidgeletCoeffs& coeffs) {
  Eigen::VectorXd energy = Eigen::VectorXd::Zero(coeffs.bands.empty() ? 0 : coeffs.bands[0].rows());
  for (const auto& band : coeffs.bands) energy += band.rowwise().squaredNorm();
  return energy;
}

Eigen::MatrixXd reconstruct_slices(const RidgeletCoeffs& coeffs) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(coeffs.bands.at(0).rows(), coeffs.bands.at(0).cols());
  for (const auto& band : coeffs.bands) sum += band;
  return sum;
}

}  // namespace mrgrade
