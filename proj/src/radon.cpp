#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "mrgrade/ridgelet.hpp"

namespace mrgrade {

namespace {

using Complex = std::complex<double>;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// round(num / den) with halves away from zero; den > 0. Symmetric in num, which
// keeps every sampled line Hermitian.
int round_div(int num, int den) {
  const int mag = (std::abs(num) * 2 + den) / (2 * den);
  return num < 0 ? -mag : mag;
}

int wrap(int k, int n) { return ((k % n) + n) % n; }

// A spectral sample read from the stored half spectrum (kx in 0..B) as
// scale * (re + i * imag_sign * im). Conjugates have imag_sign -1, self-conjugate
// frequencies 0, dropped samples point at a trailing zero slot.
struct Sample {
  std::int32_t offset = 0;
  double imag_sign = 0.0;
};

}  // namespace

Eigen::Vector2d pseudo_polar_direction(int line, int block_size) {
  const int b = block_size;
  if (line < 0 || line >= 2 * b) throw InvalidInput("pseudo-polar line index out of range");
  if (line < b) return {1.0, static_cast<double>(2 * line - b) / b};
  return {static_cast<double>(b - 2 * (line - b)) / b, 1.0};
}

double pseudo_polar_angle(int line, int block_size) {
  const auto d = pseudo_polar_direction(line, block_size);
  return std::atan2(d.y(), d.x());
}

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct RidgeletTransform::Workspace {
  int b = 0;
  int n = 0;
  int half = 0;  // stored spectrum columns, kx = 0..B
  std::vector<double> rows;           // B rows of n samples, zero-padded, origin-centred
  std::vector<Complex> row_spectra;   // B rows of half bins
  std::vector<Complex> spectrum;      // n rows (ky) x half columns (kx), row-major, + zero slot
  std::vector<Complex> packed;        // B packed line pairs of n samples
  std::vector<int> padded_index;      // block offset -> zero-padded index
  std::vector<Sample> samples;        // per line, per wrapped frequency index k
  fftw_plan row_plan = nullptr;
  fftw_plan column_plan = nullptr;
  fftw_plan line_plan = nullptr;

  explicit Workspace(int block_size);
  ~Workspace() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {row_plan, column_plan, line_plan}) {
      if (p != nullptr) fftw_destroy_plan(p);
    }
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  Complex read(const Sample& s) const {
    const Complex& v = spectrum[s.offset];
    return {v.real(), s.imag_sign * v.imag()};
  }
};

namespace {

fftw_complex* as_fftw(std::vector<Complex>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

}  // namespace

RidgeletTransform::Workspace::Workspace(int block_size)
    : b(block_size), n(2 * block_size), half(block_size + 1) {
  rows.assign(static_cast<std::size_t>(b) * n, 0.0);
  row_spectra.resize(static_cast<std::size_t>(b) * half);
  const auto zero_slot = static_cast<std::int32_t>(n * half);
  spectrum.assign(static_cast<std::size_t>(zero_slot) + 1, Complex{});
  packed.resize(static_cast<std::size_t>(b) * n);
  padded_index.resize(b);
  for (int x = 0; x < b; ++x) padded_index[x] = wrap(x - b / 2, n);

  {
    std::lock_guard lock(planner_mutex());
    // Deterministic plans: FFTW_ESTIMATE never times candidate algorithms.
    const unsigned flags = FFTW_ESTIMATE;
    row_plan = fftw_plan_many_dft_r2c(1, &n, b, rows.data(), nullptr, 1, n, as_fftw(row_spectra),
                                      nullptr, 1, half, flags);
    column_plan = fftw_plan_many_dft(1, &n, half, as_fftw(spectrum), nullptr, half, 1,
                                     as_fftw(spectrum), nullptr, half, 1, FFTW_FORWARD, flags);
    line_plan = fftw_plan_many_dft(1, &n, b, as_fftw(packed), nullptr, 1, n, as_fftw(packed),
                                   nullptr, 1, n, FFTW_BACKWARD, flags);
  }
  if (row_plan == nullptr || column_plan == nullptr || line_plan == nullptr) {
    throw std::runtime_error("radon: FFT planning failed for block size " + std::to_string(b));
  }

  // Spectral sampling table: line l, frequency k in [-B, B) at wrapped index.
  // Samples with kx outside 0..B come from the conjugate-symmetric partner.
  // The Nyquist sample k = -B has no partner on the line and is dropped.
  samples.resize(static_cast<std::size_t>(n) * n);
  for (int l = 0; l < n; ++l) {
    for (int k = -b; k < b; ++k) {
      Sample& s = samples[static_cast<std::size_t>(l) * n + wrap(k, n)];
      if (k == -b) {
        s.offset = zero_slot;
        continue;
      }
      int kx = 0;
      int ky = 0;
      if (l < b) {
        kx = k;
        ky = round_div(k * (2 * l - b), b);
      } else {
        kx = round_div(k * (b - 2 * (l - b)), b);
        ky = k;
      }
      int cx = wrap(kx, n);
      int cy = wrap(ky, n);
      const bool edge_column = cx == 0 || cx == b;
      bool conj = false;
      if (cx > b || (edge_column && cy > b)) {
        cx = wrap(-kx, n);
        cy = wrap(-ky, n);
        conj = true;
      }
      s.offset = cy * half + cx;
      if (edge_column && (cy == 0 || cy == b)) {
        s.imag_sign = 0.0;
      } else {
        s.imag_sign = conj ? -1.0 : 1.0;
      }
    }
  }
}

RidgeletTransform::RidgeletTransform(int block_size) : block_size_(block_size) {
  if (block_size < 2 || !is_power_of_two(block_size)) {
    throw InvalidInput("ridgelet block size must be a power of two >= 2, got " +
                       std::to_string(block_size));
  }
  ws_ = std::make_unique<Workspace>(block_size);
}

RidgeletTransform::~RidgeletTransform() = default;
RidgeletTransform::RidgeletTransform(RidgeletTransform&&) noexcept = default;
RidgeletTransform& RidgeletTransform::operator=(RidgeletTransform&&) noexcept = default;

RadonSlices RidgeletTransform::radon(const Eigen::Ref<const RowArrayXXd>& block) {
  const int b = block_size_;
  auto& ws = *ws_;
  const int n = ws.n;
  const int half = ws.half;
  if (block.rows() != b || block.cols() != b) {
    throw InvalidInput("radon: block must be " + std::to_string(b) + "x" + std::to_string(b));
  }

  // Zero-pad to 2B x 2B with the block centre at the origin, so projection
  // offsets are centred on zero. Only the B occupied rows need a row FFT.
  for (int y = 0; y < b; ++y) {
    double* row = ws.rows.data() + static_cast<std::ptrdiff_t>(y) * n;
    for (int x = 0; x < b; ++x) row[ws.padded_index[x]] = block(y, x);
  }
  fftw_execute(ws.row_plan);
  std::fill(ws.spectrum.begin(), ws.spectrum.end(), Complex{});
  for (int y = 0; y < b; ++y) {
    std::copy_n(ws.row_spectra.begin() + static_cast<std::ptrdiff_t>(y) * half, half,
                ws.spectrum.begin() + static_cast<std::ptrdiff_t>(ws.padded_index[y]) * half);
  }
  fftw_execute(ws.column_plan);

  // Each sampled line is Hermitian, so its inverse transform is real: two
  // lines share one complex inverse FFT as real and imaginary parts.
  const double scale = 1.0 / n;
  for (int pair = 0; pair < b; ++pair) {
    const Sample* first = ws.samples.data() + static_cast<std::size_t>(2 * pair) * n;
    const Sample* second = first + n;
    Complex* dst = ws.packed.data() + static_cast<std::ptrdiff_t>(pair) * n;
    for (int k = 0; k < n; ++k) {
      const Complex u = ws.read(first[k]);
      const Complex v = ws.read(second[k]);
      dst[k] = {scale * (u.real() - v.imag()), scale * (u.imag() + v.real())};
    }
  }
  fftw_execute(ws.line_plan);

  RadonSlices out;
  out.block_size = b;
  out.slices.resize(n, n);
  for (int pair = 0; pair < b; ++pair) {
    const Complex* src = ws.packed.data() + static_cast<std::ptrdiff_t>(pair) * n;
    for (int t = 0; t < n; ++t) {
      const int pos = t < b ? t + b : t - b;
      out.slices(2 * pair, pos) = src[t].real();
      out.slices(2 * pair + 1, pos) = src[t].imag();
    }
  }
  return out;
}

RadonSlices radon_block(const ImageGrid& block) {
  if (block.width() != block.height()) throw InvalidInput("radon: block must be square");
  RidgeletTransform transform(block.width());
  return transform.radon(block.pixels());
}

Eigen::VectorXd angle_energies(const RadonSlices& radon) {
  return radon.slices.rowwise().squaredNorm();
}

}  // namespace mrgrade
