#include "ncindex/fourier_apply.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <numbers>

namespace ncindex {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

int fft_friendly(int n) {
  // smallest 5-smooth integer >= n
  for (int v = n;; ++v) {
    int r = v;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return v;
  }
}

}  // namespace

SymbolApplier::SymbolApplier(const FourierSymbol& symbol, const ModeLattice& lattice, int spinor)
    : lattice_(lattice), spinor_(spinor), block_(symbol.block()) {
  if (spinor_ * block_ != lattice_.fiber) throw LinalgError("SymbolApplier: fiber mismatch");
  if (symbol.dims() != lattice_.dims) throw LinalgError("SymbolApplier: dimension mismatch");
  if (block_ > 8) throw LinalgError("SymbolApplier: block size > 8 not supported");

  const Offset band = symbol.band();
  for (int d = 0; d < lattice_.dims; ++d) {
    const auto du = static_cast<std::size_t>(d);
    grid_[du] = fft_friendly(2 * lattice_.cutoff[du] + band[du] + 1);
  }
  grid_points_ = 1;
  for (int d = 0; d < lattice_.dims; ++d) grid_points_ *= grid_[static_cast<std::size_t>(d)];
  inv_grid_points_ = 1.0 / static_cast<double>(grid_points_);

  // symbol values on the grid
  values_.assign(static_cast<std::size_t>(grid_points_), Matrix());
  std::array<double, 3> step{0, 0, 0};
  for (int d = 0; d < lattice_.dims; ++d)
    step[static_cast<std::size_t>(d)] = 2.0 * std::numbers::pi / grid_[static_cast<std::size_t>(d)];
  for (Eigen::Index p = 0; p < grid_points_; ++p) {
    Eigen::Index r = p;
    std::array<double, 3> theta{0, 0, 0};
    for (int d = lattice_.dims - 1; d >= 0; --d) {
      const auto du = static_cast<std::size_t>(d);
      theta[du] = static_cast<double>(r % grid_[du]) * step[du];
      r /= grid_[du];
    }
    values_[static_cast<std::size_t>(p)] = symbol.eval(theta);
  }

  // kept-mode -> grid-point map (mode m lands at grid index (m mod G) per dir)
  const Eigen::Index nm = lattice_.num_modes();
  mode_to_grid_.resize(static_cast<std::size_t>(nm));
  for (Eigen::Index i = 0; i < nm; ++i) {
    const Offset m = lattice_.mode_at(i);
    Eigen::Index p = 0;
    for (int d = 0; d < lattice_.dims; ++d) {
      const auto du = static_cast<std::size_t>(d);
      const int g = grid_[du];
      const int w = ((m[du] % g) + g) % g;
      p = p * g + w;
    }
    mode_to_grid_[static_cast<std::size_t>(i)] = p;
  }
}

SymbolApplier::~SymbolApplier() = default;

SymbolApplier::Workspace::Workspace(const SymbolApplier& owner) : owner_(owner) {
  const int f = owner_.lattice_.fiber;
  const Eigen::Index total = owner_.grid_points_ * f;
  grid_ = static_cast<cx*>(fftw_malloc(sizeof(cx) * static_cast<std::size_t>(total)));
  std::memset(grid_, 0, sizeof(cx) * static_cast<std::size_t>(total));

  int n[3];
  for (int d = 0; d < owner_.lattice_.dims; ++d) n[d] = owner_.grid_[static_cast<std::size_t>(d)];

  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  auto* data = reinterpret_cast<fftw_complex*>(grid_);
  // batch over fiber components: grid arrays are stored fiber-major
  // (component c occupies the contiguous range [c*grid_points, ...))
  fwd_plan_ = fftw_plan_many_dft(owner_.lattice_.dims, n, f, data, nullptr, 1,
                                 static_cast<int>(owner_.grid_points_), data, nullptr, 1,
                                 static_cast<int>(owner_.grid_points_), FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_plan_ = fftw_plan_many_dft(owner_.lattice_.dims, n, f, data, nullptr, 1,
                                 static_cast<int>(owner_.grid_points_), data, nullptr, 1,
                                 static_cast<int>(owner_.grid_points_), FFTW_BACKWARD, FFTW_ESTIMATE);
  if (fwd_plan_ == nullptr || bwd_plan_ == nullptr) throw LinalgError("fftw plan creation failed");
}

SymbolApplier::Workspace::~Workspace() {
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  if (fwd_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
  if (bwd_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(bwd_plan_));
  fftw_free(grid_);
}

std::unique_ptr<SymbolApplier::Workspace> SymbolApplier::make_workspace() const {
  return std::unique_ptr<Workspace>(new Workspace(*this));
}

void SymbolApplier::apply(const cx* in, cx* out, Workspace& ws) const {
  const int f = lattice_.fiber;
  const Eigen::Index nm = lattice_.num_modes();
  const Eigen::Index gp = grid_points_;
  cx* grid = ws.grid_;

  std::memset(grid, 0, sizeof(cx) * static_cast<std::size_t>(gp * f));
  for (Eigen::Index i = 0; i < nm; ++i) {
    const Eigen::Index p = mode_to_grid_[static_cast<std::size_t>(i)];
    for (int c = 0; c < f; ++c) grid[c * gp + p] = in[i * f + c];
  }

  // modes -> positions. FFTW's BACKWARD transform sums e^{+i m x}, matching
  // the e^{i m theta} mode convention.
  fftw_execute_dft(static_cast<fftw_plan>(ws.bwd_plan_),
                   reinterpret_cast<fftw_complex*>(grid), reinterpret_cast<fftw_complex*>(grid));

  // pointwise fiber multiply by I_spinor (x) value(theta)
  const int b = block_;
  for (Eigen::Index p = 0; p < gp; ++p) {
    const Matrix& v = values_[static_cast<std::size_t>(p)];
    for (int s = 0; s < spinor_; ++s) {
      cx tmp[8];  // block_ <= 8 supported
      for (int r = 0; r < b; ++r) {
        cx acc = 0.0;
        for (int c = 0; c < b; ++c) acc += v(r, c) * grid[(s * b + c) * gp + p];
        tmp[r] = acc;
      }
      for (int r = 0; r < b; ++r) grid[(s * b + r) * gp + p] = tmp[r];
    }
  }

  fftw_execute_dft(static_cast<fftw_plan>(ws.fwd_plan_),
                   reinterpret_cast<fftw_complex*>(grid), reinterpret_cast<fftw_complex*>(grid));

  for (Eigen::Index i = 0; i < nm; ++i) {
    const Eigen::Index p = mode_to_grid_[static_cast<std::size_t>(i)];
    for (int c = 0; c < f; ++c) out[i * f + c] = grid[c * gp + p] * inv_grid_points_;
  }
}

}  // namespace ncindex
