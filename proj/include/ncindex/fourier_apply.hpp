#pragma once

#include <memory>
#include <vector>

#include "ncindex/fourier.hpp"

namespace ncindex {

// Matrix-free application of the compressed multiplication operator
// P f P on a mode lattice, exact to rounding: the truncated vector is
// zero-padded onto a grid large enough that circular convolution cannot
// alias into the kept window (G_d >= 2*cutoff_d + band_d + 1), multiplied
// pointwise by the symbol values, transformed back and re-truncated.
//
// apply() is safe to call concurrently with distinct Workspace objects;
// workspaces must be created before entering the parallel region.
class SymbolApplier {
 public:
  SymbolApplier(const FourierSymbol& symbol, const ModeLattice& lattice, int spinor);
  ~SymbolApplier();
  SymbolApplier(const SymbolApplier&) = delete;
  SymbolApplier& operator=(const SymbolApplier&) = delete;

  class Workspace {
   public:
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

   private:
    friend class SymbolApplier;
    explicit Workspace(const SymbolApplier& owner);
    const SymbolApplier& owner_;
    void* fwd_plan_ = nullptr;
    void* bwd_plan_ = nullptr;
    cx* grid_ = nullptr;  // fiber-major batch of grid arrays
  };

  std::unique_ptr<Workspace> make_workspace() const;

  Eigen::Index dim() const { return lattice_.dim(); }
  // out = (P f P) in ; in/out of length dim(), may not alias
  void apply(const cx* in, cx* out, Workspace& ws) const;

 private:
  ModeLattice lattice_;
  int spinor_ = 1;
  int block_ = 1;
  std::array<int, 3> grid_{1, 1, 1};
  Eigen::Index grid_points_ = 1;
  std::vector<Matrix> values_;             // symbol value per grid point (block x block)
  std::vector<Eigen::Index> mode_to_grid_; // kept mode -> grid point index
  double inv_grid_points_ = 1.0;
};

}  // namespace ncindex
