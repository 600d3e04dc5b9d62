#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "beamstab/linalg.hpp"
#include "beamstab/model.hpp"

namespace beamstab {

enum class MemoryScheme { PronyReduction, SgridUpwind, SgridGalerkin };
const char* to_string(MemoryScheme scheme) noexcept;
MemoryScheme parse_memory_scheme(const std::string& text);

struct MemoryConfig {
  MemoryScheme scheme = MemoryScheme::PronyReduction;
  int nodes = 256;
  double stretch = 150.0;       // last cell width over first cell width
  double tail_fraction = 1e-10; // certified tail mass relative to g0
};

struct MemoryGrid {
  std::vector<double> nodes;    // s_1 < ... < s_M
  std::vector<double> weights;  // cell widths s_i - s_{i-1}, with s_0 = 0
  double s_max = 0.0;
  MemoryScheme scheme = MemoryScheme::SgridGalerkin;
};

MemoryGrid make_grid(const MemoryKernel& kernel, int node_count, const MemoryConfig& config = {});
// integral of mu over the grid cells plus the exact tail beyond s_max
double grid_mass(const MemoryKernel& kernel, const MemoryGrid& grid);

// Discretized history of one temperature:
//   m' = dynamics m + drive T,  integral(mu d) = force . m,
//   history energy = varpi omega^2 (ell/2) m^T weight m,
//   Gamma = omega^2 (ell/2) m^T gamma m, computed independently of dynamics.
struct MemoryBlock {
  RMat dynamics;
  RVec drive;
  RVec force;
  RMat weight;
  RMat gamma;
  MemoryScheme scheme = MemoryScheme::PronyReduction;
  std::optional<MemoryGrid> grid;
};

MemoryBlock memory_block(const MemoryKernel& kernel, const MemoryConfig& config);

struct MemorySlot {
  int offset = 0;
  int size = 0;
  RMat gamma;  // unscaled Gamma form
  RVec force;  // integral of mu d as a functional of the memory states
};

struct ModeSystem {
  int n = 1;
  double omega = 0.0;
  ModelTag model = ModelTag::BGP;
  MemoryScheme scheme = MemoryScheme::PronyReduction;
  RMat generator;  // du/dt = generator u
  RMat weight;     // Gram matrix of the energy norm
  std::vector<std::string> labels;
  std::vector<MemorySlot> memory;
  double ell = 1.0;

  int dim() const noexcept { return static_cast<int>(labels.size()); }
  int index_of(const std::string& label) const;  // -1 when absent
};

double omega(double ell, int n);

// Reusable assembler: precomputes the memory blocks once for all modes.
class ModalAssembler {
 public:
  explicit ModalAssembler(SystemSpec spec, MemoryConfig config = {});

  ModeSystem assemble(int n) const;
  RMat weight_matrix(int n) const;
  const SystemSpec& spec() const noexcept { return spec_; }
  const MemoryConfig& config() const noexcept { return config_; }

 private:
  void build(int n, ModeSystem& out, bool check_modes) const;

  SystemSpec spec_;
  MemoryConfig config_;
  std::optional<MemoryBlock> block_g_;
  std::optional<MemoryBlock> block_h_;
};

ModeSystem assemble(const SystemSpec& spec, int n, const MemoryConfig& config = {});
RMat weight_matrix(const SystemSpec& spec, int n, const MemoryConfig& config = {});

struct WeightDiagnostics {
  double min_eig = 0.0;
  double max_eig = 0.0;
  bool singular = false;
  // displacement amplitudes (phi, psi, w) of the smallest eigenvector, scaled so phi = 1 when possible
  std::vector<double> null_displacement;
};

WeightDiagnostics weight_diagnostics(const SystemSpec& spec, int n, const MemoryConfig& config = {});

struct DissipationResult {
  double rate = 0.0;         // Re <G u, u>_W
  double norm_sq = 0.0;      // ||u||_W^2
  bool has_memory = false;
  double gamma = 0.0;        // sum of Gamma over memories, already scaled
  double identity_gap = 0.0; // |rate + varpi/2 Gamma| / ||u||^2
};

DissipationResult dissipation_rate(const ModeSystem& mode, const CVec& state, double varpi);

// largest eigenvalue of the Hermitian part of W^{1/2} G W^{-1/2}
double dissipativity_margin(const ModeSystem& mode);

// Matrix-market style text dump of generator and weight
std::string to_matrix_market(const ModeSystem& mode);

}  // namespace beamstab
