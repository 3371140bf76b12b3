#pragma once

#include <string>
#include <vector>

#include "stablescat/capacity.hpp"
#include "stablescat/feynman_kac.hpp"
#include "stablescat/jump_functional.hpp"
#include "stablescat/potential.hpp"
#include "stablescat/scattering.hpp"
#include "stablescat/spectral.hpp"

namespace stablescat {

enum class SweepKind { semiclassical, small_eps, time_average, bracket, discreteness, capacity };

SweepKind parse_sweep_kind(const std::string& s);
std::string sweep_kind_name(SweepKind k);

struct SpectralBlock {
  int n_cells = 16;
  Boundary boundary = Boundary::neumann_reflected;
  double side = 1.0;
  bool levy_prefactor = false;
};

struct ScanBlock {
  double r = 0.0;  // <= 0: r(c) = min(1, (Cap(D) / (2c))^{1/alpha})
  double xi_min = 2.0;
  double xi_max = 32.0;
  int n_xi = 5;
};

struct CapacityBlock {
  std::string set = "ball:1";
  std::vector<int> cells{14, 18};
  int n_paths = 20000;
};

struct OutputBlock {
  std::string csv;
  bool plot = false;
};

/// One experiment read from an INI-style file with sections
/// [model] [potential] [jump] [mc] [sweep] [spectral] [scan] [capacity] [output].
struct ExperimentConfig {
  StableModel model;
  PotentialSpec potential;
  JumpFunctional jump;
  MCOptions mc;
  SweepKind sweep = SweepKind::semiclassical;
  std::vector<double> grid;
  /// Gamma route of the semiclassical and discreteness sweeps, with the time grid of the
  /// time-average route.
  GammaVariant route = GammaVariant::time_average;
  std::vector<double> t_grid{2.0, 4.0, 8.0, 16.0};
  SpectralBlock spectral;
  ScanBlock scan;
  CapacityBlock capacity;
  OutputBlock output;
};

/// Parses and validates; ConfigError carries the offending key and its line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Normalized "section.key = value" listing of every field; independent of comments,
/// ordering and number formatting in the source file.
std::string canonical_config(const ExperimentConfig& cfg);

/// SHA-256 of the canonical listing, hex.
std::string config_hash(const ExperimentConfig& cfg);

/// Git blob id: SHA-1 of "blob <size>\0" followed by the bytes, hex.
std::string git_blob_digest(const std::string& bytes);

std::string sha256_hex(const std::string& bytes);

}  // namespace stablescat
