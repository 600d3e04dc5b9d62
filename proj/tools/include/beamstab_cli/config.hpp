#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beamstab/modal.hpp"
#include "beamstab/model.hpp"
#include "json.hpp"

namespace beamstab::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct SweepBlock {
  double lambda_min = 100.0;
  double lambda_max = 1e4;
  int points = 17;
  int n_max = 16;
  bool full_range = false;
};

struct LowerBoundBlock {
  std::vector<int> n_list = {16, 64, 256};
};

struct DecayBlock {
  double t_min = 100.0;
  double t_max = 1e4;
  int points = 12;
  int n_max = 256;
  std::string kind = "auto";  // auto, exponential, algebraic
  bool log_spacing = true;
};

struct LimitBlock {
  std::vector<double> eps_list = {1e-1, 1e-2, 1e-3, 1e-4};
  std::optional<double> m;
};

struct CheckBlock {
  int n_max = 64;
  int states = 100;
  int lambda_modes = 8;
  double lambda_t_max = 100.0;
  std::uint64_t seed = 20240601;
};

struct OutputBlock {
  std::string dir = "out";
  bool csv = true;
  bool svg = false;
};

struct RunConfig {
  SystemSpec spec;
  MemoryConfig memory;
  SweepBlock sweep;
  LowerBoundBlock lowerbound;
  DecayBlock decay;
  LimitBlock limit;
  CheckBlock check;
  OutputBlock output;
  std::string config_hash;
};

MemoryKernel parse_kernel(const nlohmann::json& node, const std::string& where);
nlohmann::json kernel_to_json(const MemoryKernel& kernel);
RunConfig parse_config(const nlohmann::json& root);
RunConfig load_config(const std::string& path);
std::string fnv1a_hex(const std::string& text);

}  // namespace beamstab::cli
