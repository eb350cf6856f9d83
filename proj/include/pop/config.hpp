#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pop/cheb.hpp"
#include "pop/engine.hpp"

namespace pop::config {

/// Malformed or schema-violating run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  std::size_t grid_points = 101;
  std::vector<std::size_t> N_list;
  std::vector<std::size_t> M_list;
  double noise_floor = 1e-14;  // reference pricer accuracy, for the slope fit
};

struct RunConfig {
  engine::ParamBinding binding;
  std::optional<cheb::Hyperrectangle> domain;
  std::optional<cheb::DegreeVector> degrees;
  engine::PricerSettings settings;
  StudyConfig study;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
};

/// Parses a JSON run configuration; unknown keys anywhere are rejected with ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace pop::config
