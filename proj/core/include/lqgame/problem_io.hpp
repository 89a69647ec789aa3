#pragma once

#include <string>

#include "lqgame/mcsim.hpp"

namespace lqgame {

/// Simulation block of a problem file.
struct SimSettings {
  double dt = 1e-3;
  double horizon = 40.0;
  int paths = 4000;
  std::uint64_t seed = 1;
  bool antithetic = false;

  SimConfig to_config() const;
};

/// A problem file: the game data, the initial state and the simulation
/// settings, one self-contained JSON document.
///
/// Layout:
///   system:  A, B1, B2, C, D1, D2 as nested row arrays (B2/D2 optional)
///   cost:    Q, S1, S2, R11, R12, R22 (player-2 blocks optional)
///   forcing: optional b, sigma, q, rho1, rho2, each a list of
///            {coeff: [..], power: k, rate: a} exponential-polynomial terms
///   x0:      initial state
///   sim:     dt, horizon, paths, seed, antithetic
struct Problem {
  GameSpec spec;
  Vector x0;
  SimSettings sim;
};

/// Parses a problem document. Errors name the offending JSON path and,
/// for matrices, the row and column. `origin` labels the source in
/// messages (file name or "<string>").
Problem parse_problem(const std::string& text, const std::string& origin = "<string>");
Problem load_problem(const std::string& path);

/// Serialization is field-identical under a parse round trip.
std::string serialize_problem(const Problem& problem);

/// Saddle solutions embed in reports and are read back by the verify
/// command.
std::string serialize_saddle(const SaddleSolution& sol);
SaddleSolution parse_saddle(const std::string& text);

}  // namespace lqgame
