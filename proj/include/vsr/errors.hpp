#pragma once

#include <stdexcept>
#include <string>

namespace vsr {

// Error hierarchy. Everything user-facing derives from Error so the CLI can
// map failures to exit codes in one place.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Morphology spec string is syntactically broken (ragged rows, bad chars).
class MalformedSpec : public Error {
public:
  explicit MalformedSpec(const std::string& msg) : Error(msg) {}
};

// Grid parses but is not a usable body (empty or disconnected).
class InvalidBody : public Error {
public:
  explicit InvalidBody(const std::string& msg) : Error(msg) {}
};

// A cell index was used as a voxel handle but the cell is unoccupied.
class NotAVoxel : public Error {
public:
  explicit NotAVoxel(const std::string& msg) : Error(msg) {}
};

// Terrain parameters outside their legal ranges.
class InvalidTerrain : public Error {
public:
  explicit InvalidTerrain(const std::string& msg) : Error(msg) {}
};

// Mechanical state went non-finite. Carries when and where.
class SimulationDiverged : public Error {
public:
  SimulationDiverged(const std::string& msg, double sim_time, int node_index)
      : Error(msg), sim_time(sim_time), node_index(node_index) {}
  double sim_time = 0.0;
  int node_index = -1;
};

// Genotype length does not match what the controller configuration needs.
class GenotypeShapeError : public Error {
public:
  explicit GenotypeShapeError(const std::string& msg) : Error(msg) {}
};

// Statistics routine got an empty sample.
class InvalidSample : public Error {
public:
  explicit InvalidSample(const std::string& msg) : Error(msg) {}
};

// Evaluation protocol is internally inconsistent (e.g. transient >= duration).
class InvalidProtocol : public Error {
public:
  explicit InvalidProtocol(const std::string& msg) : Error(msg) {}
};

// Config file problem. Carries the offending key for diagnostics.
class ConfigError : public Error {
public:
  ConfigError(const std::string& key, const std::string& msg)
      : Error(key.empty() ? msg : key + ": " + msg), key(key) {}
  std::string key;
};

}  // namespace vsr
