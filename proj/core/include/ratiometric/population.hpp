#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ratiometric/model.hpp"

namespace ratiometric {

enum class CellClass { kA, kB, kC };

[[nodiscard]] std::string to_string(CellClass c);

/// A: tetR > 2 lacI, B: lacI > 2 tetR, C: neither (ties included).
[[nodiscard]] CellClass classify(const CellState& cell);
[[nodiscard]] CellClass classify(double lacI, double tetR);

struct IdentifiedCell {
  std::uint64_t id = 0;
  CellState state;
};

struct Ratios {
  double r_A = 0.0;
  double r_B = 0.0;
};

/// Immutable view of the population at one sampling instant.
class PopulationSnapshot {
 public:
  PopulationSnapshot() = default;
  PopulationSnapshot(double time, std::vector<IdentifiedCell> cells);

  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] const std::vector<IdentifiedCell>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<CellClass>& classes() const { return classes_; }
  [[nodiscard]] std::size_t n_A() const { return n_A_; }
  [[nodiscard]] std::size_t n_B() const { return n_B_; }
  [[nodiscard]] std::size_t n_C() const { return n_C_; }
  [[nodiscard]] std::size_t size() const { return cells_.size(); }
  [[nodiscard]] bool empty() const { return cells_.empty(); }

 private:
  double time_ = 0.0;
  std::vector<IdentifiedCell> cells_;
  std::vector<CellClass> classes_;
  std::size_t n_A_ = 0;
  std::size_t n_B_ = 0;
  std::size_t n_C_ = 0;
};

/// Throws PopulationExtinct for an empty snapshot.
[[nodiscard]] Ratios ratios(const PopulationSnapshot& snapshot);

/// Ratios of an arbitrary list of cell states; throws PopulationExtinct when empty.
[[nodiscard]] Ratios ratios(std::span<const CellState> cells);

struct ErrorSignal {
  double e_A = 0.0;
  double e_B = 0.0;
  double time = 0.0;

  [[nodiscard]] double norm2() const;
  [[nodiscard]] double norm_inf() const;

  bool operator==(const ErrorSignal&) const = default;
};

/// r is the desired fraction of population B: e_B = r - r_B, e_A = (1 - r) - r_A.
[[nodiscard]] ErrorSignal errors(double r_A, double r_B, double r, double time = 0.0);
[[nodiscard]] ErrorSignal errors(const Ratios& rr, double r, double time = 0.0);

}  // namespace ratiometric
