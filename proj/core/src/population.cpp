#include "ratiometric/population.hpp"

#include <cmath>

#include "ratiometric/errors.hpp"

namespace ratiometric {

std::string to_string(CellClass c) {
  switch (c) {
    case CellClass::kA:
      return "A";
    case CellClass::kB:
      return "B";
    case CellClass::kC:
      return "C";
  }
  return "?";
}

CellClass classify(double lacI, double tetR) {
  if (tetR > 2.0 * lacI) return CellClass::kA;
  if (lacI > 2.0 * tetR) return CellClass::kB;
  return CellClass::kC;
}

CellClass classify(const CellState& cell) { return classify(cell.lacI, cell.tetR); }

PopulationSnapshot::PopulationSnapshot(double time, std::vector<IdentifiedCell> cells)
    : time_(time), cells_(std::move(cells)) {
  classes_.reserve(cells_.size());
  for (const auto& c : cells_) {
    const CellClass k = classify(c.state);
    classes_.push_back(k);
    switch (k) {
      case CellClass::kA:
        ++n_A_;
        break;
      case CellClass::kB:
        ++n_B_;
        break;
      case CellClass::kC:
        ++n_C_;
        break;
    }
  }
}

Ratios ratios(const PopulationSnapshot& snapshot) {
  if (snapshot.empty()) throw PopulationExtinct("ratios: population is empty");
  const auto n = static_cast<double>(snapshot.size());
  return {static_cast<double>(snapshot.n_A()) / n, static_cast<double>(snapshot.n_B()) / n};
}

Ratios ratios(std::span<const CellState> cells) {
  if (cells.empty()) throw PopulationExtinct("ratios: population is empty");
  std::size_t a = 0;
  std::size_t b = 0;
  for (const auto& c : cells) {
    const CellClass k = classify(c);
    a += k == CellClass::kA;
    b += k == CellClass::kB;
  }
  const auto n = static_cast<double>(cells.size());
  return {static_cast<double>(a) / n, static_cast<double>(b) / n};
}

double ErrorSignal::norm2() const { return std::hypot(e_A, e_B); }

double ErrorSignal::norm_inf() const { return std::max(std::abs(e_A), std::abs(e_B)); }

ErrorSignal errors(double r_A, double r_B, double r, double time) {
  return {(1.0 - r) - r_A, r - r_B, time};
}

ErrorSignal errors(const Ratios& rr, double r, double time) {
  return errors(rr.r_A, rr.r_B, r, time);
}

}  // namespace ratiometric
