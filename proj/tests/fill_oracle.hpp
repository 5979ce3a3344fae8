#pragma once

#include <cstdint>
#include <vector>

#include "peellab/step_law.hpp"

namespace peellab::testing {

// Exact distribution of (vertices, faces) for the Boltzmann fill of a hole,
// restricted to outcomes with faces <= face_cap, computed by the Tutte
// recursion on the finite-map kernel. Independent of the worklist sampler.
//
// Outcomes with f <= face_cap can only involve intermediate holes of
// half-perimeter <= start + face_cap * ... bounded through the vertex count:
// v = start + 1 + sum(k_i - 1), so capping v at vertex_cap closes the table.
class FillOracle {
public:
    FillOracle(const StepLaw& law, std::int64_t start, int face_cap, std::int64_t vertex_cap);

    // P(fill yields exactly (v, f)); zero outside the caps
    double probability(std::int64_t v, int f) const;

    // total mass inside the (v <= vertex_cap, f <= face_cap) grid
    double grid_mass() const;

    int face_cap() const { return face_cap_; }
    std::int64_t vertex_cap() const { return vertex_cap_; }

private:
    int face_cap_;
    std::int64_t vertex_cap_;
    std::int64_t start_;
    // table_[f][m][v] = P(fill of an m-hole gives v vertices and f faces,
    // all within the caps)
    std::vector<std::vector<std::vector<double>>> table_;
};

} // namespace peellab::testing
