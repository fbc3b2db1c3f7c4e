#pragma once

// Seeded test functions defined in physical units, so the same probe is
// sampled on every resolution. Each probe is multiplied by a smooth window
// that vanishes within L/16 of the walls.

#include <cstdint>
#include <string>
#include <vector>

#include "grid.hpp"

namespace mslab {

enum class ProbeKind { kBump, kWave, kBlobs, kMollifiedCube };

struct Probe {
  std::string id;
  ProbeKind kind = ProbeKind::kBump;
  ComplexField field;
};

struct ProbeFamily {
  std::uint64_t seed = 0;
  std::vector<Probe> members;

  std::vector<ComplexField> fields() const;
};

// Member i has kind i mod 4 and depends only on (seed, i), so a larger
// family extends a smaller one.
ProbeFamily make_probes(const GridSpec& grid, std::uint64_t seed, std::size_t size = 64);

// Keeps only members of the given kinds.
ProbeFamily filter_probes(const ProbeFamily& family, const std::vector<ProbeKind>& kinds);

// Independent standard complex Gaussian values at every grid point.
ComplexField random_complex_field(const GridSpec& grid, std::uint64_t seed);

double probe_window(const GridSpec& grid, const Point& x);

const char* probe_kind_name(ProbeKind kind);

}  // namespace mslab
