#pragma once

#include <cstdint>
#include <vector>

#include "fleam/data/dataset.hpp"

namespace fleam::data {

// Seeded generator of records following the UNSW NB-15 schema. The class-
// conditional feature distributions overlap enough that a classifier tops
// out in the mid-90s rather than memorizing the table; useful wherever the
// real capture files are not on disk.
struct SynthOptions {
  std::size_t rows = 50000;
  double attack_fraction = 0.40;
  // fraction of rows whose features are drawn from the opposite class,
  // bounding achievable accuracy away from 1
  double confusion = 0.04;
  std::uint64_t seed = 7;
};

std::vector<Record> synth_records(const SynthOptions& opt);

}  // namespace fleam::data
