#pragma once

#include <cstdint>
#include <vector>

#include "hexcover/hamiltonian.hpp"
#include "hexcover/instance.hpp"

namespace hexcover {

struct GenerationOptions {
  std::vector<Family> families = {Family::CompactConvex, Family::ElongatedConcave,
                                  Family::NarrowPassage};
};

// Samples polygon, tessellates at the sensor radius, removes obstacle cells
// without disconnecting the grid, places the base, and resamples until the
// instance is connected and passes the Hamiltonian audit.
AoiInstance generate_instance(const GenerationConfig& cfg, std::uint64_t seed,
                              const GenerationOptions& opts = {});

// Builds the whole corpus; instance i uses a seed derived from the master
// seed, so the output does not depend on `jobs`. Splits are assigned.
std::vector<AoiInstance> generate_corpus(const GenerationConfig& cfg, int jobs,
                                         const GenerationOptions& opts = {});

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

// 8:1:1 sizes; validation and test each get round(n / 10).
SplitSizes split_sizes(std::size_t n);

// Tags every instance with "train", "val" or "test" using a seeded
// permutation.
void split_corpus(std::vector<AoiInstance>& corpus, std::uint64_t seed);

std::vector<const AoiInstance*> select_split(const std::vector<AoiInstance>& corpus,
                                             std::string_view split);

}  // namespace hexcover
