#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lsr/types.hpp"

namespace lsr {

/// Leading record of every dataset file.
struct DatasetHeader {
  int latent_dim = 0;  // 0 for symbolic datasets (no latent coordinates yet)
  Metric metric = Metric::L1;
  std::uint64_t seed = 0;
  std::string generator;
};

struct LatentDataset {
  DatasetHeader header;
  std::vector<TransitionTuple> tuples;
};

struct SymbolicDataset {
  DatasetHeader header;
  std::vector<SymbolicTuple> tuples;
};

/// One JSON record per line; the first line is the header. Latent records
/// carry {z1, z2, a, u|null, class1|null, class2|null}; symbolic records
/// drop z1/z2 and must carry class labels.
void save_dataset(const LatentDataset& ds, const std::filesystem::path& file);
LatentDataset load_dataset(const std::filesystem::path& file);

void save_symbolic_dataset(const SymbolicDataset& ds, const std::filesystem::path& file);
SymbolicDataset load_symbolic_dataset(const std::filesystem::path& file);

/// Views over the tuples by action flag.
std::vector<TransitionTuple> filter_tuples(std::span<const TransitionTuple> tuples,
                                           bool action);

}  // namespace lsr
