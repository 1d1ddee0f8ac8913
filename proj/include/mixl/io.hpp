#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "mixl/data.hpp"
#include "mixl/params.hpp"
#include "mixl/rng.hpp"

namespace mixl {

// Column names for the long-format choice CSV: one row per alternative per
// situation. The availability and group columns are optional in the file.
struct DatasetSchema {
  std::string individual_col = "individual_id";
  std::string group_col = "group";
  std::string situation_col = "situation";
  std::string alternative_col = "alt";
  std::string chosen_col = "chosen";
  std::string availability_col = "avail";
};

struct LoadStats {
  int raw_situations = 0;
  int kept_situations = 0;
  int dropped_situations = 0;
};

// Parse and validate a dataset. Situations are dropped (and counted) when no
// chosen row exists, the chosen row is unavailable, or fewer than two
// alternatives are available. Structural problems (missing columns, unknown
// alternatives, duplicate keys, non-numeric cells) throw DataError.
Dataset load_dataset(const std::string& path, const UtilitySpec& spec,
                     const DatasetSchema& schema = {}, LoadStats* stats = nullptr);

// Inverse of load_dataset; attribute values survive a round trip bit-exactly.
void save_dataset(const Dataset& dataset, const std::string& path,
                  const DatasetSchema& schema = {});

// Partition groups (not individuals) into train/validation/test by shuffling
// distinct group keys with the seed and cutting contiguously. Throws
// SpecError when the requested counts exceed the group count. A count of -1
// for train means "all remaining groups".
std::array<Dataset, 3> grouped_split(const Dataset& dataset, int train_groups,
                                     int validation_groups, int test_groups,
                                     std::uint64_t seed);

// Synthetic panel generator: latents from the truth's population law, choices
// from the implied logit probabilities. Attributes are standard normal unless
// a custom law is supplied. All alternatives available.
Dataset generate_synthetic(const UtilitySpec& spec, const ModelParams& truth,
                           int num_individuals, int situations_each, RngStream& rng,
                           const std::function<double(RngStream&)>& attribute_law = {});

// Model artifact round trip. load_model checks the artifact's spec hash
// against `spec` and validates parameter shapes.
void save_model(const PriorModel& model, const std::string& path);
PriorModel load_model(const std::string& path, const UtilitySpec& spec);

// Atomic text file write (temp + rename).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Shortest decimal form that parses back to the same double. All text
// outputs use this so identical results produce identical bytes.
std::string format_double(double v);

}  // namespace mixl
