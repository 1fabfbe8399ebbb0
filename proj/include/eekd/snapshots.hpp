#ifndef EEKD_SNAPSHOTS_HPP
#define EEKD_SNAPSHOTS_HPP

#include "eekd/mlp.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace eekd {

/// Frozen teacher parameters captured after `epoch` completed epochs.
struct Checkpoint {
  MlpSpec spec;
  DenseStack params;
  int epoch = 0;
  std::string schedule_kind;
  std::uint64_t teacher_seed = 0;
};

/// Intermediate teacher models, strictly ascending by epoch; the last is the final model.
using SnapshotSet = std::vector<Checkpoint>;

void validate_snapshot_set(const SnapshotSet& set);

/// round-half-up(i * E / M) for i = 1..M.
std::vector<int> snapshot_epochs(int total_epochs, int count);

/*
 * Checkpoint file layout (all integers little-endian):
 *
 *   "EEKD"                     4 bytes
 *   version                    u32 (= 1)
 *   metadata length            u64
 *   metadata                   UTF-8 JSON: spec, epoch, schedule_kind,
 *                              teacher_seed, tensors [{name, shape}]
 *   payload                    float64 tensors, concatenated in manifest order
 */
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::string& bytes);

/// FNV-1a over the raw parameter bytes; used to confirm teachers stay frozen.
std::uint64_t checksum(const DenseStack& params);

}  // namespace eekd

#endif  // EEKD_SNAPSHOTS_HPP
