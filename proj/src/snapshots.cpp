#include "eekd/snapshots.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace eekd {

using nlohmann::json;

void validate_snapshot_set(const SnapshotSet& set) {
  if (set.empty()) throw ConfigError("snapshot set is empty");
  for (std::size_t i = 0; i < set.size(); ++i) {
    check_shapes(set[i].params, set[i].spec);
    if (!(set[i].spec == set.front().spec))
      throw DimensionError("snapshot " + std::to_string(i) + " has a different architecture");
    if (i > 0 && set[i].epoch <= set[i - 1].epoch)
      throw InvariantError("snapshot epochs must be strictly increasing");
  }
}

std::vector<int> snapshot_epochs(int total_epochs, int count) {
  if (count < 1) throw ConfigError("snapshot count must be >= 1");
  if (total_epochs < 1) throw ConfigError("total_epochs must be >= 1");
  if (count > total_epochs)
    throw ConfigError("cannot take " + std::to_string(count) + " snapshots from " +
                      std::to_string(total_epochs) + " epochs");
  std::vector<int> epochs;
  epochs.reserve(count);
  for (int i = 1; i <= count; ++i) {
    const long long num = 2LL * i * total_epochs + count;
    epochs.push_back(static_cast<int>(num / (2LL * count)));
  }
  return epochs;
}

namespace {

constexpr char kMagic[4] = {'E', 'E', 'K', 'D'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const std::string& in, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= std::uint64_t{static_cast<unsigned char>(in[offset + i])} << (8 * i);
  return static_cast<T>(v);
}

void put_f64(std::string& out, double value) { put_le(out, std::bit_cast<std::uint64_t>(value)); }

double get_f64(const std::string& in, std::size_t offset) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in, offset));
}

json spec_to_json(const MlpSpec& spec) {
  return {{"input_dim", spec.input_dim},
          {"hidden_dims", spec.hidden_dims},
          {"num_classes", spec.num_classes},
          {"activation", "relu"}};
}

MlpSpec spec_from_json(const json& j) {
  if (j.value("activation", "relu") != "relu") throw FormatError("unsupported activation");
  MlpSpec spec;
  spec.input_dim = j.at("input_dim").get<int>();
  spec.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  spec.num_classes = j.at("num_classes").get<int>();
  spec.validate();
  return spec;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ck) {
  check_shapes(ck.params, ck.spec);
  json manifest = json::array();
  for (std::size_t l = 0; l < ck.params.size(); ++l) {
    const auto& d = ck.params[l];
    const std::string prefix = "layers." + std::to_string(l);
    manifest.push_back({{"name", prefix + ".weight"}, {"shape", {d.weight.rows(), d.weight.cols()}}});
    manifest.push_back({{"name", prefix + ".bias"}, {"shape", {d.bias.size()}}});
  }
  const json meta = {{"spec", spec_to_json(ck.spec)},
                     {"epoch", ck.epoch},
                     {"schedule_kind", ck.schedule_kind},
                     {"teacher_seed", ck.teacher_seed},
                     {"tensors", manifest}};
  const std::string meta_text = meta.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, meta_text.size());
  out += meta_text;
  for (const auto& d : ck.params) {
    for (Eigen::Index i = 0; i < d.weight.size(); ++i) put_f64(out, d.weight.data()[i]);
    for (Eigen::Index i = 0; i < d.bias.size(); ++i) put_f64(out, d.bias.data()[i]);
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not an EEKD checkpoint (bad magic)");
  if (bytes.size() < 16) throw CorruptionError("checkpoint header truncated");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kCheckpointVersion)
    throw VersionError("unsupported checkpoint version " + std::to_string(version) +
                       " (expected " + std::to_string(kCheckpointVersion) + ")");
  const auto meta_len = get_le<std::uint64_t>(bytes, 8);
  if (meta_len > bytes.size() - 16) throw CorruptionError("checkpoint metadata truncated");

  json meta;
  try {
    meta = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(meta_len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }

  Checkpoint ck;
  std::size_t expected_values = 0;
  try {
    ck.spec = spec_from_json(meta.at("spec"));
    ck.epoch = meta.at("epoch").get<int>();
    ck.schedule_kind = meta.at("schedule_kind").get<std::string>();
    ck.teacher_seed = meta.at("teacher_seed").get<std::uint64_t>();
    const auto& tensors = meta.at("tensors");
    if (tensors.size() != 2 * static_cast<std::size_t>(ck.spec.num_layers()))
      throw FormatError("tensor manifest does not match spec");
    for (int l = 0; l < ck.spec.num_layers(); ++l) {
      auto [in, out] = ck.spec.layer_dims(l);
      const auto wshape = tensors[2 * l].at("shape").get<std::vector<long long>>();
      const auto bshape = tensors[2 * l + 1].at("shape").get<std::vector<long long>>();
      if (wshape != std::vector<long long>{out, in} || bshape != std::vector<long long>{out})
        throw FormatError("tensor manifest shape mismatch at layer " + std::to_string(l));
      expected_values += static_cast<std::size_t>(out) * in + out;
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata schema: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint spec invalid: ") + e.what());
  }

  const std::size_t payload_offset = 16 + meta_len;
  const std::size_t payload_len = bytes.size() - payload_offset;
  if (payload_len != expected_values * sizeof(double))
    throw CorruptionError("checkpoint payload is " + std::to_string(payload_len) +
                          " bytes, manifest requires " +
                          std::to_string(expected_values * sizeof(double)));

  std::size_t offset = payload_offset;
  for (int l = 0; l < ck.spec.num_layers(); ++l) {
    auto [in, out] = ck.spec.layer_dims(l);
    Dense d{Mat(out, in), RowVec(out)};
    for (Eigen::Index i = 0; i < d.weight.size(); ++i, offset += 8) d.weight.data()[i] = get_f64(bytes, offset);
    for (Eigen::Index i = 0; i < d.bias.size(); ++i, offset += 8) d.bias.data()[i] = get_f64(bytes, offset);
    ck.params.push_back(std::move(d));
  }
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string bytes = encode_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_checkpoint(bytes);
}

std::uint64_t checksum(const DenseStack& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const double* p, Eigen::Index n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (Eigen::Index i = 0; i < n * static_cast<Eigen::Index>(sizeof(double)); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& d : params) {
    mix(d.weight.data(), d.weight.size());
    mix(d.bias.data(), d.bias.size());
  }
  return h;
}

}  // namespace eekd
