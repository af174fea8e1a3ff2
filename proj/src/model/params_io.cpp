#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "logrepair/error.hpp"
#include "logrepair/model/hgnn.hpp"

namespace logrepair {
namespace {

constexpr std::array<char, 4> kMagic{'S', 'G', 'R', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw Error(ErrorCode::FormatError, "truncated parameter file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

void write_params(std::ostream& out, const ModelParams& m) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, m.schema_hash);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.config.hidden_size));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.config.layers));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(m.config.aggregator));
  put<std::uint64_t>(out, m.config.seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.params.size()));
  for (const auto& p : m.params) {
    put<std::uint32_t>(out, p.id);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.cols()));
    for (double v : p.value.values()) put<double>(out, v);
  }
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing parameters");
}

ModelParams read_params(std::istream& in, const EncoderSet& enc) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::FormatError, "not a parameter file (bad magic)");
  }
  if (const auto version = get<std::uint32_t>(in); version != kVersion) {
    throw Error(ErrorCode::FormatError, "unsupported parameter format version " + std::to_string(version));
  }
  const auto hash = get<std::uint64_t>(in);
  if (hash != schema_hash(enc)) throw Error(ErrorCode::SchemaMismatch, "parameters were trained on another schema");
  ModelConfig cfg;
  cfg.hidden_size = get<std::uint32_t>(in);
  cfg.layers = get<std::uint32_t>(in);
  const auto agg = get<std::uint8_t>(in);
  if (agg > static_cast<std::uint8_t>(Aggregator::Max)) throw Error(ErrorCode::FormatError, "bad aggregator tag");
  cfg.aggregator = static_cast<Aggregator>(agg);
  cfg.seed = get<std::uint64_t>(in);
  if (cfg.hidden_size == 0 || cfg.layers == 0 || cfg.hidden_size > (1u << 16) || cfg.layers > 1024) {
    throw Error(ErrorCode::FormatError, "implausible model configuration");
  }

  ModelParams m = init_params(enc, cfg);
  const auto count = get<std::uint32_t>(in);
  if (count != m.params.size()) throw Error(ErrorCode::FormatError, "parameter count mismatch");
  for (auto& p : m.params) {
    const auto id = get<std::uint32_t>(in);
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    if (id != p.id || rows != p.value.rows() || cols != p.value.cols()) {
      throw Error(ErrorCode::FormatError, "parameter block " + std::to_string(id) + " has an unexpected shape");
    }
    for (double& v : p.value.values()) v = get<double>(in);
    if (!p.value.all_finite()) throw Error(ErrorCode::FormatError, "non-finite value in parameter " + p.name);
  }
  return m;
}

}  // namespace logrepair
