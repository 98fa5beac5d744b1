#include "chlog/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "chlog/errors.hpp"

namespace chlog {
namespace {

template <typename UInt>
void put_le(std::vector<std::uint8_t>& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

void put_f64(std::vector<std::uint8_t>& out, double value) {
  put_le(out, std::bit_cast<std::uint64_t>(value));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename UInt>
  UInt get() {
    need(sizeof(UInt));
    UInt value = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
      value |= static_cast<UInt>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(UInt);
    return value;
  }

  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t count) const {
    if (remaining() < count) throw SnapshotError("snapshot header is truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Snapshot make_snapshot(const SimState& state, const SchemeConfig& config) {
  Snapshot snap;
  snap.n = static_cast<std::uint32_t>(state.u.grid().n());
  snap.step = static_cast<std::uint64_t>(state.step);
  snap.tau = config.tau;
  snap.nu = config.params.nu();
  snap.theta = config.params.theta();
  snap.theta_c = config.params.theta_c();
  const auto& v = state.u.values();
  snap.values.assign(v.data(), v.data() + v.size());
  return snap;
}

SimState to_state(const Snapshot& snapshot) {
  const auto grid = make_grid(static_cast<int>(snapshot.n));
  RealArray<double> values(snapshot.n, snapshot.n);
  std::memcpy(values.data(), snapshot.values.data(),
              snapshot.values.size() * sizeof(double));
  return make_state(Field(grid, std::move(values)),
                    static_cast<std::int64_t>(snapshot.step), snapshot.tau);
}

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snapshot) {
  if (snapshot.values.size() != std::size_t(snapshot.n) * snapshot.n) {
    throw SnapshotError("snapshot holds " + std::to_string(snapshot.values.size()) +
                        " values, expected n^2 = " +
                        std::to_string(std::size_t(snapshot.n) * snapshot.n));
  }
  std::vector<std::uint8_t> out;
  out.reserve(kSnapshotHeaderSize + snapshot.values.size() * 8);
  out.insert(out.end(), kSnapshotMagic, kSnapshotMagic + kSnapshotMagicSize);
  put_le(out, kSnapshotVersion);
  put_le(out, snapshot.n);
  put_le(out, snapshot.step);
  put_f64(out, snapshot.tau);
  put_f64(out, snapshot.nu);
  put_f64(out, snapshot.theta);
  put_f64(out, snapshot.theta_c);
  for (double v : snapshot.values) put_f64(out, v);
  return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSnapshotMagicSize ||
      std::memcmp(bytes.data(), kSnapshotMagic, kSnapshotMagicSize) != 0) {
    throw SnapshotError("bad magic: not a CHLOG1 snapshot");
  }
  Reader in(bytes.subspan(kSnapshotMagicSize));
  const auto version = in.get<std::uint16_t>();
  if (version != kSnapshotVersion) {
    throw SnapshotError("unsupported snapshot version " + std::to_string(version) +
                        " (expected " + std::to_string(kSnapshotVersion) + ")");
  }
  Snapshot snap;
  snap.n = in.get<std::uint32_t>();
  snap.step = in.get<std::uint64_t>();
  snap.tau = in.get_f64();
  snap.nu = in.get_f64();
  snap.theta = in.get_f64();
  snap.theta_c = in.get_f64();
  const std::size_t expected = std::size_t(snap.n) * snap.n * 8;
  if (in.remaining() != expected) {
    throw SnapshotError("payload length mismatch: " + std::to_string(in.remaining()) +
                        " bytes for n = " + std::to_string(snap.n) +
                        " (expected " + std::to_string(expected) + ")");
  }
  snap.values.resize(std::size_t(snap.n) * snap.n);
  for (double& v : snap.values) v = in.get_f64();
  return snap;
}

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path) {
  const auto bytes = encode_snapshot(snapshot);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotError("write failed for " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace chlog
