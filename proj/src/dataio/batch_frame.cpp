#include "physaug/batch_frame.hpp"

#include <bit>
#include <cstring>
#include <string>

#include <zlib.h>

#include "physaug/errors.hpp"

namespace physaug::dataio {

namespace {

class Writer {
 public:
  explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }

  void raw(std::span<const char> s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  void u16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v));
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) bytes_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::size_t size() const { return bytes_.size(); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw FrameError(FrameErrorKind::Truncated, "frame truncated");
  }
  bool magic(const std::array<char, 4>& m) {
    need(4);
    const bool ok = std::memcmp(bytes_.data() + pos_, m.data(), 4) == 0;
    pos_ += 4;
    return ok;
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

Batch make_batch(std::span<const stda::SignalWindow> windows) {
  Batch b;
  b.count = static_cast<std::uint32_t>(windows.size());
  if (windows.empty()) return b;
  b.frames = static_cast<std::uint32_t>(windows.front().frames());
  b.channels = static_cast<std::uint32_t>(windows.front().channels());
  b.samples.reserve(static_cast<std::size_t>(b.count) * b.frames * b.channels);
  for (const auto& w : windows) {
    if (w.frames() != b.frames || w.channels() != b.channels) throw LengthError("windows in a batch must share T and C");
    for (Eigen::Index t = 0; t < w.data.rows(); ++t) {
      for (Eigen::Index c = 0; c < w.data.cols(); ++c) b.samples.push_back(static_cast<float>(w.data(t, c)));
    }
    b.labels.push_back(w.label);
  }
  return b;
}

std::vector<std::uint8_t> encode_batch(const Batch& batch) {
  const std::uint64_t n = static_cast<std::uint64_t>(batch.count) * batch.frames * batch.channels;
  if (batch.samples.size() != n) throw LengthError("batch sample count differs from N*T*C");
  if (batch.labels.size() != batch.count) throw LengthError("batch label count differs from N");
  Writer w(kBatchHeaderBytes + 4 * n + 4 * batch.count + 4);
  w.raw(kBatchMagic);
  w.u16(kBatchVersion);
  w.u32(batch.count);
  w.u32(batch.frames);
  w.u32(batch.channels);
  w.u16(kDtypeFloat32);
  for (float v : batch.samples) w.f32(v);
  for (std::uint32_t l : batch.labels) w.u32(l);
  const auto& bytes = w.bytes();
  const std::uint32_t crc = crc32_of(std::span(bytes).subspan(kBatchHeaderBytes));
  w.u32(crc);
  return w.take();
}

Batch decode_batch(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (!r.magic(kBatchMagic)) throw FrameError(FrameErrorKind::BadMagic, "batch frame: bad magic");
  const std::uint16_t version = r.u16();
  if (version != kBatchVersion) {
    throw FrameError(FrameErrorKind::BadVersion, "batch frame: unsupported version " + std::to_string(version));
  }
  Batch b;
  b.count = r.u32();
  b.frames = r.u32();
  b.channels = r.u32();
  const std::uint16_t dtype = r.u16();
  if (dtype != kDtypeFloat32) throw FrameError(FrameErrorKind::BadDtype, "batch frame: unknown dtype " + std::to_string(dtype));

  const std::uint64_t n = static_cast<std::uint64_t>(b.count) * b.frames * b.channels;
  const std::uint64_t body = 4 * n + 4 * static_cast<std::uint64_t>(b.count);
  if (body + 4 > r.remaining()) throw FrameError(FrameErrorKind::Truncated, "batch frame truncated");
  if (body + 4 < r.remaining()) throw FrameError(FrameErrorKind::Oversized, "batch frame has trailing bytes");

  const std::uint32_t expected = crc32_of(bytes.subspan(kBatchHeaderBytes, static_cast<std::size_t>(body)));
  b.samples.resize(static_cast<std::size_t>(n));
  for (auto& v : b.samples) v = r.f32();
  b.labels.resize(b.count);
  for (auto& l : b.labels) l = r.u32();
  if (r.u32() != expected) throw FrameError(FrameErrorKind::BadCrc, "batch frame: CRC mismatch");
  return b;
}

std::vector<std::uint8_t> encode_rewards(std::span<const RewardEntry> rewards) {
  Writer w(10 + 8 * rewards.size());
  w.raw(kRewardMagic);
  w.u16(kRewardVersion);
  w.u32(static_cast<std::uint32_t>(rewards.size()));
  for (const auto& e : rewards) {
    w.u32(e.index);
    w.f32(e.reward);
  }
  return w.take();
}

std::vector<RewardEntry> decode_rewards(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (!r.magic(kRewardMagic)) throw FrameError(FrameErrorKind::BadMagic, "reward frame: bad magic");
  const std::uint16_t version = r.u16();
  if (version != kRewardVersion) {
    throw FrameError(FrameErrorKind::BadVersion, "reward frame: unsupported version " + std::to_string(version));
  }
  const std::uint32_t m = r.u32();
  if (8 * static_cast<std::uint64_t>(m) != r.remaining()) {
    throw FrameError(8 * static_cast<std::uint64_t>(m) > r.remaining() ? FrameErrorKind::Truncated
                                                                       : FrameErrorKind::Oversized,
                     "reward frame: length does not match entry count");
  }
  std::vector<RewardEntry> out(m);
  for (auto& e : out) {
    e.index = r.u32();
    e.reward = r.f32();
  }
  return out;
}

std::vector<std::uint8_t> frame_message(std::span<const std::uint8_t> body) {
  if (body.size() > kMaxMessageBytes) throw FrameError(FrameErrorKind::Oversized, "message exceeds size limit");
  Writer w(4 + body.size());
  w.u32(static_cast<std::uint32_t>(body.size()));
  auto out = w.take();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<std::uint8_t> batch_message_body(std::uint32_t subpolicy, std::span<const std::uint8_t> frame) {
  Writer w(4 + frame.size());
  w.u32(subpolicy);
  auto out = w.take();
  out.insert(out.end(), frame.begin(), frame.end());
  return out;
}

BatchMessage decode_batch_message(std::span<const std::uint8_t> body) {
  Reader r(body);
  BatchMessage m;
  m.subpolicy = r.u32();
  m.batch = decode_batch(body.subspan(4));
  return m;
}

std::vector<std::vector<std::uint8_t>> split_messages(std::span<const std::uint8_t> bytes) {
  std::vector<std::vector<std::uint8_t>> out;
  Reader r(bytes);
  while (r.remaining() > 0) {
    const std::uint32_t len = r.u32();
    if (len > kMaxMessageBytes) throw FrameError(FrameErrorKind::Oversized, "message exceeds size limit");
    r.need(len);
    const auto start = bytes.begin() + static_cast<std::ptrdiff_t>(r.pos());
    out.emplace_back(start, start + len);
    r.skip(len);
  }
  return out;
}

}  // namespace physaug::dataio
