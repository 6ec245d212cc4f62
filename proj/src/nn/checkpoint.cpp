#include "motiongen/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "motiongen/common.hpp"

namespace motiongen::nn {

namespace {

constexpr char kMagic[4] = {'M', 'G', 'C', '1'};

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
  }

  void u8(uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i64(int64_t v) {
    const uint64_t u = static_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((u >> (8 * i)) & 0xff));
  }
  void f64(double v) {
    const uint64_t u = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((u >> (8 * i)) & 0xff));
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void matrix(const Matrix& m) {
    u32(static_cast<uint32_t>(m.rows()));
    u32(static_cast<uint32_t>(m.cols()));
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  void check() {
    if (!out_) throw IoError("write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path + "' for reading");
  }

  uint8_t u8() { return static_cast<uint8_t>(get()); }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(get()) << (8 * i);
    return v;
  }
  int64_t i64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(get()) << (8 * i);
    return static_cast<int64_t>(v);
  }
  double f64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(get()) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::string str() {
    const uint32_t len = u32();
    std::string s(len, '\0');
    in_.read(s.data(), len);
    if (!in_) throw IoError("truncated checkpoint");
    return s;
  }
  Matrix matrix() {
    const uint32_t rows = u32();
    const uint32_t cols = u32();
    Matrix m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r) {
      for (uint32_t c = 0; c < cols; ++c) m(r, c) = f64();
    }
    return m;
  }

 private:
  int get() {
    const int c = in_.get();
    if (c == EOF) throw IoError("truncated checkpoint");
    return c;
  }
  std::ifstream in_;
};

}  // namespace

const Matrix& CheckpointData::tensor(const std::string& name) const {
  for (const auto& [n, m] : tensors) {
    if (n == name) return m;
  }
  throw ValidationError("checkpoint has no tensor named '" + name + "'");
}

const std::string& CheckpointData::meta_value(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) {
    throw ValidationError("checkpoint has no metadata key '" + key + "'");
  }
  return it->second;
}

void write_checkpoint(const std::string& path, const CheckpointData& data) {
  Writer w(path);
  for (char c : kMagic) w.u8(static_cast<uint8_t>(c));
  w.u32(1);  // format version
  w.u32(static_cast<uint32_t>(data.meta.size()));
  for (const auto& [k, v] : data.meta) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<uint32_t>(data.tensors.size()));
  for (const auto& [name, m] : data.tensors) {
    w.str(name);
    w.matrix(m);
  }
  w.u8(data.has_optimizer ? 1 : 0);
  if (data.has_optimizer) {
    if (data.optimizer_m.size() != data.tensors.size() ||
        data.optimizer_v.size() != data.tensors.size()) {
      throw ValidationError("optimizer moments must align with the tensor list");
    }
    w.i64(data.optimizer_step);
    for (size_t i = 0; i < data.tensors.size(); ++i) {
      w.matrix(data.optimizer_m[i]);
      w.matrix(data.optimizer_v[i]);
    }
  }
  w.str(data.rng_state);
  w.check();
}

CheckpointData read_checkpoint(const std::string& path) {
  Reader r(path);
  for (char c : kMagic) {
    if (r.u8() != static_cast<uint8_t>(c)) {
      throw IoError("'" + path + "' is not a checkpoint file");
    }
  }
  const uint32_t version = r.u32();
  if (version != 1) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  CheckpointData data;
  const uint32_t meta_count = r.u32();
  for (uint32_t i = 0; i < meta_count; ++i) {
    std::string k = r.str();
    data.meta[k] = r.str();
  }
  const uint32_t tensor_count = r.u32();
  for (uint32_t i = 0; i < tensor_count; ++i) {
    std::string name = r.str();
    data.tensors.emplace_back(std::move(name), r.matrix());
  }
  data.has_optimizer = r.u8() != 0;
  if (data.has_optimizer) {
    data.optimizer_step = r.i64();
    data.optimizer_m.reserve(tensor_count);
    data.optimizer_v.reserve(tensor_count);
    for (uint32_t i = 0; i < tensor_count; ++i) {
      data.optimizer_m.push_back(r.matrix());
      data.optimizer_v.push_back(r.matrix());
    }
  }
  data.rng_state = r.str();
  return data;
}

}  // namespace motiongen::nn
