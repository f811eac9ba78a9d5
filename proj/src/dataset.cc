// Copyright 2026 The cfisac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfisac/dataset.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

#include "cfisac/rng.h"
#include "json.hpp"

namespace cfisac {
namespace {

constexpr std::uint32_t kMaxPayload = 1u << 30;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  const std::vector<std::uint8_t>& buffer() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const std::uint8_t* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const std::uint8_t* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == data_.size(); }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (data_.size() - pos_ < n) throw FormatError("ASNT: record payload too short");
    const std::uint8_t* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_record(const DatasetRecord& r, Split split) {
  const int na = r.n_ap();
  const int nc = r.n_cu();
  const int nt = r.n_tg();
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(na));
  w.u32(static_cast<std::uint32_t>(nc));
  w.u32(static_cast<std::uint32_t>(nt));
  w.u8(static_cast<std::uint8_t>(split));
  w.u8(0);
  w.u8(0);
  w.u8(0);
  w.u64(r.instance_id);
  w.f64(r.alpha);
  for (double v : r.lambda_cu) w.f64(v);
  for (double v : r.lambda_tg) w.f64(v);
  for (int a = 0; a < na; ++a)
    for (int u = 0; u < nc; ++u) w.f64(r.g_comm(a, u));
  for (int a = 0; a < na; ++a)
    for (int u = 0; u < nc; ++u)
      for (int q = 0; q < nc; ++q) w.f64(r.s_comm[a](u, q));
  for (int at = 0; at < na; ++at)
    for (int ar = 0; ar < na; ++ar)
      for (int t = 0; t < nt; ++t) w.f64(r.sens_gain(at, t, ar));
  const RecordMeta& m = r.meta;
  w.f64(m.nu);
  w.f64(m.rho_th);
  w.u32(m.k_tx);
  w.u32(m.k_rx);
  for (std::uint32_t v : m.c_rx) w.u32(v);
  for (std::uint32_t v : m.n_rf) w.u32(v);
  for (double v : m.mu) w.f64(v);
  w.f64(m.u_comm_ref);
  w.f64(m.u_sens_ref);
  w.f64(m.objective);
  w.f64(m.gap);
  const AssociationSolution& l = r.labels;
  w.bytes(l.tau.data(), l.tau.size());
  w.bytes(l.x.data().data(), l.x.size());
  w.bytes(l.s.data(), l.s.size());
  w.bytes(l.y_tx.data().data(), l.y_tx.size());
  w.bytes(l.y_rx.data().data(), l.y_rx.size());
  return w.buffer();
}

DatasetRecord decode_record(std::span<const std::uint8_t> payload) {
  ByteReader rd(payload);
  DatasetRecord r;
  const std::uint32_t na = rd.u32();
  const std::uint32_t nc = rd.u32();
  const std::uint32_t nt = rd.u32();
  if (na > 4096 || nc > 4096 || nt > 4096)
    throw FormatError("ASNT: implausible record dimensions");
  const std::uint8_t split = rd.u8();
  if (split > 2) throw FormatError("ASNT: bad split byte");
  r.split = static_cast<Split>(split);
  rd.u8();
  rd.u8();
  rd.u8();
  r.instance_id = rd.u64();
  r.alpha = rd.f64();
  r.lambda_cu.resize(nc);
  for (double& v : r.lambda_cu) v = rd.f64();
  r.lambda_tg.resize(nt);
  for (double& v : r.lambda_tg) v = rd.f64();
  r.g_comm.resize(na, nc);
  for (std::uint32_t a = 0; a < na; ++a)
    for (std::uint32_t u = 0; u < nc; ++u) r.g_comm(a, u) = rd.f64();
  r.s_comm.assign(na, Eigen::MatrixXd(nc, nc));
  for (std::uint32_t a = 0; a < na; ++a)
    for (std::uint32_t u = 0; u < nc; ++u)
      for (std::uint32_t q = 0; q < nc; ++q) r.s_comm[a](u, q) = rd.f64();
  r.sens_gain = Grid3<double>(na, nt, na);
  for (std::uint32_t at = 0; at < na; ++at)
    for (std::uint32_t ar = 0; ar < na; ++ar)
      for (std::uint32_t t = 0; t < nt; ++t) r.sens_gain(at, t, ar) = rd.f64();
  RecordMeta& m = r.meta;
  m.nu = rd.f64();
  m.rho_th = rd.f64();
  m.k_tx = rd.u32();
  m.k_rx = rd.u32();
  m.c_rx.resize(na);
  for (auto& v : m.c_rx) v = rd.u32();
  m.n_rf.resize(na);
  for (auto& v : m.n_rf) v = rd.u32();
  m.mu.resize(na);
  for (double& v : m.mu) v = rd.f64();
  m.u_comm_ref = rd.f64();
  m.u_sens_ref = rd.f64();
  m.objective = rd.f64();
  m.gap = rd.f64();
  AssociationSolution& l = r.labels;
  l = AssociationSolution::zeros(static_cast<int>(na), static_cast<int>(nc),
                                 static_cast<int>(nt));
  for (auto& b : l.tau) b = rd.u8();
  for (auto& b : l.x.data()) b = rd.u8();
  for (auto& b : l.s) b = rd.u8();
  for (auto& b : l.y_tx.data()) b = rd.u8();
  for (auto& b : l.y_rx.data()) b = rd.u8();
  for (std::uint8_t b : l.canonical_bits())
    if (b > 1) throw FormatError("ASNT: label byte is not 0 or 1");
  if (!rd.done()) throw FormatError("ASNT: record payload has trailing bytes");
  l.objective = m.objective;
  l.gap = m.gap;
  l.optimal = m.gap == 0.0;
  return r;
}

void read_exact(std::ifstream& in, void* dst, std::size_t n, const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw FormatError(std::string("ASNT: truncated file while reading ") + what);
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split: " + std::string(name));
}

bool DatasetRecord::operator==(const DatasetRecord& o) const {
  if (instance_id != o.instance_id || split != o.split || alpha != o.alpha ||
      lambda_cu != o.lambda_cu || lambda_tg != o.lambda_tg || !(meta == o.meta) ||
      !(sens_gain == o.sens_gain) || s_comm.size() != o.s_comm.size())
    return false;
  if (g_comm.rows() != o.g_comm.rows() || g_comm.cols() != o.g_comm.cols() ||
      g_comm != o.g_comm)
    return false;
  for (std::size_t a = 0; a < s_comm.size(); ++a) {
    if (s_comm[a].rows() != o.s_comm[a].rows() || s_comm[a].cols() != o.s_comm[a].cols() ||
        s_comm[a] != o.s_comm[a])
      return false;
  }
  return labels.same_decisions(o.labels);
}

void DatasetRecord::validate() const {
  const std::size_t na = static_cast<std::size_t>(n_ap());
  const std::size_t nc = static_cast<std::size_t>(n_cu());
  const std::size_t nt = lambda_tg.size();
  auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("DatasetRecord: ") + what);
  };
  if (lambda_cu.size() != nc) fail("lambda_cu does not match G_comm");
  if (s_comm.size() != na) fail("S_comm needs one matrix per AP");
  for (const auto& m : s_comm)
    if (static_cast<std::size_t>(m.rows()) != nc ||
        static_cast<std::size_t>(m.cols()) != nc)
      fail("S_comm matrix shape");
  if (sens_gain.dim0() != na || sens_gain.dim1() != nt || sens_gain.dim2() != na)
    fail("G_sens shape");
  if (meta.c_rx.size() != na || meta.n_rf.size() != na || meta.mu.size() != na)
    fail("per-AP metadata length");
  if (labels.tau.size() != na || labels.s.size() != nt || labels.x.rows() != na ||
      labels.x.cols() != nc || labels.y_tx.rows() != na || labels.y_tx.cols() != nt ||
      labels.y_rx.rows() != na || labels.y_rx.cols() != nt)
    fail("label shapes");
}

DatasetRecord make_record(const AssociationProblem& p,
                          const AssociationSolution& labels,
                          std::uint64_t instance_id) {
  DatasetRecord r;
  r.instance_id = instance_id;
  r.g_comm = p.comm.gains;
  r.s_comm = p.comm.correlations;
  r.sens_gain = p.sens_gain;
  r.alpha = p.alpha;
  r.lambda_cu = p.lambda_cu;
  r.lambda_tg = p.lambda_tg;
  r.meta.nu = p.nu;
  r.meta.rho_th = p.rho_th;
  r.meta.k_tx = static_cast<std::uint32_t>(p.k_tx);
  r.meta.k_rx = static_cast<std::uint32_t>(p.k_rx);
  r.meta.c_rx.assign(p.c_rx.begin(), p.c_rx.end());
  r.meta.n_rf.assign(p.n_rf.begin(), p.n_rf.end());
  r.meta.mu = p.mu;
  r.meta.u_comm_ref = p.u_comm_ref;
  r.meta.u_sens_ref = p.u_sens_ref;
  r.meta.objective = labels.objective;
  r.meta.gap = labels.gap;
  r.labels = labels;
  r.validate();
  return r;
}

AssociationProblem problem_from_record(const DatasetRecord& r) {
  r.validate();
  AssociationProblem p;
  p.comm.gains = r.g_comm;
  p.comm.correlations = r.s_comm;
  p.sens_gain = r.sens_gain;
  p.lambda_cu = r.lambda_cu;
  p.lambda_tg = r.lambda_tg;
  p.alpha = r.alpha;
  p.nu = r.meta.nu;
  p.rho_th = r.meta.rho_th;
  p.k_tx = static_cast<int>(r.meta.k_tx);
  p.k_rx = static_cast<int>(r.meta.k_rx);
  p.c_rx.assign(r.meta.c_rx.begin(), r.meta.c_rx.end());
  p.n_rf.assign(r.meta.n_rf.begin(), r.meta.n_rf.end());
  p.mu = r.meta.mu;
  p.u_comm_ref = r.meta.u_comm_ref;
  p.u_sens_ref = r.meta.u_sens_ref;
  p.validate();
  return p;
}

std::size_t DatasetManifest::count(Split split) const {
  return static_cast<std::size_t>(std::count(splits.begin(), splits.end(), split));
}

std::vector<Split> assign_splits(std::size_t n, std::uint64_t manifest_seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng = derive_stream(manifest_seed, 0, "split");
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  const auto n_val = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n))));
  std::vector<Split> splits(n, Split::kTest);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train) splits[order[i]] = Split::kTrain;
    else if (i < n_train + n_val) splits[order[i]] = Split::kVal;
  }
  return splits;
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(m.metadata_json);
  } catch (const nlohmann::json::exception&) {
    meta = m.metadata_json;
  }
  nlohmann::json splits = nlohmann::json::array();
  for (Split s : m.splits) splits.push_back(std::string(to_string(s)));
  nlohmann::json root = {
      {"format", "ASNT"},
      {"version", m.version},
      {"record_count", m.record_count},
      {"manifest_seed", m.manifest_seed},
      {"config_hash", hex64(m.config_hash)},
      {"g_sens_layout", "a_t,a_r,t"},
      {"split_counts",
       {{"train", m.count(Split::kTrain)},
        {"val", m.count(Split::kVal)},
        {"test", m.count(Split::kTest)}}},
      {"splits", splits},
      {"metadata", meta},
  };
  return root.dump(2) + "\n";
}

DatasetManifest write_records(const std::string& path,
                              std::span<const DatasetRecord> records,
                              std::uint64_t manifest_seed, std::uint64_t config_hash,
                              const std::string& metadata_json) {
  DatasetManifest m;
  m.record_count = records.size();
  m.manifest_seed = manifest_seed;
  m.config_hash = config_hash;
  m.metadata_json = metadata_json;
  m.splits = assign_splits(records.size(), manifest_seed);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_records: cannot open " + path);
  ByteWriter head;
  head.bytes(kAsntMagic, 4);
  head.u32(m.version);
  head.u64(m.record_count);
  head.u64(m.manifest_seed);
  head.u64(m.config_hash);
  head.u32(m.sens_layout);
  head.u32(static_cast<std::uint32_t>(metadata_json.size()));
  head.bytes(metadata_json.data(), metadata_json.size());
  out.write(reinterpret_cast<const char*>(head.buffer().data()),
            static_cast<std::streamsize>(head.buffer().size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].validate();
    const std::vector<std::uint8_t> payload = encode_record(records[i], m.splits[i]);
    if (payload.size() > kMaxPayload) throw std::runtime_error("write_records: record too large");
    ByteWriter frame;
    frame.u32(static_cast<std::uint32_t>(payload.size()));
    frame.bytes(payload.data(), payload.size());
    frame.u32(crc_of(payload));
    out.write(reinterpret_cast<const char*>(frame.buffer().data()),
              static_cast<std::streamsize>(frame.buffer().size()));
  }
  out.flush();
  if (!out) throw std::runtime_error("write_records: write failed for " + path);
  out.close();

  std::ofstream side(path + ".manifest.json", std::ios::trunc);
  if (!side) throw std::runtime_error("write_records: cannot write manifest for " + path);
  side << manifest_to_json(m);
  if (!side) throw std::runtime_error("write_records: manifest write failed");
  return m;
}

DatasetReader::DatasetReader(const std::string& path, std::optional<Split> split)
    : in_(path, std::ios::binary), filter_(split) {
  if (!in_) throw std::runtime_error("DatasetReader: cannot open " + path);
  std::uint8_t fixed[4 + 4 + 8 + 8 + 8 + 4 + 4];
  read_exact(in_, fixed, sizeof(fixed), "header");
  if (std::memcmp(fixed, kAsntMagic, 4) != 0) throw FormatError("ASNT: bad magic");
  header_.version = get_u32(fixed + 4);
  if (header_.version != kAsntVersion)
    throw FormatError("ASNT: unsupported version " + std::to_string(header_.version));
  header_.record_count = get_u64(fixed + 8);
  header_.manifest_seed = get_u64(fixed + 16);
  header_.config_hash = get_u64(fixed + 24);
  header_.sens_layout = get_u32(fixed + 32);
  if (header_.sens_layout != kSensLayoutTxRxTarget)
    throw FormatError("ASNT: unknown G_sens layout code");
  const std::uint32_t meta_len = get_u32(fixed + 36);
  if (meta_len > kMaxPayload) throw FormatError("ASNT: metadata length out of range");
  header_.metadata_json.resize(meta_len);
  read_exact(in_, header_.metadata_json.data(), meta_len, "metadata");
}

bool DatasetReader::read_one(DatasetRecord& record) {
  if (consumed_ == header_.record_count) {
    if (in_.peek() != std::ifstream::traits_type::eof())
      throw FormatError("ASNT: trailing bytes after the last record");
    return false;
  }
  std::uint8_t len_bytes[4];
  read_exact(in_, len_bytes, 4, "record length");
  const std::uint32_t len = get_u32(len_bytes);
  if (len > kMaxPayload) throw FormatError("ASNT: record length out of range");
  std::vector<std::uint8_t> payload(len);
  read_exact(in_, payload.data(), len, "record payload");
  std::uint8_t crc_bytes[4];
  read_exact(in_, crc_bytes, 4, "record checksum");
  if (get_u32(crc_bytes) != crc_of(payload))
    throw FormatError("ASNT: checksum mismatch in record " + std::to_string(consumed_));
  record = decode_record(payload);
  header_.splits.push_back(record.split);
  ++consumed_;
  return true;
}

bool DatasetReader::next(DatasetRecord& record) {
  while (read_one(record)) {
    if (!filter_ || record.split == *filter_) return true;
  }
  return false;
}

std::vector<DatasetRecord> read_records(const std::string& path,
                                        std::optional<Split> split) {
  DatasetReader reader(path, split);
  std::vector<DatasetRecord> out;
  DatasetRecord r;
  while (reader.next(r)) out.push_back(std::move(r));
  return out;
}

}  // namespace cfisac
