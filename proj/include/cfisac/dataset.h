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

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cfisac/association.h"
#include "cfisac/grid.h"

namespace cfisac {

// ASNT container. All integers and floats little-endian; layout in
// docs/asnt_format.md.
inline constexpr char kAsntMagic[4] = {'A', 'S', 'N', 'T'};
inline constexpr std::uint32_t kAsntVersion = 1;
// G_sens is stored as [a_t][a_r][t].
inline constexpr std::uint32_t kSensLayoutTxRxTarget = 0;

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct RecordMeta {
  double nu = 0.0;
  double rho_th = 0.0;
  std::uint32_t k_tx = 0;
  std::uint32_t k_rx = 0;
  std::vector<std::uint32_t> c_rx;
  std::vector<std::uint32_t> n_rf;
  std::vector<double> mu;
  double u_comm_ref = 0.0;
  double u_sens_ref = 0.0;
  double objective = 0.0;
  double gap = 0.0;

  bool operator==(const RecordMeta&) const = default;
};

// One (inputs, labels) pair. sens_gain is held in solver order
// (a_t, t, a_r) and permuted on disk.
struct DatasetRecord {
  // Instance index under the dataset's master seed (header metadata).
  std::uint64_t instance_id = 0;
  Split split = Split::kTrain;
  Eigen::MatrixXd g_comm;               // n_ap x n_cu
  std::vector<Eigen::MatrixXd> s_comm;  // n_ap of n_cu x n_cu
  Grid3<double> sens_gain;              // n_ap x n_tg x n_ap
  double alpha = 0.0;
  std::vector<double> lambda_cu;
  std::vector<double> lambda_tg;
  RecordMeta meta;
  AssociationSolution labels;

  int n_ap() const { return static_cast<int>(g_comm.rows()); }
  int n_cu() const { return static_cast<int>(g_comm.cols()); }
  int n_tg() const { return static_cast<int>(lambda_tg.size()); }

  // Field-exact comparison (labels compare decisions only).
  bool operator==(const DatasetRecord& other) const;
  // Throws std::invalid_argument on inconsistent shapes.
  void validate() const;
};

DatasetRecord make_record(const AssociationProblem& problem,
                          const AssociationSolution& labels,
                          std::uint64_t instance_id);

// Rebuilds the problem the labels were solved for.
AssociationProblem problem_from_record(const DatasetRecord& record);

struct DatasetManifest {
  std::uint32_t version = kAsntVersion;
  std::uint64_t record_count = 0;
  std::uint64_t manifest_seed = 0;
  std::uint64_t config_hash = 0;
  std::uint32_t sens_layout = kSensLayoutTxRxTarget;
  std::string metadata_json = "{}";
  std::vector<Split> splits;

  std::size_t count(Split split) const;
};

// Shuffles record indices with the seed and cuts 80/10/10 (test takes the
// rounding remainder). A pure function of (n, seed).
std::vector<Split> assign_splits(std::size_t n, std::uint64_t manifest_seed);

// Writes the container and the sidecar <path>.manifest.json. Record splits
// are overwritten with assign_splits(records.size(), manifest_seed).
// Throws std::runtime_error on I/O failure.
DatasetManifest write_records(const std::string& path,
                              std::span<const DatasetRecord> records,
                              std::uint64_t manifest_seed,
                              std::uint64_t config_hash,
                              const std::string& metadata_json = "{}");

// Streaming reader. Throws FormatError for a bad magic, unknown version,
// truncation, checksum mismatch or trailing bytes.
class DatasetReader {
 public:
  explicit DatasetReader(const std::string& path,
                         std::optional<Split> split = std::nullopt);

  // Header fields; splits are filled as records are read.
  const DatasetManifest& header() const { return header_; }
  // Next record passing the split filter; false at the end of the file.
  bool next(DatasetRecord& record);

 private:
  bool read_one(DatasetRecord& record);

  std::ifstream in_;
  std::optional<Split> filter_;
  DatasetManifest header_;
  std::uint64_t consumed_ = 0;
};

std::vector<DatasetRecord> read_records(const std::string& path,
                                        std::optional<Split> split = std::nullopt);

std::string manifest_to_json(const DatasetManifest& manifest);

}  // namespace cfisac
