/*
 * Copyright 2026 The tclsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tclsim/gateway.hpp"

namespace tclsim::gateway {

/// Append-only record log backing a gateway's local persistence.
///
/// On-disk format, little-endian, one record after another:
///   u32 payload_length | payload bytes | u32 crc32(payload)
/// Payload: u8 version | f64 timestamp | u16 len + device_id | u16 len +
/// sensor_id | f64 value | u8 reason.
///
/// A reader skips records whose checksum fails and stops (with a warning)
/// at a truncated tail; everything before the damage is recovered.
class LocalStore {
 public:
  struct ScanResult {
    std::vector<StoredRow> rows;  // sorted by (timestamp, sensor_id)
    int corrupt_skipped = 0;
    bool truncated_tail = false;
    std::vector<std::string> warnings;
  };

  /// In-memory store (the simulator default).
  LocalStore() = default;

  void append(const StoredRow& row);
  ScanResult scan() const;

  const std::string& bytes() const { return buf_; }
  std::size_t size_bytes() const { return buf_.size(); }

  /// Persists the raw log to a file (overwrites).
  void write_file(const std::filesystem::path& path) const;

  static ScanResult scan_file(const std::filesystem::path& path);
  static ScanResult scan_bytes(const std::string& bytes);

  static void append_record(std::string& buf, const StoredRow& row);

 private:
  std::string buf_;
};

}  // namespace tclsim::gateway
