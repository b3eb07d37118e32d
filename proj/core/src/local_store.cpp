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
#include "tclsim/local_store.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>

#include "tclsim/errors.hpp"

namespace tclsim::gateway {

namespace {

constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kMaxPayload = 1 << 20;  // sanity bound for the scanner

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Cursor {
 public:
  Cursor(const char* data, std::size_t size) : data_(data), size_(size) {}
  bool remaining(std::size_t n) const { return pos_ + n <= size_; }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint8_t>(data_[pos_]) |
                      (static_cast<std::uint16_t>(static_cast<std::uint8_t>(data_[pos_ + 1])) << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(data_[pos_++]); }
  double f64() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string str(std::size_t n) {
    std::string s(data_ + pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

 private:
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint32_t payload_crc(const char* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

}  // namespace

void LocalStore::append_record(std::string& buf, const StoredRow& row) {
  std::string payload;
  payload.reserve(32 + row.device_id.size() + row.sensor_id.size());
  payload.push_back(static_cast<char>(kVersion));
  put_f64(payload, row.timestamp_s);
  put_u16(payload, static_cast<std::uint16_t>(row.device_id.size()));
  payload += row.device_id;
  put_u16(payload, static_cast<std::uint16_t>(row.sensor_id.size()));
  payload += row.sensor_id;
  put_f64(payload, row.value);
  payload.push_back(static_cast<char>(row.reason));

  put_u32(buf, static_cast<std::uint32_t>(payload.size()));
  buf += payload;
  put_u32(buf, payload_crc(payload.data(), payload.size()));
}

void LocalStore::append(const StoredRow& row) { append_record(buf_, row); }

LocalStore::ScanResult LocalStore::scan() const { return scan_bytes(buf_); }

LocalStore::ScanResult LocalStore::scan_bytes(const std::string& bytes) {
  ScanResult result;
  Cursor cur(bytes.data(), bytes.size());
  while (cur.pos() < bytes.size()) {
    if (!cur.remaining(4)) {
      result.truncated_tail = true;
      result.warnings.push_back("truncated record header at offset " + std::to_string(cur.pos()));
      break;
    }
    const std::size_t header_at = cur.pos();
    const std::uint32_t len = cur.u32();
    if (len > kMaxPayload || !cur.remaining(len + 4)) {
      result.truncated_tail = true;
      result.warnings.push_back("truncated or oversized record at offset " +
                                std::to_string(header_at));
      break;
    }
    const std::size_t payload_at = cur.pos();
    cur.seek(payload_at + len);
    const std::uint32_t stored_crc = cur.u32();
    if (stored_crc != payload_crc(bytes.data() + payload_at, len)) {
      ++result.corrupt_skipped;
      result.warnings.push_back("checksum mismatch at offset " + std::to_string(header_at) +
                                "; record skipped");
      continue;
    }
    Cursor body(bytes.data() + payload_at, len);
    auto malformed = [&]() {
      ++result.corrupt_skipped;
      result.warnings.push_back("malformed record payload at offset " + std::to_string(header_at));
    };
    if (!body.remaining(1) || body.u8() != kVersion) {
      malformed();
      continue;
    }
    StoredRow row;
    if (!body.remaining(10)) { malformed(); continue; }
    row.timestamp_s = body.f64();
    std::size_t n = body.u16();
    if (!body.remaining(n + 2)) { malformed(); continue; }
    row.device_id = body.str(n);
    n = body.u16();
    if (!body.remaining(n + 9)) { malformed(); continue; }
    row.sensor_id = body.str(n);
    row.value = body.f64();
    row.reason = static_cast<StoreReason>(body.u8());
    result.rows.push_back(std::move(row));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const StoredRow& a, const StoredRow& b) {
                     if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
                     return a.sensor_id < b.sensor_id;
                   });
  return result;
}

void LocalStore::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open local store file for writing: " + path.string());
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw IoError("short write to local store file: " + path.string());
}

LocalStore::ScanResult LocalStore::scan_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open local store file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scan_bytes(bytes);
}

}  // namespace tclsim::gateway
