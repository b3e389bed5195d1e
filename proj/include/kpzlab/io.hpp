#pragma once

// Persistence: append-only NDJSON for replica records, CSV for tables and
// summaries, a compact binary event-log format, all written through a
// temp-file + atomic-rename path so partial files never shadow results.

#include <kpzlab/asep.hpp>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpzlab {

// Writes lines to <path>.tmp and renames onto <path> at commit().
class AtomicFileWriter {
 public:
  explicit AtomicFileWriter(std::string path) : path_(std::move(path)), tmp_(path_ + ".tmp") {
    std::filesystem::create_directories(std::filesystem::path(path_).parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("io: cannot open " + tmp_);
  }
  ~AtomicFileWriter() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }
  std::ostream& stream() { return out_; }
  void line(const std::string& s) { out_ << s << '\n'; }
  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("io: write failed for " + tmp_);
    out_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_, tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

// Round-trip-exact float formatting shared by every writer, so reruns are
// byte-identical.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json replica_record(const std::string& config_hash, std::uint64_t seed, double T,
                                     const std::vector<double>& X, const std::vector<double>& Z,
                                     const std::vector<double>& H) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["T"] = T;
  j["X_grid"] = X;
  j["Z_values"] = Z;
  if (!H.empty()) j["H_values"] = H;
  return j;
}

// Count complete NDJSON records already present (resume support).
inline std::uint64_t count_ndjson_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::uint64_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

// CSV with a fixed header; one observation per row.
class CsvWriter {
 public:
  CsvWriter(std::string path, const std::vector<std::string>& header)
      : writer_(std::move(path)) {
    std::string h;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) h += ',';
      h += header[i];
    }
    writer_.line(h);
  }
  void row(const std::vector<std::string>& cells) {
    std::string r;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) r += ',';
      r += cells[i];
    }
    writer_.line(r);
  }
  void row_values(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_double(v));
    row(s);
  }
  void commit() { writer_.commit(); }

 private:
  AtomicFileWriter writer_;
};

// Binary event log. Framing, little-endian, repeated per event:
//   u64  time as IEEE-754 bit pattern
//   u8   event type (AsepEvent)
//   u32  site index
inline void write_event_log(const std::string& path, const std::vector<AsepEventRecord>& events) {
  AtomicFileWriter w(path);
  for (const auto& ev : events) {
    std::uint64_t tbits;
    static_assert(sizeof(tbits) == sizeof(ev.time));
    std::memcpy(&tbits, &ev.time, sizeof(tbits));
    const std::uint8_t ty = static_cast<std::uint8_t>(ev.type);
    const std::uint32_t site = static_cast<std::uint32_t>(ev.site);
    w.stream().write(reinterpret_cast<const char*>(&tbits), sizeof(tbits));
    w.stream().write(reinterpret_cast<const char*>(&ty), sizeof(ty));
    w.stream().write(reinterpret_cast<const char*>(&site), sizeof(site));
  }
  w.commit();
}

inline std::vector<AsepEventRecord> read_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  std::vector<AsepEventRecord> events;
  for (;;) {
    std::uint64_t tbits;
    std::uint8_t ty;
    std::uint32_t site;
    if (!in.read(reinterpret_cast<char*>(&tbits), sizeof(tbits))) break;
    if (!in.read(reinterpret_cast<char*>(&ty), sizeof(ty))) break;
    if (!in.read(reinterpret_cast<char*>(&site), sizeof(site))) break;
    AsepEventRecord ev;
    std::memcpy(&ev.time, &tbits, sizeof(tbits));
    ev.type = static_cast<AsepEvent>(ty);
    ev.site = static_cast<std::int32_t>(site);
    events.push_back(ev);
  }
  return events;
}

}  // namespace kpzlab
