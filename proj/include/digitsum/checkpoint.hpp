#pragma once

// Append-only checkpoint for long enumeration runs.
//
// Line 1 is the job header: {"job":{"N":...,"predicate":...,"u":...,
// "a":...,"b":...},"version":1}. Every later line is one completed partition:
// {"count":...,"crc":"xxxxxxxx","end":...,"hist":[[d,c],...],"near":...,
// "start":...}. The crc is CRC-32 of the same record serialized without its
// "crc" field. Lines that fail to parse, fail the crc, leave [1, N] or
// overlap an earlier accepted record are dropped and their range is simply
// recomputed.

#include <boost/crc.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace digitsum {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JobSignature {
  std::uint64_t N = 0;
  Predicate predicate;

  nlohmann::json to_json() const {
    nlohmann::json job = {{"N", N}, {"predicate", predicate.name()}};
    job["u"] = predicate.kind == Predicate::Kind::within_u ? nlohmann::json(predicate.u) : nlohmann::json();
    if (predicate.kind == Predicate::Kind::diff_in) {
      job["a"] = predicate.a;
      job["b"] = predicate.b;
    }
    return {{"job", job}, {"version", kCheckpointVersion}};
  }
};

namespace detail {

inline std::string crc_hex(const std::string& text) {
  boost::crc_32_type crc;
  crc.process_bytes(text.data(), text.size());
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
  return buf;
}

inline nlohmann::json record_body(const RangeResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (std::size_t i = 0; i < kHistSize; ++i) {
    if (r.histogram[i] != 0) hist.push_back({static_cast<int>(i) + kHistMin, r.histogram[i]});
  }
  return {{"start", r.start}, {"end", r.end}, {"count", r.count}, {"near", r.near_boundary}, {"hist", hist}};
}

inline std::string record_line(const RangeResult& r) {
  auto body = record_body(r);
  const std::string crc = crc_hex(body.dump());
  body["crc"] = crc;
  return body.dump();
}

/// Parses one record line; nullopt when malformed or the crc does not match.
inline std::optional<RangeResult> parse_record(const std::string& line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("crc") || !j["crc"].is_string()) return std::nullopt;
  try {
    RangeResult r;
    r.start = j.at("start").get<std::uint64_t>();
    r.end = j.at("end").get<std::uint64_t>();
    r.count = j.at("count").get<std::uint64_t>();
    r.near_boundary = j.at("near").get<std::uint64_t>();
    for (const auto& e : j.at("hist")) {
      const int d = e.at(0).get<int>();
      if (d < kHistMin || d > kHistMax) return std::nullopt;
      r.histogram[static_cast<std::size_t>(d - kHistMin)] = e.at(1).get<std::uint64_t>();
    }
    if (crc_hex(record_body(r).dump()) != j["crc"].get<std::string>()) return std::nullopt;
    if (r.end < r.start || histogram_total(r.histogram) != r.end - r.start + 1) return std::nullopt;
    return r;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

class Checkpoint {
 public:
  /// Opens (or creates) the checkpoint at `path` for the given job. An
  /// existing file with a different job header is refused.
  Checkpoint(std::filesystem::path path, const JobSignature& sig) : path_(std::move(path)) {
    const auto header = sig.to_json();
    std::string content;
    if (std::filesystem::exists(path_)) {
      std::ifstream in(path_, std::ios::binary);
      if (!in) throw CheckpointError("cannot read checkpoint " + path_.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      content = ss.str();
    }
    std::istringstream lines(content);
    std::string line;
    bool have_header = false;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      if (!have_header) {
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw CheckpointError("unreadable checkpoint header in " + path_.string());
        if (j != header) {
          throw CheckpointError("checkpoint " + path_.string() + " belongs to a different job: " + j.dump());
        }
        have_header = true;
        continue;
      }
      auto rec = detail::parse_record(line);
      if (!rec || rec->start < 1 || rec->end > sig.N || overlaps(*rec)) {
        ++discarded_;
        continue;
      }
      spans_.emplace(rec->start, rec->end);
      done_.push_back(std::move(*rec));
    }
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw CheckpointError("cannot write checkpoint " + path_.string());
    if (!have_header) {
      out_ << header.dump() << '\n';
    } else if (!content.empty() && content.back() != '\n') {
      // Terminate a torn trailing line so the next record starts cleanly.
      out_ << '\n';
    }
    out_.flush();
  }

  const std::vector<RangeResult>& completed() const { return done_; }
  std::size_t discarded() const { return discarded_; }

  void append(const RangeResult& r) {
    out_ << detail::record_line(r) << '\n';
    out_.flush();
    if (!out_) throw CheckpointError("write to checkpoint " + path_.string() + " failed");
  }

 private:
  bool overlaps(const RangeResult& r) const {
    auto it = spans_.upper_bound(r.end);
    if (it == spans_.begin()) return false;
    --it;  // last span starting at or before r.end
    return it->second >= r.start;
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<RangeResult> done_;
  std::map<std::uint64_t, std::uint64_t> spans_;  // start -> end
  std::size_t discarded_ = 0;
};

}  // namespace digitsum
