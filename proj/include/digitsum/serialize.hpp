#pragma once

// JSON and CSV encodings of the report types. nlohmann::json keeps object
// keys sorted and prints doubles in shortest round-trip form, so the output
// is byte-stable for fixed inputs. Big integers are emitted as decimal
// strings.

#include <charconv>
#include <ostream>
#include <string>

#include "digitsum/clt.hpp"
#include "digitsum/enumerate.hpp"
#include "digitsum/exact_dist.hpp"
#include "digitsum/exponents.hpp"
#include "json.hpp"

namespace digitsum {

using Json = nlohmann::json;

/// Shortest decimal that round-trips to x (at most 17 significant digits).
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline Json to_json(const ExponentProfile& p) {
  return {
      {"base_pair", {p.q1, p.q2}},
      {"mu", p.mu},
      {"ell_fractions", p.ell_fractions},
      {"concentration_exponent", p.concentration_exponent},
      {"lambda", p.lambda},
      {"tail_exponent", p.tail_exponent},
      {"threshold_u", p.threshold_u},
      {"mean_gap", p.mean_gap},
      {"feasible", p.feasible},
  };
}

inline Json to_json(const TailBoundReport& r) {
  Json j = {
      {"prop", r.prop},
      {"parameter", r.parameter},
      {"exponent", r.exponent},
      {"lhs", to_string(r.lhs)},
      {"lhs_bits", bit_length(r.lhs)},
      {"log_lhs", r.log_lhs},
      {"log_rhs", r.log_rhs},
      {"verdict", to_string(r.verdict)},
  };
  if (r.prop == 3) {
    j["lambda"] = r.lambda;
  } else {
    j["target"] = r.target;
    j["selected_l2"] = r.selected_l2;
    j["selected_term"] = r.selected_term ? Json(to_string(*r.selected_term)) : Json();
  }
  return j;
}

inline Json to_json(const ThresholdScan& s) {
  return {
      {"prop", s.prop},
      {"lo", s.lo},
      {"hi", s.hi},
      {"threshold", s.threshold ? Json(*s.threshold) : Json()},
      {"holds", s.holds},
      {"fails", s.fails},
      {"indeterminate", s.indeterminate},
      {"worst_log_gap", s.worst_log_gap},
      {"last_log_gap", s.last_log_gap},
  };
}

inline Json to_json(const SectionFourParams& s) {
  return {
      {"N", s.N},
      {"K", s.K},
      {"H", s.H},
      {"hkn_holds", hkn_holds(s)},
  };
}

inline Json to_json(const ExactDistribution& d) {
  Json counts = Json::array();
  for (const auto& c : d.counts) counts.push_back(to_string(c));
  return {{"base", d.base}, {"length", d.length}, {"counts", counts}};
}

inline Json histogram_json(const Histogram& h) {
  Json out = Json::array();
  for (std::size_t i = 0; i < kHistSize; ++i) {
    if (h[i] != 0) out.push_back({static_cast<int>(i) + kHistMin, h[i]});
  }
  return out;
}

inline Json to_json(const Predicate& p) {
  Json j = {{"kind", p.name()}};
  if (p.kind == Predicate::Kind::within_u) j["u"] = p.u;
  if (p.kind == Predicate::Kind::diff_in) {
    j["a"] = p.a;
    j["b"] = p.b;
  }
  return j;
}

/// wall_time is left out unless asked for so that repeated runs produce
/// identical bytes.
inline Json to_json(const CountReport& r, bool with_timing = false) {
  Json parts = Json::array();
  for (const auto& p : r.partitions) {
    parts.push_back({{"start", p.start}, {"end", p.end}, {"count", p.count}});
  }
  Json j = {
      {"limit", r.limit},
      {"predicate", to_json(r.predicate)},
      {"count", r.count},
      {"near_boundary", r.near_boundary},
      {"histogram", histogram_json(r.histogram)},
      {"partitions", parts},
      {"complete", r.complete},
  };
  if (with_timing) j["wall_time"] = r.wall_time;
  return j;
}

inline void write_csv(std::ostream& out, const ExactDistribution& d) {
  out << "m,count\n";
  for (std::size_t m = 0; m < d.counts.size(); ++m) out << m << ',' << to_string(d.counts[m]) << '\n';
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "diff,count\n";
  for (std::size_t i = 0; i < kHistSize; ++i) {
    if (h[i] != 0) out << static_cast<int>(i) + kHistMin << ',' << h[i] << '\n';
  }
}

}  // namespace digitsum
