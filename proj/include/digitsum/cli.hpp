#pragma once

// Command-line front end. run() parses argv, dispatches to one subcommand
// and writes exactly one report to `out`; diagnostics and progress go to
// `err`.
//
// Exit codes: 0 success, 1 a checked inequality did not hold (tails,
// params), 2 bad arguments or an unusable checkpoint.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "digitsum/serialize.hpp"

namespace digitsum::cli {

inline unsigned default_threads() {
  if (const char* env = std::getenv("DIGITSUM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact digit-sum distributions in bases 2 and 3, entropy exponents and enumeration", "digitsum"};
  app.require_subcommand(1);

  // digits
  std::uint64_t n = 0;
  unsigned base = 2;
  auto* digits = app.add_subcommand("digits", "Digit sum of one integer");
  digits->add_option("--n", n, "Integer")->required();
  digits->add_option("--base", base, "Base (2..256)")->required()->check(CLI::Range(2u, 256u));

  // dist
  unsigned length = 1;
  unsigned max_length = kDefaultMaxLength;
  bool dist_csv = false;
  auto* dist = app.add_subcommand("dist", "Exact digit-sum distribution over [0, base^length)");
  dist->add_option("--base", base, "Base")->required()->check(CLI::Range(2u, 256u));
  dist->add_option("--length", length, "Number of digit positions")->required()->check(CLI::PositiveNumber);
  dist->add_option("--max-length", max_length, "Refuse longer tables")->capture_default_str();
  dist->add_flag("--csv", dist_csv, "CSV (m,count) instead of JSON");

  // tails
  int prop = 3;
  long param = 1;
  double lambda = reference::lambda();
  std::optional<double> nu;
  bool scan = false;
  unsigned threads = default_threads();
  auto* tails = app.add_subcommand("tails", "Exact check of the binary tail (3) or ternary concentration (4) bound");
  tails->add_option("--prop", prop, "3 or 4")->required()->check(CLI::IsMember({3, 4}));
  tails->add_option("--param", param, "H for --prop 3, L for --prop 4")->required()->check(CLI::PositiveNumber);
  tails->add_option("--lambda", lambda, "Relative deviation (prop 3)");
  tails->add_option("--nu", nu, "Exponent: nu for prop 3, concentration exponent for prop 4");
  tails->add_flag("--scan", scan, "Scan parameters 1..param and report the empirical threshold");
  tails->add_option("--threads", threads, "Worker threads for --scan")->check(CLI::PositiveNumber);

  // optimize
  std::vector<unsigned> bases{2, 3};
  auto* optimize = app.add_subcommand("optimize", "Balancing constants for a pair of bases");
  optimize->add_option("--bases", bases, "q1,q2")->required()->delimiter(',')->expected(2);

  // params
  std::uint64_t limit = 0;
  auto* params = app.add_subcommand("params", "K and H below N and the power sandwich");
  params->add_option("--limit", limit, "N (>= 81)")->required();

  // count
  std::string mode = "equal";
  double u = reference::kThresholdU;
  int diff_min = 0, diff_max = 0;
  std::optional<std::string> checkpoint;
  std::uint64_t chunk = kDefaultChunk;
  bool count_csv = false, timing = false, quiet = false;
  auto* count = app.add_subcommand("count", "Count n in [1, limit] by s_3(n) - s_2(n)");
  count->add_option("--limit", limit, "N (<= 2^63)")->required();
  count->add_option("--mode", mode, "equal | within | diff")->check(CLI::IsMember({"equal", "within", "diff"}));
  count->add_option("--u", u, "within: |s3 - s2| <= u ln n")->capture_default_str();
  count->add_option("--min", diff_min, "diff: lower bound on s3 - s2");
  count->add_option("--max", diff_max, "diff: upper bound on s3 - s2");
  count->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  count->add_option("--chunk", chunk, "Partition size")->check(CLI::PositiveNumber);
  count->add_option("--checkpoint", checkpoint, "Checkpoint file (resumed when present)");
  count->add_flag("--csv", count_csv, "Histogram as CSV (diff,count)");
  count->add_flag("--timing", timing, "Include wall_time in the JSON report");
  count->add_flag("--quiet", quiet, "No progress on stderr");

  // clt
  double y = 1.0;
  double psi = 0.0;
  bool theorem1 = false;
  bool clt_csv = false;
  auto* clt = app.add_subcommand("clt", "Empirical central-limit and density fractions");
  clt->add_option("--limit", limit, "x")->required();
  clt->add_option("--base", base, "Base")->check(CLI::Range(2u, 256u));
  clt->add_option("--y", y, "Window half-width in standard deviations");
  clt->add_flag("--theorem1", theorem1, "Density of |s3 - s2 - c ln n| <= psi sqrt(ln n)");
  clt->add_option("--psi", psi, "Window constant for --theorem1");
  clt->add_flag("--csv", clt_csv, "CSV (x,b,y_or_psi,empirical,gaussian_reference)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*digits) {
      const DigitCounter c(base, n);
      emit(out, {{"n", n},
                 {"base", base},
                 {"digit_sum", c.digit_sum()},
                 {"digits", std::vector<unsigned>(c.digits().begin(), c.digits().end())}});
      return 0;
    }
    if (*dist) {
      const auto d = distribution(base, length, max_length);
      if (dist_csv) write_csv(out, d); else emit(out, to_json(d));
      return 0;
    }
    if (*tails) {
      if (scan) {
        const auto s = prop == 3 ? scan_prop3(1, param, lambda, nu.value_or(reference::kTailNu), threads)
                                 : scan_prop4(1, param, nu.value_or(reference::kConcentrationExponent), threads);
        emit(out, to_json(s));
        return s.threshold ? 0 : 1;
      }
      const auto r = prop == 3 ? verify_prop3(param, lambda, nu.value_or(reference::kTailNu))
                               : verify_prop4(param, nu.value_or(reference::kConcentrationExponent));
      emit(out, to_json(r));
      return r.verdict == Verdict::holds ? 0 : 1;
    }
    if (*optimize) {
      if (bases.size() != 2) throw UsageError("--bases expects q1,q2");
      const auto p = balance_threshold(bases[0], bases[1]);
      emit(out, to_json(p));
      return p.feasible ? 0 : 1;
    }
    if (*params) {
      const auto s = section4_params(limit);
      emit(out, to_json(s));
      return hkn_holds(s) ? 0 : 1;
    }
    if (*count) {
      Predicate pred = mode == "equal"    ? Predicate::equal()
                       : mode == "within" ? Predicate::within(u)
                                          : Predicate::diff_in(diff_min, diff_max);
      ParallelOptions opt;
      opt.workers = threads;
      opt.chunk = chunk;
      opt.checkpoint_path = checkpoint;
      auto last = std::chrono::steady_clock::now();
      if (!quiet) {
        opt.progress = [&err, &last](std::uint64_t covered, std::uint64_t total) {
          const auto now = std::chrono::steady_clock::now();
          if (covered != total && now - last < std::chrono::seconds(5)) return;
          last = now;
          err << "progress " << covered << '/' << total << " ("
              << format_double(100.0 * static_cast<double>(covered) / static_cast<double>(total)) << "%)\n";
        };
      }
      const auto rep = count_parallel(limit, pred, opt);
      if (!quiet) err << "wall_time " << format_double(rep.wall_time) << " s\n";
      if (count_csv) write_histogram_csv(out, rep.histogram); else emit(out, to_json(rep, timing));
      return 0;
    }
    if (*clt) {
      if (theorem1) {
        const double frac = theorem1_density(limit, psi);
        if (clt_csv) {
          out << "x,b,y_or_psi,empirical,gaussian_reference\n"
              << limit << ",2/3," << format_double(psi) << ',' << format_double(frac) << ",\n";
        } else {
          emit(out, {{"limit", limit}, {"psi", psi}, {"empirical", frac}});
        }
        return 0;
      }
      const double frac = empirical_clt(limit, base, y);
      const double ref = gaussian_window(y);
      if (clt_csv) {
        out << "x,b,y_or_psi,empirical,gaussian_reference\n"
            << limit << ',' << base << ',' << format_double(y) << ',' << format_double(frac) << ','
            << format_double(ref) << '\n';
      } else {
        emit(out, {{"limit", limit}, {"base", base}, {"y", y}, {"empirical", frac}, {"gaussian_reference", ref}});
      }
      return 0;
    }
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error, length_error, out_of_range
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  return 2;
}

}  // namespace digitsum::cli
