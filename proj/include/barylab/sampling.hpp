#pragma once

// Search spaces for property checks: exhaustive alphabets for finite domains,
// deterministic grids plus seeded low-discrepancy points for numeric ones,
// and the evaluation budget shared by a check.

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "barylab/core.hpp"

namespace barylab {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;
inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

struct SearchConfig {
  /// Longest string examined (capped by the function's max arity).
  std::size_t max_len = 4;
  /// Random instances drawn after the grid sweep (numeric domains only).
  std::size_t samples = 10'000;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t budget = kDefaultBudget;
  unsigned jobs = 1;
  /// Longest string of the exhaustive grid sweep on numeric domains.
  std::size_t grid_len = 3;
  /// Seeded low-discrepancy points added to the grid for random instances.
  std::size_t lowdisc_points = 16;
  Tolerance tol;
};

/// The atoms swept exhaustively: all elements of a finite domain, or a fixed
/// grid of small values (sorted ascending) inside a numeric domain.
std::vector<Atom> core_alphabet(const DomainDesc& domain);

/// core_alphabet plus `cfg.lowdisc_points` points of a shifted Halton sequence
/// inside the domain window. Finite domains return their elements.
std::vector<Atom> sample_alphabet(const DomainDesc& domain, const SearchConfig& cfg);

/// The finite window [lo, hi] numeric sample points are drawn from.
std::pair<double, double> sample_window(const Interval& iv);

/// Generator for instance k of a sampled check; independent of scheduling.
std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t instance);

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);
Str random_string(std::mt19937_64& rng, const std::vector<Atom>& alphabet, std::size_t len);

/// Thrown inside a check once its evaluation budget is spent.
struct BudgetExhausted {};

class EvalBudget {
 public:
  explicit EvalBudget(std::uint64_t limit) : limit_(limit) {}

  void spend(std::uint64_t n = 1) {
    if (used_.fetch_add(n, std::memory_order_relaxed) + n > limit_) throw BudgetExhausted{};
  }
  std::uint64_t used() const { return used_.load(std::memory_order_relaxed); }

 private:
  std::uint64_t limit_;
  std::atomic<std::uint64_t> used_{0};
};

/// Scans indices [begin, end) and returns the smallest index for which `fn`
/// yields a value, together with that value. Work is spread over `jobs`
/// threads with a strided partition; the result does not depend on scheduling.
template <class T, class Fn>
std::optional<std::pair<std::size_t, T>> first_hit(std::size_t begin, std::size_t end, unsigned jobs,
                                                   Fn&& fn) {
  if (begin >= end) return std::nullopt;
  if (jobs <= 1 || end - begin < 2 * static_cast<std::size_t>(jobs)) {
    for (std::size_t i = begin; i < end; ++i) {
      if (std::optional<T> hit = fn(i)) return std::pair{i, std::move(*hit)};
    }
    return std::nullopt;
  }

  std::atomic<std::size_t> best{end};
  std::vector<std::optional<std::pair<std::size_t, T>>> found(jobs);
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = begin + w; i < end; i += jobs) {
            if (i > best.load(std::memory_order_relaxed)) return;
            if (std::optional<T> hit = fn(i)) {
              found[w] = std::pair{i, std::move(*hit)};
              std::size_t cur = best.load();
              while (i < cur && !best.compare_exchange_weak(cur, i)) {
              }
              return;
            }
          }
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
          best.store(begin);
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);

  std::optional<std::pair<std::size_t, T>> result;
  for (auto& f : found) {
    if (f && (!result || f->first < result->first)) result = std::move(f);
  }
  return result;
}

}  // namespace barylab
