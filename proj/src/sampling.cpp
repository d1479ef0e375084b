#include "barylab/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace barylab {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr std::array<std::uint64_t, 8> kPrimes{2, 3, 5, 7, 11, 13, 17, 19};

/// Shifted Halton coordinate in [0, 1).
double halton(std::uint64_t i, std::size_t dim, std::uint64_t seed) {
  const double shift = static_cast<double>(mix64(seed + dim) >> 11) * 0x1.0p-53;
  const double u = radical_inverse(i + 1, kPrimes[dim % kPrimes.size()]) + shift;
  return u - std::floor(u);
}

}  // namespace

std::pair<double, double> sample_window(const Interval& iv) {
  const bool lo_fin = std::isfinite(iv.lo);
  const bool hi_fin = std::isfinite(iv.hi);
  if (lo_fin && hi_fin) return {iv.lo, iv.hi};
  if (lo_fin) return {iv.lo, iv.lo + 4.0};
  if (hi_fin) return {iv.hi - 4.0, iv.hi};
  return {-4.0, 4.0};
}

std::vector<Atom> core_alphabet(const DomainDesc& domain) {
  switch (domain.kind()) {
    case DomainDesc::Kind::finite: return domain.elements();
    case DomainDesc::Kind::real_interval: {
      const Interval& iv = domain.interval();
      std::vector<double> pts;
      for (double v : {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
        if (iv.contains(v)) pts.push_back(v);
      }
      if (iv.lo_closed && std::isfinite(iv.lo)) pts.push_back(iv.lo);
      if (iv.hi_closed && std::isfinite(iv.hi)) pts.push_back(iv.hi);
      if (pts.size() < 3) {
        auto [lo, hi] = sample_window(iv);
        for (double t : {0.25, 0.5, 0.75}) {
          const double v = lo + (hi - lo) * t;
          if (iv.contains(v)) pts.push_back(v);
        }
      }
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      return {pts.begin(), pts.end()};
    }
    case DomainDesc::Kind::vector_space: {
      const std::size_t d = domain.dimension();
      std::vector<Atom> out;
      if (d <= 3) {
        const std::array<double, 4> coords{-1.0, 0.0, 1.0, 2.0};
        std::size_t total = 1;
        for (std::size_t i = 0; i < d; ++i) total *= coords.size();
        for (std::size_t k = 0; k < total; ++k) {
          Point p(d);
          std::size_t rest = k;
          for (std::size_t i = d; i-- > 0;) {
            p[i] = coords[rest % coords.size()];
            rest /= coords.size();
          }
          out.emplace_back(std::move(p));
        }
      } else {
        out.emplace_back(Point(d, 0.0));
        for (std::size_t i = 0; i < d; ++i) {
          for (double v : {-1.0, 1.0}) {
            Point p(d, 0.0);
            p[i] = v;
            out.emplace_back(std::move(p));
          }
        }
      }
      return out;
    }
  }
  return {};
}

std::vector<Atom> sample_alphabet(const DomainDesc& domain, const SearchConfig& cfg) {
  std::vector<Atom> out = core_alphabet(domain);
  if (domain.is_finite()) return out;
  const std::size_t target = out.size() + cfg.lowdisc_points;
  for (std::size_t i = 0; out.size() < target && i < 4 * cfg.lowdisc_points + 8; ++i) {
    if (domain.kind() == DomainDesc::Kind::real_interval) {
      const Interval& iv = domain.interval();
      auto [lo, hi] = sample_window(iv);
      const double v = lo + (hi - lo) * halton(i, 0, cfg.seed);
      if (iv.contains(v)) out.emplace_back(v);
    } else {
      const std::size_t d = domain.dimension();
      Point p(d);
      for (std::size_t k = 0; k < d; ++k) p[k] = -4.0 + 8.0 * halton(i, k, cfg.seed);
      out.emplace_back(std::move(p));
    }
  }
  return out;
}

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t instance) {
  return std::mt19937_64(mix64(seed ^ mix64(instance)));
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

Str random_string(std::mt19937_64& rng, const std::vector<Atom>& alphabet, std::size_t len) {
  Str s;
  s.reserve(len);
  for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[uniform_index(rng, alphabet.size())]);
  return s;
}

}  // namespace barylab
