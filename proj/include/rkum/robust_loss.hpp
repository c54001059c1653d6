#pragma once

// Robust loss families zeta(t) on t >= 0, the weight ratio
// phi(t) = zeta'(t) / t used by reweighting, and data-driven tuning.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rkum/error.hpp"
#include "rkum/kernels.hpp"

namespace rkum {

enum class LossKind { square, huber, hampel, tukey };

inline std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::square: return "square";
    case LossKind::huber: return "huber";
    case LossKind::hampel: return "hampel";
    case LossKind::tukey: return "tukey";
  }
  return "?";
}

inline LossKind parse_loss_kind(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "square") return LossKind::square;
  if (s == "huber") return LossKind::huber;
  if (s == "hampel") return LossKind::hampel;
  if (s == "tukey") return LossKind::tukey;
  throw DomainError("unknown loss '" + s + "'");
}

/// Percentiles (in percent) used to tune data-driven Hampel and Tukey losses.
struct TuningPercentiles {
  double hampel_c1 = 50.0;
  double hampel_c2 = 85.0;
  double hampel_c3 = 95.0;
  double tukey_c = 95.0;
};

/// A loss family with its constants. When `data_driven` is set the constants
/// are re-derived from the current errors at every use (see `tune`).
struct LossSpec {
  LossKind kind = LossKind::square;
  double c = 1.0;
  double c1 = 1.0, c2 = 2.0, c3 = 3.0;
  bool data_driven = false;
  TuningPercentiles percentiles{};

  static LossSpec square() { return {}; }
  static LossSpec huber(double c) {
    LossSpec s;
    s.kind = LossKind::huber;
    s.c = c;
    s.validate();
    return s;
  }
  static LossSpec hampel(double c1, double c2, double c3) {
    LossSpec s;
    s.kind = LossKind::hampel;
    s.c1 = c1;
    s.c2 = c2;
    s.c3 = c3;
    s.validate();
    return s;
  }
  static LossSpec tukey(double c) {
    LossSpec s;
    s.kind = LossKind::tukey;
    s.c = c;
    s.validate();
    return s;
  }
  static LossSpec data_driven_of(LossKind kind) {
    LossSpec s;
    s.kind = kind;
    s.data_driven = kind != LossKind::square;
    return s;
  }

  void validate() const {
    if (data_driven) return;
    switch (kind) {
      case LossKind::square:
        return;
      case LossKind::huber:
      case LossKind::tukey:
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("loss constant c must be positive");
        return;
      case LossKind::hampel:
        if (!(c1 > 0.0 && c1 < c2 && c2 < c3) || !std::isfinite(c3))
          throw DomainError("hampel constants must satisfy 0 < c1 < c2 < c3");
        return;
    }
  }
};

namespace detail {
inline void check_nonneg(double t) {
  if (!(t >= 0.0)) throw DomainError("loss argument must be nonnegative");
}
}  // namespace detail

/// zeta(t). Constants must be explicit (resolve data-driven specs first).
inline double loss(const LossSpec& s, double t) {
  detail::check_nonneg(t);
  switch (s.kind) {
    case LossKind::square:
      return 0.5 * t * t;
    case LossKind::huber:
      return t <= s.c ? 0.5 * t * t : s.c * t - 0.5 * s.c * s.c;
    case LossKind::hampel: {
      const double plateau = 0.5 * s.c1 * (s.c2 + s.c3 - s.c1);
      if (t <= s.c1) return 0.5 * t * t;
      if (t < s.c2) return s.c1 * t - 0.5 * s.c1 * s.c1;
      if (t < s.c3) {
        const double d = t - s.c3;
        return -s.c1 / (2.0 * (s.c3 - s.c2)) * d * d + plateau;
      }
      return plateau;
    }
    case LossKind::tukey: {
      if (t > s.c) return 1.0;
      const double u = 1.0 - (t / s.c) * (t / s.c);
      return 1.0 - u * u * u;
    }
  }
  return 0.0;
}

/// phi(t) = zeta'(t) / t, with phi(0) taken as the t -> 0 limit.
inline double weight_ratio(const LossSpec& s, double t) {
  detail::check_nonneg(t);
  switch (s.kind) {
    case LossKind::square:
      return 1.0;
    case LossKind::huber:
      return t <= s.c ? 1.0 : s.c / t;
    case LossKind::hampel:
      if (t <= s.c1) return 1.0;
      if (t < s.c2) return s.c1 / t;
      if (t < s.c3) return s.c1 * (s.c3 - t) / (t * (s.c3 - s.c2));
      return 0.0;
    case LossKind::tukey: {
      if (t > s.c) return 0.0;
      const double u = 1.0 - (t / s.c) * (t / s.c);
      return 6.0 / (s.c * s.c) * u * u;
    }
  }
  return 0.0;
}

/// Percentile with linear interpolation between order statistics
/// (h = (n - 1) q + 1, the usual "type 7" definition). `q` in [0, 100].
inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw DomainError("percentile of empty set");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Data-driven constants from a vector of current errors. Huber takes the
/// median; Hampel and Tukey take percentiles. A Hampel triple that collapses
/// (c1, c2, c3 not strictly increasing) falls back to the square loss, with a
/// warning, so that reweighting stays total.
inline LossSpec tune(LossKind kind, const Eigen::VectorXd& errors,
                     const TuningPercentiles& pct = {}) {
  if (errors.size() == 0) throw DomainError("cannot tune on empty errors");
  if (kind == LossKind::square) return LossSpec::square();
  std::vector<double> e(errors.data(), errors.data() + errors.size());
  const double med = detail::median_of(e);
  if (!(med > 0.0)) throw DomainError("cannot tune on degenerate errors");
  switch (kind) {
    case LossKind::huber: {
      LossSpec s = LossSpec::huber(med);
      s.percentiles = pct;
      return s;
    }
    case LossKind::hampel: {
      const double c1 = percentile(e, pct.hampel_c1);
      const double c2 = percentile(e, pct.hampel_c2);
      const double c3 = percentile(e, pct.hampel_c3);
      if (!(c1 > 0.0 && c1 < c2 && c2 < c3)) {
        warn("hampel tuning degenerate (c1, c2, c3 not increasing); using square loss");
        return LossSpec::square();
      }
      LossSpec s = LossSpec::hampel(c1, c2, c3);
      s.percentiles = pct;
      return s;
    }
    case LossKind::tukey: {
      LossSpec s = LossSpec::tukey(percentile(e, pct.tukey_c));
      s.percentiles = pct;
      return s;
    }
    case LossKind::square:
      break;
  }
  return LossSpec::square();
}

/// The explicit loss to apply to `errors`: the spec itself, or its tuned
/// version when data-driven.
inline LossSpec resolve_loss(const LossSpec& s, const Eigen::VectorXd& errors) {
  if (!s.data_driven) return s;
  return tune(s.kind, errors, s.percentiles);
}

/// Mean loss over the entries of `errors`.
inline double objective(const LossSpec& s, const Eigen::VectorXd& errors) {
  if (errors.size() == 0) throw DomainError("objective of empty error vector");
  double acc = 0.0;
  for (Index i = 0; i < errors.size(); ++i) acc += loss(s, errors(i));
  return acc / static_cast<double>(errors.size());
}

// JSON form used by the CLI: {"kind":"huber","c":null}; null constants mean
// data-driven tuning.
inline void to_json(nlohmann::json& j, const LossSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case LossKind::square:
      break;
    case LossKind::huber:
    case LossKind::tukey:
      j["c"] = s.data_driven ? nlohmann::json(nullptr) : nlohmann::json(s.c);
      break;
    case LossKind::hampel:
      for (auto [key, v] : {std::pair{"c1", s.c1}, {"c2", s.c2}, {"c3", s.c3}})
        j[key] = s.data_driven ? nlohmann::json(nullptr) : nlohmann::json(v);
      break;
  }
}

inline void from_json(const nlohmann::json& j, LossSpec& s) {
  s = LossSpec{};
  s.kind = parse_loss_kind(j.at("kind").get<std::string>());
  auto constant = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  switch (s.kind) {
    case LossKind::square:
      break;
    case LossKind::huber:
    case LossKind::tukey:
      if (auto c = constant("c")) s.c = *c;
      else s.data_driven = true;
      break;
    case LossKind::hampel: {
      auto c1 = constant("c1"), c2 = constant("c2"), c3 = constant("c3");
      if (c1 && c2 && c3) {
        s.c1 = *c1;
        s.c2 = *c2;
        s.c3 = *c3;
      } else if (!c1 && !c2 && !c3) {
        s.data_driven = true;
      } else {
        throw DomainError("hampel constants must be all explicit or all null");
      }
      break;
    }
  }
  s.validate();
}

}  // namespace rkum
