#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectree/error.hpp"
#include "spectree/tree.hpp"

namespace spectree {

enum class WeightFamily { constant, reciprocal_depth, geometric, custom };

inline std::string_view to_string(WeightFamily f) {
  switch (f) {
    case WeightFamily::constant: return "constant";
    case WeightFamily::reciprocal_depth: return "reciprocal_depth";
    case WeightFamily::geometric: return "geometric";
    case WeightFamily::custom: return "custom";
  }
  return "custom";
}

/// Strictly positive, finite weight per vertex. Zero weights are rejected
/// because every ratio lambda(v)/lambda(phi(v)) divides by them.
class Weight {
public:
  explicit Weight(std::vector<double> values, WeightFamily family = WeightFamily::custom,
                  double parameter = 0.0)
      : values_(std::move(values)), family_(family), parameter_(parameter) {
    if (values_.empty()) throw ValidationError("weight", "no values");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double x = values_[i];
      if (!std::isfinite(x) || !(x > 0.0))
        throw ValidationError("weight[" + std::to_string(i) + "]",
                              "value must be positive and finite, got " + std::to_string(x));
    }
  }

  double operator[](VertexId v) const { return values_[v.index]; }
  double at(VertexId v) const { return values_.at(v.index); }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  WeightFamily family() const noexcept { return family_; }
  /// Family parameter (c for constant and geometric weights).
  double parameter() const noexcept { return parameter_; }

  /// Copy with one value replaced; the result is a custom weight.
  Weight with_value(VertexId v, double value) const {
    auto copy = values_;
    copy.at(v.index) = value;
    return Weight(std::move(copy));
  }

private:
  std::vector<double> values_;
  WeightFamily family_;
  double parameter_;
};

inline Weight constant_weight(const Tree& t, double c) {
  if (!std::isfinite(c) || !(c > 0.0)) throw ValidationError("weight.c", "constant must be positive and finite");
  return Weight(std::vector<double>(t.size(), c), WeightFamily::constant, c);
}

/// lambda(v) = 1 / (1 + |v|)
inline Weight reciprocal_depth_weight(const Tree& t) {
  std::vector<double> values(t.size());
  for (std::uint32_t i = 0; i < t.size(); ++i)
    values[i] = 1.0 / (1.0 + static_cast<double>(t.depth(VertexId{i})));
  return Weight(std::move(values), WeightFamily::reciprocal_depth);
}

/// lambda(v) = c^|v|
inline Weight geometric_weight(const Tree& t, double c) {
  if (!std::isfinite(c) || !(c > 0.0)) throw ValidationError("weight.c", "ratio must be positive and finite");
  std::vector<double> values(t.size());
  for (std::uint32_t i = 0; i < t.size(); ++i)
    values[i] = std::pow(c, static_cast<double>(t.depth(VertexId{i})));
  return Weight(std::move(values), WeightFamily::geometric, c);
}

/// Custom weight from (vertex id, value) pairs; every vertex of `t` must be
/// assigned exactly once.
inline Weight load_weight(const Tree& t, const std::vector<std::pair<std::string, double>>& doc) {
  std::vector<double> values(t.size(), 0.0);
  std::vector<bool> assigned(t.size(), false);
  for (const auto& [id, value] : doc) {
    auto v = t.find(id);
    if (!v) throw ValidationError("weights." + id, "not a vertex of the tree");
    if (assigned[v->index]) throw ValidationError("weights." + id, "assigned twice");
    if (!std::isfinite(value) || !(value > 0.0))
      throw ValidationError("weights." + id, "value must be positive and finite, got " + std::to_string(value));
    values[v->index] = value;
    assigned[v->index] = true;
  }
  for (std::uint32_t i = 0; i < t.size(); ++i)
    if (!assigned[i]) throw ValidationError("weights." + t.label(VertexId{i}), "missing value for vertex");
  return Weight(std::move(values));
}

struct WeightBounds {
  double min;
  double max;
  VertexId argmin;
  VertexId argmax;
};

/// Smallest and largest weight over the stored vertices.
inline WeightBounds bounds(const Weight& w) {
  WeightBounds b{w.values()[0], w.values()[0], VertexId{0}, VertexId{0}};
  for (std::uint32_t i = 1; i < w.size(); ++i) {
    const double x = w.values()[i];
    if (x < b.min) b.min = x, b.argmin = VertexId{i};
    if (x > b.max) b.max = x, b.argmax = VertexId{i};
  }
  return b;
}

} // namespace spectree
