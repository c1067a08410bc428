#pragma once

#include <cmath>
#include <vector>

namespace optbench {

struct LayerShape {
  int rows = 0;
  int cols = 1;
  int size() const { return rows * cols; }
  bool operator==(const LayerShape&) const = default;
};

// Parameters as a list of flat per-layer arrays. Layer boundaries matter:
// LARS/LAMB compute trust ratios per layer.
struct ParamVector {
  std::vector<std::vector<double>> layers;

  static ParamVector zeros(const std::vector<LayerShape>& layout) {
    ParamVector p;
    p.layers.reserve(layout.size());
    for (const auto& s : layout) p.layers.emplace_back(s.size(), 0.0);
    return p;
  }

  static ParamVector zeros_like(const ParamVector& other) {
    ParamVector p;
    p.layers.reserve(other.layers.size());
    for (const auto& l : other.layers) p.layers.emplace_back(l.size(), 0.0);
    return p;
  }

  bool finite() const {
    for (const auto& l : layers)
      for (double x : l)
        if (!std::isfinite(x)) return false;
    return true;
  }

  int total_size() const {
    int n = 0;
    for (const auto& l : layers) n += static_cast<int>(l.size());
    return n;
  }

  bool same_shape(const ParamVector& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (layers[i].size() != other.layers[i].size()) return false;
    return true;
  }

  bool operator==(const ParamVector&) const = default;
};

inline double layer_norm(const std::vector<double>& l) {
  double s = 0.0;
  for (double x : l) s += x * x;
  return std::sqrt(s);
}

}  // namespace optbench
