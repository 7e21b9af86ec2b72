/// @file sources.hpp
/// @brief Named analytic presets for initial data and source terms.
#pragma once

#include <array>
#include <string>
#include <vector>

namespace thermovisc {

/// One of:
///   constant a            a
///   ramp a b              a + b t
///   gaussian a w x0 [y0]  a exp(-|x - x0|^2 / w^2)
///   product a b w x0 [y0] a (1 + b t) exp(-|x - x0|^2 / w^2)
///   sine a k              a sin(k pi x)
///   cosine a k            a cos(k pi x)
struct Preset {
  std::string kind = "constant";
  std::vector<double> args{0.0};

  double operator()(const std::array<double, 2>& x, double t = 0.0) const;
  std::string str() const;
};

Preset parse_preset(const std::string& text);

}  // namespace thermovisc
