#include "thermovisc/sources.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace thermovisc {

namespace {

double gauss(const std::vector<double>& a, size_t off, const std::array<double, 2>& x) {
  const double w = a[off];
  const double dx = x[0] - a[off + 1];
  const double dy = a.size() > off + 2 ? x[1] - a[off + 2] : 0.0;
  return std::exp(-(dx * dx + dy * dy) / (w * w));
}

struct Arity {
  size_t lo, hi;
};

Arity arity(const std::string& k) {
  if (k == "constant") return {1, 1};
  if (k == "ramp") return {2, 2};
  if (k == "gaussian") return {3, 4};
  if (k == "product") return {4, 5};
  if (k == "sine" || k == "cosine") return {2, 2};
  throw std::invalid_argument("unknown preset '" + k + "'");
}

}  // namespace

double Preset::operator()(const std::array<double, 2>& x, double t) const {
  const auto& a = args;
  const double pi = std::numbers::pi;
  if (kind == "constant") return a[0];
  if (kind == "ramp") return a[0] + a[1] * t;
  if (kind == "gaussian") return a[0] * gauss(a, 1, x);
  if (kind == "product") return a[0] * (1.0 + a[1] * t) * gauss(a, 2, x);
  if (kind == "sine") return a[0] * std::sin(a[1] * pi * x[0]);
  if (kind == "cosine") return a[0] * std::cos(a[1] * pi * x[0]);
  throw std::invalid_argument("unknown preset '" + kind + "'");
}

std::string Preset::str() const {
  std::ostringstream os;
  os << std::setprecision(17) << kind;
  for (double v : args) os << ' ' << v;
  return os.str();
}

Preset parse_preset(const std::string& text) {
  std::istringstream is(text);
  Preset p;
  if (!(is >> p.kind)) throw std::invalid_argument("empty preset");
  p.args.clear();
  std::string tok;
  while (is >> tok) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size()) throw std::invalid_argument("preset '" + text + "': bad number '" + tok + "'");
    p.args.push_back(v);
  }
  const Arity ar = arity(p.kind);
  if (p.args.size() < ar.lo || p.args.size() > ar.hi)
    throw std::invalid_argument("preset '" + text + "': wrong number of arguments");
  if ((p.kind == "gaussian" && !(p.args[1] > 0.0)) || (p.kind == "product" && !(p.args[2] > 0.0)))
    throw std::invalid_argument("preset '" + text + "': width must be positive");
  return p;
}

}  // namespace thermovisc
