#include "helmopt/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace helmopt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double angular_background(Point x) {
  const double r = std::hypot(x.x, x.y);
  return r == 0.0 ? 2.0 : 2.0 + x.x / r;
}

bool in_square(Point x, Point c, double half) {
  return std::max(std::abs(x.x - c.x), std::abs(x.y - c.y)) <= half;
}

GaussianSum gaussians(std::vector<GaussianTerm> terms) { return GaussianSum{std::move(terms), 30.0}; }

constexpr Point kPPlus{0.25, 0.0};
constexpr Point kPMinus{-0.25, 0.0};
constexpr Point kQPlus{0.0, 0.25};
constexpr Point kQMinus{0.0, -0.25};

}  // namespace

double refraction_squared(const RefractionKind& n, Point x) {
  return std::visit(
      Overloaded{
          [](const ConstantIndex& c) { return c.value * c.value; },
          [&](const AngularBackground&) { return angular_background(x); },
          [&](const AngularPlusBump&) {
            const double dx = x.x - 1.0;
            return angular_background(x) + std::exp(-(dx * dx + x.y * x.y));
          },
          [&](const PiecewiseDisk& d) {
            const bool in = std::hypot(x.x - d.center.x, x.y - d.center.y) <= d.radius;
            return 1.0 + (in ? d.jump : 0.0);
          },
          [&](const PiecewiseSquare& s) {
            return 1.0 + (in_square(x, s.center, s.half_side) ? s.jump : 0.0);
          },
          [&](const SinStrip& s) {
            if (std::abs(x.x - std::sin(x.y)) > 0.25) return 1.0;
            return 1.0 + 1.0 / (1.0 + std::hypot(x.x - s.shift.x, x.y - s.shift.y));
          },
      },
      n);
}

double refraction_index(const RefractionKind& n, Point x) {
  return std::sqrt(refraction_squared(n, x));
}

std::optional<double> constant_index(const RefractionKind& n) {
  if (const auto* c = std::get_if<ConstantIndex>(&n)) return c->value;
  return std::nullopt;
}

std::complex<double> incident_wave(Point x, double k) { return std::polar(1.0, k * x.x); }

std::complex<double> scattering_rhs(const RefractionKind& n0, const RefractionKind& n, double k,
                                    Point x) {
  const double jump = refraction_squared(n0, x) - refraction_squared(n, x);
  if (jump == 0.0) return 0.0;
  return k * k * jump * incident_wave(x, k);
}

std::complex<double> evaluate_source(const SourceKind& s, Point x, double k) {
  return std::visit(
      Overloaded{
          [&](const GaussianSum& g) -> std::complex<double> {
            double v = 0.0;
            for (const GaussianTerm& t : g.terms) {
              const double dx = x.x - t.center.x;
              const double dy = x.y - t.center.y;
              v += t.weight * std::exp(-g.sigma * (dx * dx + dy * dy));
            }
            return v;
          },
          [&](const CharacteristicCombo& c) -> std::complex<double> {
            double v = 0.0;
            for (const SquareTerm& t : c.terms) {
              if (in_square(x, t.center, t.half_side)) v += t.weight;
            }
            return v;
          },
          [&](const ScatteringInduced& s) {
            return scattering_rhs(s.background, s.medium, k, x);
          },
      },
      s);
}

double gaussian_support_radius(double sigma) { return std::sqrt(43.2 / sigma); }

std::vector<std::string> list_problems() {
  return {"zero", "f0",   "f1",   "f2",   "f3",   "f4",  "PVR1",
          "PVR2", "PCR1", "PCR2", "PCR3", "PCR4", "PW1", "PW2"};
}

ProblemSpec make_problem(const std::string& name) {
  ProblemSpec p;
  p.name = name;
  if (name == "zero") {
    p.description = "n = 1, f = 0";
    p.source = gaussians({});
  } else if (name == "f0") {
    p.description = "n = 1, f = -exp(-30|x|^2)";
    p.source = gaussians({{{0.0, 0.0}, -1.0}});
  } else if (name == "f1") {
    p.description = "n = 1, f = exp(-30|x|^2)";
    p.source = gaussians({{{0.0, 0.0}, 1.0}});
  } else if (name == "f2") {
    p.description = "n = 1, dipole along x1";
    p.source = gaussians({{kPPlus, 1.0}, {kPMinus, -1.0}});
  } else if (name == "f3") {
    p.description = "n = 1, dipole plus q+ monopole";
    p.source = gaussians({{kPPlus, 1.0}, {kPMinus, -1.0}, {kQPlus, 1.0}});
  } else if (name == "f4") {
    p.description = "n = 1, two dipoles";
    p.source = gaussians({{kPPlus, 1.0}, {kPMinus, -1.0}, {kQPlus, 1.0}, {kQMinus, -1.0}});
  } else {
    p.radius = 8.0;
    p.m_theta = 41;
    p.m_rho = 600;
    const Point p05{0.5, 0.5};
    if (name == "PVR1") {
      p.description = "n^2 = 2 + x1/|x| + bump, f = chi of the unit square at 0";
      p.refraction = AngularPlusBump{};
      p.source = CharacteristicCombo{{{{0.0, 0.0}, 0.5, 1.0}}};
    } else if (name == "PVR2") {
      p.description = "n^2 = 2 + x1/|x| + bump, f = difference of two unit squares";
      p.refraction = AngularPlusBump{};
      p.source = CharacteristicCombo{{{{0.5, 0.0}, 0.5, 1.0}, {{-0.5, 0.0}, 0.5, -1.0}}};
    } else if (name == "PCR1" || name == "PCR2" || name == "PCR3" || name == "PCR4") {
      p.scattering = true;
      const bool centered = (name == "PCR1" || name == "PCR3");
      const Point c = centered ? Point{0.0, 0.0} : p05;
      if (name == "PCR1" || name == "PCR2") {
        p.refraction = PiecewiseDisk{c, 0.5, 1.0};
        p.description = "scattering by a disk of radius 0.5";
      } else {
        p.refraction = PiecewiseSquare{c, 0.5, 1.0};
        p.description = "scattering by a square of side 1";
      }
      p.source = ScatteringInduced{ConstantIndex{1.0}, p.refraction};
    } else if (name == "PW1" || name == "PW2") {
      p.scattering = true;
      p.refraction = SinStrip{name == "PW1" ? Point{0.0, 0.0} : Point{0.0, 2.0}};
      p.description = "scattering by the unbounded strip |x1 - sin x2| <= 0.25";
      p.source = ScatteringInduced{ConstantIndex{1.0}, p.refraction};
    } else {
      throw std::invalid_argument("unknown problem '" + name + "'");
    }
  }
  return p;
}

DiskGrid make_grid(const ProblemSpec& p) { return build_disk_grid(p.radius, p.m_theta, p.m_rho); }

MediumField make_medium(const ProblemSpec& p, const DiskGrid& grid) {
  return sample_medium(
      grid, [&](double x, double y) { return refraction_squared(p.refraction, {x, y}); }, p.name);
}

SourceVector make_source(const ProblemSpec& p, const DiskGrid& grid) {
  return assemble_source(grid,
                         [&](double x, double y) { return evaluate_source(p.source, {x, y}, p.k); });
}

DiscreteSystem make_system(const ProblemSpec& p, const AssemblyOptions& opts) {
  const DiskGrid grid = make_grid(p);
  return make_discrete_system(grid, make_medium(p, grid), p.k, make_source(p, grid), opts);
}

SolutionField total_field(const SolutionField& scattered, double k, const DiskGrid& grid) {
  SolutionField out = scattered;
  for (int i = 0; i < grid.m_theta; ++i) {
    const double c = std::cos(grid.theta(i));
    for (int j = 0; j < grid.m_rho; ++j) {
      out.v(j, i) += std::polar(1.0, k * grid.rho_pos(j) * c);
    }
  }
  return out;
}

}  // namespace helmopt
