#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "helmopt/assembly.hpp"
#include "helmopt/grid.hpp"
#include "helmopt/solve.hpp"

namespace helmopt {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Refraction indices. Each variant defines n^2; characteristic functions are
// closed (equal to 1 on the boundary of their set).

struct ConstantIndex {
  double value = 1.0;  // n, not n^2
};

/// n^2 = 2 + x1/|x|, with n^2(0) := 2.
struct AngularBackground {};

/// n^2 = 2 + x1/|x| + exp(-|x - (1, 0)|^2).
struct AngularPlusBump {};

/// n^2 = 1 + jump * chi_{|x - center| <= radius}.
struct PiecewiseDisk {
  Point center;
  double radius = 0.5;
  double jump = 1.0;
};

/// n^2 = 1 + jump * chi_{max(|x1 - c1|, |x2 - c2|) <= half_side}.
struct PiecewiseSquare {
  Point center;
  double half_side = 0.5;
  double jump = 1.0;
};

/// n^2 = 1 + chi_E(x) / (1 + |x - shift|), E = {|x1 - sin(x2)| <= 0.25}.
struct SinStrip {
  Point shift;
};

using RefractionKind = std::variant<ConstantIndex, AngularBackground, AngularPlusBump,
                                    PiecewiseDisk, PiecewiseSquare, SinStrip>;

double refraction_squared(const RefractionKind& n, Point x);
double refraction_index(const RefractionKind& n, Point x);
/// The constant value of n when the variant is ConstantIndex.
std::optional<double> constant_index(const RefractionKind& n);

struct GaussianTerm {
  Point center;
  double weight = 1.0;
};

/// f(x) = sum_c weight_c exp(-sigma |x - center_c|^2).
struct GaussianSum {
  std::vector<GaussianTerm> terms;
  double sigma = 30.0;
};

struct SquareTerm {
  Point center;
  double half_side = 0.5;
  double weight = 1.0;
};

/// f(x) = sum weight * chi_Q(x) over closed squares.
struct CharacteristicCombo {
  std::vector<SquareTerm> terms;
};

/// f = k^2 (n0^2 - n^2) u_i with incident plane wave u_i = exp(i k x1).
struct ScatteringInduced {
  RefractionKind background;
  RefractionKind medium;
};

using SourceKind = std::variant<GaussianSum, CharacteristicCombo, ScatteringInduced>;

std::complex<double> evaluate_source(const SourceKind& s, Point x, double k);
std::complex<double> incident_wave(Point x, double k);
std::complex<double> scattering_rhs(const RefractionKind& n0, const RefractionKind& n, double k,
                                    Point x);

/// Radius beyond which a GaussianSum term is below 1e-18 relative to its peak.
double gaussian_support_radius(double sigma);

struct ProblemSpec {
  std::string name;
  std::string description;
  double k = 1.0;
  RefractionKind refraction = ConstantIndex{};
  SourceKind source = GaussianSum{};
  double radius = 4.0;
  int m_theta = 21;
  int m_rho = 100;
  /// True when the solution is a scattered field and the total field adds exp(i k x1).
  bool scattering = false;
};

/// Names accepted by make_problem, in catalog order.
std::vector<std::string> list_problems();

/// Throws std::invalid_argument for unknown names.
ProblemSpec make_problem(const std::string& name);

MediumField make_medium(const ProblemSpec& p, const DiskGrid& grid);
SourceVector make_source(const ProblemSpec& p, const DiskGrid& grid);
DiskGrid make_grid(const ProblemSpec& p);
/// Grid, medium and source from a ProblemSpec; throws on invalid k or resolution.
DiscreteSystem make_system(const ProblemSpec& p, const AssemblyOptions& opts = {});

/// u = u_i + u_s at the nodes, with u_i = exp(i k rho cos theta).
SolutionField total_field(const SolutionField& scattered, double k, const DiskGrid& grid);

}  // namespace helmopt
