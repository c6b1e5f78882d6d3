// Locates the light-induced conical intersections of a harmonic/flat model with
// and without an axial rotation component and prints their seam gaps.

#include <cstdio>
#include <string>

#include "rotcav/molecule.hpp"

int main() {
  using namespace rotcav;
  DiatomicModel m;
  m.v_sigma = PotentialCurve::harmonic(1.0, 2.0);
  m.v_pi = PotentialCurve::constant(0.5);
  m.g0 = 0.05;
  m.cavity = {0.3, 0.0};
  m.r_min = 0.5;
  m.r_max = 4.0;
  for (const auto& rot : {RotationSpec::about_x(0.0), RotationSpec::from_components(0.07, 0.03, 0.1)}) {
    const auto res = find_licis(m, rot, m.r_min, m.r_max);
    std::printf("Omega_z = %.3f: %zu distinct r\n", rot.omega_z(), res.distinct_r().size());
    for (const auto& p : res.points)
      std::printf("  r = %.12f  theta = %.6f  branch = %-10s  gap = %.1e  seam max gap = %.1e\n", p.r, p.theta,
                  std::string(to_string(p.branch)).c_str(), p.gap, p.seam.max_gap);
    for (const auto& w : res.warnings) std::printf("  warning: %s\n", w.c_str());
  }
}
