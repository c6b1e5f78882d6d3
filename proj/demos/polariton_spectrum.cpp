// Prints the XY-rotation ensemble spectrum from the closed form, the arrowhead
// solver and the dense lab-frame matrix for a few ensemble sizes.

#include <cstdio>

#include "rotcav/analytic.hpp"
#include "rotcav/arrowhead.hpp"
#include "rotcav/atom_cavity.hpp"

int main() {
  using namespace rotcav;
  const CavitySpec cav{1.0, 0.05};
  const auto rot = RotationSpec::in_plane(0.3, 0.2);
  std::printf("%4s %12s %12s %12s %14s %14s\n", "N", "lower", "middle", "upper", "arrow vs dense", "dense dim");
  for (int n : {1, 2, 5, 20}) {
    const auto closed = spectrum_xy(cav, rot, n).branch_energies;
    auto arrow = eigensolve_arrowhead(build_ensemble(cav, rot, {n})).eigenvalues;
    arrow.insert(arrow.end(), n, cav.omega_c);
    const auto dense = eigenvalues_dense(build_ensemble_lab(cav, rot, {n}));
    std::printf("%4d %12.8f %12.8f %12.8f %14.2e %14zu\n", n, closed[0], closed[1], closed[2],
                multiset_deviation(arrow, dense), dense.size());
  }
}
