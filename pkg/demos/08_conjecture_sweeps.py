"""
Conjecture sweeps: isoperimetry, global survival, ball intersection
===================================================================

Three report-only experiments scan for numerical counterexamples: the
heat-content isoperimetry ratio over a family of domains, the infimum of
the globally stitched wavelength-time hitting field, and the largest
relative ball overlap a domain admits at radius sqrt(t).
"""

import math

import numpy as np

import nodalheat as nh
from nodalheat.bounds import (ball_intersection_search, default_isoperimetry_family,
                              global_survival_field, isoperimetry_sweep)

family = default_isoperimetry_family(256)
rep = isoperimetry_sweep(family, n_steps=48)
ref = 2 / math.sqrt(math.pi)
print(f"isoperimetry ratio R = content / (boundary sqrt(t)); half-plane "
      f"constant {ref:.5f}")
print(f"  max over family: {rep.constants['max_ratio']:.5f}")
print(f"  square small-t : {rep.constants['square_ratio_small_t']:.5f}")
for chk in rep.checks:
    if chk.name.startswith("flat-limit"):
        print(f"  {chk.name:32s} {chk.detail}")

model = nh.make_torus_eigenfunction(2, 2)
grep = global_survival_field(model, nh.grid_for_model(model, 192))
print(f"\nglobal survival field (torus (2,2)): inf p_1/lambda = "
      f"{grep.constants['inf_p']:.5f} at "
      f"({grep.constants['inf_location_x']:.4f}, "
      f"{grep.constants['inf_location_y']:.4f})")
print(f"  congruent-domain minima spread: {grep.constants['minima_spread']:.2e}")

grid = nh.GridSpec(nx=256, ny=256)
sq = nh.label_nodal_domains(
    nh.indicator_field(grid, lambda x, y: np.ones_like(x, dtype=bool)))
brep = ball_intersection_search(sq, 1, t=0.0625, c1=0.5)
print(f"\nball search on the unit square at sqrt(t) = 0.25: "
      f"max |B & domain| / |B| = {brep.constants['max_overlap_ratio']:.4f}")
print(f"  content premise: {brep.checks[0].detail}")
