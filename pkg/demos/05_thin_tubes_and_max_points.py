"""
Why nodal domains cannot be arbitrarily thin
============================================

At the point where u attains its domain maximum, the hitting probability
obeys p_t <= 1 - exp(-lambda t).  A Brownian particle started on a flat
curve escapes a half-width c*sqrt(t) tube with probability at least
1 - c/sqrt(pi), so below a critical c the two bounds contradict each other
and no nodal domain can fit inside the tube.
"""

import math

import nodalheat as nh
from nodalheat.bounds import TubeSpec, max_point_survival, thin_domain_check
from nodalheat.stochastic import PathEnsembleConfig

model = nh.make_torus_eigenfunction(1, 1)
lam = model.eigenvalue
t = 1 / lam
field = nh.sample_field(model, nh.grid_for_model(model, 128))
mask = nh.label_nodal_domains(field)

cfg = PathEnsembleConfig(n_paths=50_000, dt=t / 300, seed=5)
rep = max_point_survival(model, mask, 1, t, cfg)
print(f"max point at {rep.inputs['x_star']}")
print(f"p_1/lambda there: mc {rep.constants['p_mc']:.4f}, "
      f"fd {rep.constants['p_fd']:.4f}  <=  bound {rep.references['bound']:.4f}")

print("\ntube escape at half-width c / sqrt(lambda):")
for c in (0.3, 0.4, 0.65205, 1.0):
    tube = TubeSpec(segment=((0.0, 0.25), (1.0, 0.25)),
                    half_width=c / math.sqrt(lam))
    trep = thin_domain_check(model, tube, cfg=cfg, grid_n=128)
    lower = trep.references["escape_lower_bound"]
    excl = "tube excluded" if trep.constants["exclusion_active"] else "no exclusion"
    print(f"  c = {c:7.5f}: escape mc {trep.constants['escape_mc']:.4f} "
          f">= bound {lower:.4f}  ->  {excl}")

rep04 = thin_domain_check(model, TubeSpec(segment=((0.0, 0.25), (1.0, 0.25)),
                                          half_width=0.4 / math.sqrt(lam)),
                          cfg=cfg, grid_n=128)
print(f"\ncritical c (literal form)   : {rep04.references['critical_c_literal']:.6f}")
print(f"critical c (variance 2t form): {rep04.references['critical_c_adjusted']:.6f}")
print(f"smallest half-width holding a whole domain here: "
      f"{rep04.constants['containment_halfwidth']:.4f} "
      f"(the quarter square needs 1/4)")
