"""
The sqrt(t) law of heat content
===============================

The heat content of a domain (the integral of the boundary-hitting
probability p_t) grows like c sqrt(t) for small t, with
c = (2/sqrt(pi)) x boundary length under the variance-2t convention.
"""

import numpy as np

import nodalheat as nh
from nodalheat.heat import heat_content_curve

grid = nh.GridSpec(nx=512, ny=512)
field = nh.indicator_field(grid, lambda x, y: np.ones_like(x, dtype=bool))
mask = nh.label_nodal_domains(field)

times = np.logspace(-5, -4, 8)
curve = heat_content_curve(mask, 1, times, n_steps=64)

print("unit square, four unit walls:")
print(f"{'t':>12} {'content':>12} {'content/sqrt(t)':>16}")
for t, c, s in zip(curve.times, curve.contents, curve.running_slopes):
    print(f"{t:12.3e} {c:12.6f} {s:16.6f}")

ref = (2 / np.sqrt(np.pi)) * 4
print(f"\nfitted slope  {curve.slope:.5f}")
print(f"closed form   {ref:.5f}   (2/sqrt(pi) per unit wall length)")
print(f"relative gap  {(curve.slope / ref - 1) * 100:+.2f}%   r^2 = {curve.r_squared:.6f}")

# the slope constant is intrinsic: a torus nodal domain with perimeter 2
model = nh.make_torus_eigenfunction(1, 1)
tf = nh.sample_field(model, nh.grid_for_model(model, 512))
tm = nh.label_nodal_domains(tf)
tcurve = heat_content_curve(tm, 1, times, n_steps=64)
print(f"\nquarter-square nodal domain: slope {tcurve.slope:.5f} "
      f"vs (2/sqrt(pi)) x 2 = {ref / 2:.5f}")
