"""Nearest-point quantizers for the built-in lattices.

Quantize a few random points, reduce them modulo the lattice, and print the
covering and effective radii that later feed the error bounds.
"""

import numpy as np

import genie_lattice as gl

rng = np.random.default_rng(0)

for lat in (gl.zn(4), gl.dn(4), gl.a2(), gl.e8(), gl.bw16()):
    n = lat.dimension
    y = rng.normal(0, 1.5, n)
    p = gl.quantize(lat, y)
    r = gl.mod_lattice(lat, y)
    print(f"{lat.name:5s} n={n:2d} vol={lat.volume:<8g} r_c={lat.covering_radius:.4f} "
          f"r_e={lat.effective_radius:.4f}")
    print(f"      |y - Q(y)| = {np.linalg.norm(y - p.coords):.4f}   "
          f"|y mod L| = {np.linalg.norm(r):.4f}")

# translating by a lattice vector moves the quantized point by the same vector
e8 = gl.e8()
y = rng.normal(0, 2, 8)
t = e8.generator @ rng.integers(-3, 4, 8)
shift = gl.quantize(e8, y + t).coords - gl.quantize(e8, y).coords
print("translation error:", np.abs(shift - t).max())
