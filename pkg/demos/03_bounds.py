"""Word-error bounds for the E8 code and the large-power limit.

The first table lists the covering-sphere lower bound, the effective-sphere
estimate and the Tarokh sphere bound over SNR.  The second one fixes the noise
and radius and lets the power grow so the cone bound settles on the cylinder
value.
"""

import genie_lattice as gl
from genie_lattice import bounds

e8 = gl.e8()
P = 4.0 / 3.0
print(" snr   covering    effective   tarokh")
for snr_db in range(8, 21, 2):
    s2 = P / 10 ** (snr_db / 10)
    cov = gl.covering_bound(gl.BoundQuery(8, e8.covering_radius, P, s2)).value
    eff = gl.effective_estimate(gl.BoundQuery(8, e8.effective_radius, P, s2)).value
    tar = gl.tarokh_bound(8, e8.effective_radius, s2).value
    print(f"{snr_db:4d}  {cov:.3e}  {eff:.3e}  {tar:.3e}")

n, r = 8, 5.4512
asym = gl.asymptotic_bound(n, r, 1.0).value
print(f"\ncylinder limit for n={n}, r={r}: {asym:.6e}")
for P in (10.0, 1e2, 1e3, 1e4, 1e6):
    v = bounds.covering_bound(bounds.BoundQuery(n, r, P, 1.0)).value
    print(f"P = {P:8.0e}  cone bound {v:.6e}  ratio to limit {v / asym:.5f}")
