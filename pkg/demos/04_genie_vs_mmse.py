"""Genie-aided alpha search against one-shot MMSE decoding on the E8 code.

A short paired simulation over WER 1e-1 to 1e-3, with the effective-sphere
estimate alongside.  Budgets are small so this finishes in about a minute;
the acceptance tests run the full protocol.
"""

import genie_lattice as gl

code = gl.code_for_rate(gl.e8(), 2.0)
r_e = code.coding_lattice.effective_radius
print(" snr   alpha1      mmse        genie       effective  genie tries")
for snr_db in (13.0, 14.0, 15.0, 16.0):
    ch = gl.ChannelParams.from_snr_db(code.power_per_dim, snr_db)
    est = gl.simulate(code, ch, ("alpha1", "mmse", "genie"), max_trials=2 * 10 ** 5,
                      max_errors=300, seed=5)
    eff = gl.effective_estimate(gl.BoundQuery(8, r_e, code.power_per_dim, ch.sigma2)).value
    print(f"{snr_db:4.1f}  {est['alpha1'].wer:.3e}  {est['mmse'].wer:.3e}  "
          f"{est['genie'].wer:.3e}  {eff:.3e}  {est['genie'].mean_attempts:.2f}")
