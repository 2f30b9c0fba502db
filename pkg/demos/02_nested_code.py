"""A rate-2 E8 code with hypercube shaping.

Builds the code, shows its index ranges, and round-trips a batch of random
messages through encode and decode.
"""

import numpy as np

import genie_lattice as gl
from genie_lattice import nested

code = gl.code_for_rate(gl.e8(), 2.0)
print(nested.describe(code))

rng = np.random.default_rng(1)
B = nested.random_messages(code, rng, 5)
X = nested.encode_batch(code, B)
for b, x in zip(B, X):
    print(b, "->", np.round(x, 2))

back = nested.decode_index_batch(code, X + 4.0 * rng.integers(-2, 3, X.shape))
print("round trip through a shaping coset:", np.array_equal(back, B))
print("empirical power per dim:", round(gl.average_power(code, "empirical"), 4),
      " second moment:", gl.average_power(code, "second_moment"))

try:
    gl.code_for_rate(gl.e8(), 2.1)
except nested.ConfigError as exc:
    print("rate 2.1:", exc)
