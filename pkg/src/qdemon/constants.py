"""Physical constants (CODATA 2018 exact SI values)."""

PLANCK_H = 6.62607015e-34  # J s
BOLTZMANN_K = 1.380649e-23  # J / K
TWO_PI = 6.283185307179586

# default demon-memory temperature, K
DEMON_T0 = 0.072
