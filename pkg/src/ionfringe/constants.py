"""Physical constants (CODATA 2018, SI units)."""

# exact by definition since the 2019 SI redefinition
SPEED_OF_LIGHT = 2.99792458e8        # m/s
PLANCK = 6.62607015e-34              # J s
ELEMENTARY_CHARGE = 1.602176634e-19  # C
BOLTZMANN = 1.380649e-23             # J/K

HBAR = PLANCK / (2.0 * 3.141592653589793)   # 1.054571817e-34 J s

# measured
VACUUM_PERMITTIVITY = 8.8541878128e-12      # F/m
ATOMIC_MASS_UNIT = 1.66053906660e-27        # kg

# default ion species: 198Hg+ on its 194.2 nm S1/2 - P1/2 line
HG198_MASS_AMU = 197.967
HG198_WAVELENGTH = 194.2e-9          # m
HG198_LINEWIDTH_HZ = 70.0e6          # natural linewidth gamma/2pi
