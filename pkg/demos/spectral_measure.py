# Spectral measures of period-2 sequences: weight, atoms and the moment identity.
import numpy as np

from cgmvwalk.cmv import VerblunskySeq, build_cmv, cmv_power_entry
from cgmvwalk.limits import atom_mass_null_odd, mass_M
from cgmvwalk.opuc import laurent_basis
from cgmvwalk.spectral import caratheodory, measure_moment, point_masses, spectral_measure

# the Caratheodory function, closed form against the ratio of second- to first-kind values
seq = VerblunskySeq.null_even(0.5)
for z in (0.5, 0.3 + 0.6j, -0.8j):
    print(z, caratheodory(seq, z), caratheodory(seq, z, method="ratio"))

# atoms: one for null-odd, a pair for null-even
for a in (0.5, 0.3 + 0.3j, 0.6j):
    atoms = point_masses(VerblunskySeq.null_odd(a))
    print(f"null-odd {a}: atoms {atoms}, expected mass {atom_mass_null_odd(a) if a.real else 0:.6f}")
for b in (0.5, -0.5j, -0.5):
    atoms = point_masses(VerblunskySeq.null_even(b))
    print(f"null-even {b}: atoms {atoms}, M(b) = {mass_M(b):.6f}")

# the a.c. part lives on two bands; atoms sit in the gaps
mu = spectral_measure(VerblunskySeq.null_odd(0.5), G=2048)
support = mu.theta[mu.weight > 1e-8]
print("total mass:", mu.total, " a.c. mass:", mu.ac_mass)
print("band edges (deg):", np.degrees([support.min(), support.max()]).round(2))

# int z^t x_l conj(x_m) dmu against (C^t)_lm
basis = laurent_basis(mu.seq, 6)
C = build_cmv(mu.seq, 64)
for t, l, m in [(0, 2, 2), (1, 0, 0), (3, 1, 2), (7, 4, 0)]:
    print(t, l, m, measure_moment(mu, basis, t, l, m), cmv_power_entry(C, t, l, m))
