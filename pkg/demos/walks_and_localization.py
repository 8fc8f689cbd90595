# Quarter-plane walks, the half-line CMV walk, and what localizes.
import numpy as np

from cgmvwalk.cmv import VerblunskySeq
from cgmvwalk.coin import canonical_coin, coin_for_b, random_paper_class_coin, verblunsky_b
from cgmvwalk.experiments import compare_report, half_line_profile
from cgmvwalk.limits import localizes_II, mass_M, nu_II, theorem3_mass, LimitParamsII
from cgmvwalk.walk import correspondence_residual, distribution, initial_state, step

# Type I with the canonical coin, first step from (0,0,R)
s = step(initial_state("I", (1, 0, 0, 0), 8), canonical_coin(0.5))
print(distribution(s)[:2, :2])

# norm over a long run with a random coin obeying the structural relation
coin = random_paper_class_coin(5)
s = initial_state("II", (0.0, 0.0), 206)
for _ in range(200):
    s = step(s, coin, (0.2, 0.4))
print("norm drift after 200 steps:", abs(s.norm2 - 1))

# Type II coin realizing b = 0.5
coin, gamma = coin_for_b(0.5)
print("b =", verblunsky_b(coin, gamma), " gamma =", gamma)

# the CMV matrix run as a walk keeps mass near the start when atoms exist
nu = nu_II(0.5)
prof = half_line_profile("II", 0.5, sites=4)
print("half-line profile:", prof.round(5), " ratios:", (prof / prof[0]).round(4), " nu^2k:", [nu ** (2 * k) for k in range(4)])
print("origin mass M^2 =", theorem3_mass(LimitParamsII(0.5), 0, 0), " M =", mass_M(0.5))

# the two Type II criteria disagree on part of the disk
for b in (0.5, -0.5j, 0.0, -0.5):
    print(b, localizes_II(b))

# walk vs CMV matrix on the folded diagonal sector, all readings tried
rep = correspondence_residual("I", canonical_coin(0.3), (0.0, 0.0), 32)
print(rep.best.label(), rep.best_residual, rep.verdict)

# one parameter, every layer at once
r = compare_report("II", -0.5j)
print({k: r["verdicts"][k] for k in ("atoms", "predicate", "half_line", "quarter_plane")})
print(r["limits"]["predicates"])
