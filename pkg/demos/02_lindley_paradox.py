"""
The same data, opposite verdicts
================================

Hold the significance fixed at 5 sigma and let the width of the
alternative prior grow.  The p-value does not move, but the Bayes factor
in favour of the point null climbs in proportion to ``tau / sigma_tot``.
Past the crossover the posterior prefers the null even though a
frequentist would claim a discovery.
"""

import math

from jlparadox.bayes import (MixturePrior, bayes_factor_asymptotic, bayes_factor_exact, jl_crossover,
                             paradox_report)
from jlparadox.normal import Measurement

z = 5.0
m = Measurement(theta_hat=z, sigma_tot=1.0)

print(f"{'tau/sigma':>10} {'BF exact':>12} {'BF asym':>12} {'P(H0|x)':>9} disagree")
for r in (1e1, 1e3, 1e5, 1e6, 1e7):
    rep = paradox_report(m, MixturePrior.simple("normal", r, pi0=0.5))
    print(f"{r:>10.0e} {rep.exact.bf:>12.4e} {rep.asymptotic.bf:>12.4e} "
          f"{rep.exact.posterior_h0:>9.4f} {rep.disagreement}")

# The crossover where the Bayes factor is exactly 1.  For a normal prior
# and large tau it approaches exp(z^2 / 2).
r_star = jl_crossover(z, "normal")
print("crossover:", r_star, "  exp(z^2/2):", math.exp(z * z / 2))

# The prior family matters only through constants.
for family in ("normal", "uniform", "cauchy"):
    print(family, "crossover at z = 3:", jl_crossover(3.0, family))

# Replacing the point null by a narrow interval barely changes anything,
# as long as it stays far narrower than sigma_tot.
point = bayes_factor_exact(m, MixturePrior.simple("normal", 1e4))
smeared = bayes_factor_exact(m, MixturePrior.simple("normal", 1e4, epsilon0=0.01))
print("smeared / point:", smeared.bf / point.bf)
print("asymptotic at 1e4:", bayes_factor_asymptotic(z, 1e4).bf)
