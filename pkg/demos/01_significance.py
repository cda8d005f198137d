"""
From z to p and back
====================

A measured effect ``theta_hat`` with standard uncertainty ``sigma_tot`` sits
``z`` standard deviations from the null value.  This script walks through
the arithmetic that turns that ``z`` into a one-tailed p-value, a maximum
likelihood ratio and an interval.
"""

from jlparadox.likelihood import max_lik_ratio
from jlparadox.normal import (Measurement, balance_errors, ci_normal, p_from_z, power_one_sided,
                              z_from_p)
from jlparadox.reference import ref_discrepancy_asymptotic

# The usual ladder of significances.  ``log10_p`` stays accurate long after
# ``p`` itself would underflow, which matters beyond about 37 sigma.
print(f"{'z':>4} {'p (one-tailed)':>16} {'lambda':>12} {'d':>6}")
for z in (1, 2, 3, 4, 5, 6):
    res = p_from_z(z)
    print(f"{z:>4} {res.p:>16.4e} {max_lik_ratio(z):>12.4e} {ref_discrepancy_asymptotic(z):>6.1f}")
print("log10 p at z = 40:", round(p_from_z(40).log10_p, 3))

# Going the other way: the two-tailed 5% critical value.
print("two-tailed z for p = 0.05:", z_from_p(0.05, tails=2))

# A measurement built from a sample size; the interval inverts the test.
m = Measurement.from_sample_size(theta_hat=0.42, sigma=2.0, n=400)
print("z against 0:", m.z(0.0))
print("95% interval:", ci_normal(m, 0.95))

# Power, and where to cut if both error rates count equally.
print("power at alpha = 0.05, delta = 3 sigma:", power_one_sided(0.05, 3.0))
alpha, beta, cut = balance_errors(3.0)
print(f"balanced cut at {cut} sigma: alpha = beta = {alpha:.4f}")
