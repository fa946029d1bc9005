"""Interaction symbol of a longer-range chain and its Riesz-Fejer style factorization."""

from qcspectra import (
    ChainModel,
    beta_bounds_closed_form,
    beta_bounds_numeric,
    build_b,
    build_b1,
    coefficients_from_potential,
    grf_factorize,
)

# coefficients from a Lennard-Jones chain stretched by 5%
phi = coefficients_from_potential("lennard-jones", 1.05, 4)
print("phi''(rF):", phi)
model = ChainModel(64, phi)

b = build_b(model)
b1 = build_b1(model)
print("b  =", b)
print("b1 =", b1, " (b divided by the squared Laplacian symbol)")

fact = grf_factorize(b1)
print("p1 =", fact.p1, " sigma =", fact.sigma)
print("reconstruction error:", (fact.reconstruct() - b1).max_abs_coeff())

# for non-positive tails the extrema of b1 sit at t = -1 and t = 1
print("closed form beta0, beta1:", beta_bounds_closed_form(model))
num = beta_bounds_numeric(b1)
print("grid        beta0, beta1:", (num.beta0, num.beta1), "at theta =", (float(num.argmin), float(num.argmax)))
