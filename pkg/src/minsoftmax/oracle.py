"""Independent brute-force and quadrature verifiers.

These certify the closed-form solver results on small instances by sheer
enumeration or numerical integration. They deliberately share no code with
the solvers they check, and they ship in the library (not test-only code)
so the command line can expose a verify command.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

import numpy as np

from .core import LqSystem, Penalties
from .errors import DimensionTooLarge, DivergentIntegrand, SupportViolation

MAX_SIMPLEX_DIM = 4


def regularized_objective(
    p: np.ndarray, r: np.ndarray, j_vals: np.ndarray, pen: Penalties
) -> float:
    """Stage objective of the adversary at distribution p.

    E_p[j] + gamma_h * sum_w p_w log r_w + gamma_e * H(p), with the
    0*log(0) = 0 convention so simplex vertices are evaluable. Requires p
    absolutely continuous w.r.t. r when gamma_h > 0.
    """
    p = np.asarray(p, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    j = np.asarray(j_vals, dtype=np.float64)
    if pen.gamma_h > 0 and np.any((p > 0) & (r == 0)):
        raise SupportViolation("p puts mass outside the empirical support with gamma_h > 0")
    val = float(p @ j)
    live = p > 0
    if pen.gamma_h > 0:
        val += pen.gamma_h * float(p[live] @ np.log(r[live]))
    if pen.gamma_e > 0:
        val -= pen.gamma_e * float(p[live] @ np.log(p[live]))
    return val


@lru_cache(maxsize=8)
def _simplex_grid(n: int, steps: int) -> np.ndarray:
    """All points of the n-simplex with coordinates k_i/steps, boundary included."""
    if n == 1:
        return np.ones((1, 1))
    counts = np.arange(steps + 1)
    parts = [np.array([[c] for c in counts])]
    for _ in range(n - 2):
        prev = parts[-1]
        used = prev.sum(axis=1)
        rows = [np.hstack([np.repeat(row[None, :], steps + 1 - u, axis=0),
                           np.arange(steps + 1 - u)[:, None]])
                for row, u in zip(prev, used)]
        parts.append(np.vstack(rows))
    head = parts[-1]
    tail = steps - head.sum(axis=1, keepdims=True)
    grid = np.hstack([head, tail]).astype(np.float64) / steps
    return grid


@lru_cache(maxsize=8)
def _grid_entropy(n: int, steps: int) -> np.ndarray:
    grid = _simplex_grid(n, steps)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(grid > 0, grid * np.log(grid), 0.0)
    return -t.sum(axis=1)


def simplex_search(
    r: np.ndarray, j_vals: np.ndarray, pen: Penalties, grid_step: float
) -> tuple[np.ndarray, float]:
    """Maximize the regularized objective by exhaustive grid enumeration.

    Enumerates the probability simplex on a uniform grid (boundary points
    included) and returns (best p, best value). Supported up to dimension
    MAX_SIMPLEX_DIM. With gamma_h > 0, grid points outside the empirical
    support are excluded rather than raising.
    """
    r = np.asarray(r, dtype=np.float64)
    j = np.asarray(j_vals, dtype=np.float64)
    n = r.shape[0]
    if n > MAX_SIMPLEX_DIM:
        raise DimensionTooLarge(f"simplex enumeration supports length <= {MAX_SIMPLEX_DIM}, got {n}")
    if not (0.0 < grid_step <= 0.5):
        raise ValueError(f"grid_step must lie in (0, 0.5], got {grid_step}")
    steps = int(round(1.0 / grid_step))

    grid = _simplex_grid(n, steps)
    with np.errstate(divide="ignore"):
        lin = j + pen.gamma_h * np.log(r)
    obj = grid @ np.where(np.isneginf(lin), 0.0, lin)
    if np.any(np.isneginf(lin)):
        obj = np.where((grid[:, np.isneginf(lin)] > 0).any(axis=1), -np.inf, obj)
    if pen.gamma_e > 0:
        obj = obj + pen.gamma_e * _grid_entropy(n, steps)
    best = int(obj.argmax())
    return grid[best].copy(), float(obj[best])


def gaussian_quadrature_q(
    lq: LqSystem,
    p_next: np.ndarray,
    zeta_next: float,
    x: np.ndarray,
    u: np.ndarray,
    pen: Penalties,
    half_width: Optional[float] = None,
    n_points: int = 100_000,
) -> float:
    """Stage value for a scalar-disturbance LQ system by direct integration.

    Integrates exp(alpha(w)/gamma_e) with

        alpha(w) = gamma_h*log(rho*exp(-w^2/2)) + (xi+Dw)'P_next(xi+Dw) + zeta_next,
        xi = Ax + Bu,  rho = (2*pi)^(-1/2),

    by composite trapezoid with n_points samples and returns gamma_e times
    the log of the integral. When half_width is None it is chosen as
    |adversary mean| + 10 standard deviations of the adversarial Gaussian
    (computed from gamma_e * M^{-1}), which covers the integrand's effective
    support; an explicit half_width integrates over [-half_width, half_width].
    """
    if lq.n_dist != 1:
        raise ValueError("quadrature cross-check supports a scalar disturbance only")
    if pen.gamma_e <= 0:
        raise ValueError("quadrature requires gamma_e > 0")
    p_next = np.atleast_2d(np.asarray(p_next, dtype=np.float64))
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    d = lq.d
    m = pen.gamma_h - 2.0 * (d.T @ p_next @ d).item()
    if m <= 0:
        raise DivergentIntegrand(f"integrand does not decay: M = {m:.6g} <= 0")

    xi = lq.a @ x + lq.b @ u
    mean = 2.0 * (d.T @ p_next @ xi).item() / m
    if half_width is None:
        sigma = float(np.sqrt(pen.gamma_e / m))
        lo, hi = mean - 10.0 * sigma, mean + 10.0 * sigma
    else:
        lo, hi = -float(half_width), float(half_width)

    w = np.linspace(lo, hi, int(n_points))
    rho = (2.0 * np.pi) ** -0.5
    y = xi[:, None] + d @ w[None, :]
    quad = np.einsum("in,ij,jn->n", y, p_next, y)
    alpha = pen.gamma_h * (np.log(rho) - 0.5 * w * w) + quad + zeta_next
    # Max-shifted log of the trapezoid sum keeps the exponentials bounded.
    shift = alpha.max()
    integral = np.trapezoid(np.exp((alpha - shift) / pen.gamma_e), w)
    return float(shift + pen.gamma_e * np.log(integral))
