"""Root-finding and convex-minimization kernel.

Everything is phrased through the partition sum

    phi(u, beta) = sum_s exp(u . c_s - beta F(s)),

always evaluated in log-sum-exp form so that ray limits with coordinates of
order 10^3 stay finite.  All solvers are deterministic: fixed starting
points, fixed bracketing rules, no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import ConvergenceError, NoSphereError, RankZeroError
from .groups import GroupSpec


def logsumexp(a: np.ndarray) -> float:
    m = float(np.max(a))
    return m + float(np.log(np.sum(np.exp(a - m))))


@dataclass(frozen=True)
class PartitionData:
    """Exponent data (F(s), c_s) per generator, in generator order."""

    F: np.ndarray  # (m,)
    C: np.ndarray  # (m, n)

    @classmethod
    def from_spec(cls, spec: GroupSpec) -> "PartitionData":
        return cls(F=spec.F, C=spec.C)

    @property
    def size(self) -> int:
        return self.F.shape[0]

    @property
    def rank(self) -> int:
        return self.C.shape[1]

    def exponents(self, u: np.ndarray, beta: float) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.C @ u - beta * self.F

    def log_partition(self, u: np.ndarray, beta: float) -> float:
        return logsumexp(self.exponents(u, beta))

    def partition(self, u: np.ndarray, beta: float) -> float:
        return float(np.exp(self.log_partition(u, beta)))

    def weights(self, u: np.ndarray, beta: float) -> np.ndarray:
        """exp(u.c_s - beta F(s)); sums to 1 exactly when beta = beta(u)."""
        return np.exp(self.exponents(u, beta))


def _softmax(a: np.ndarray) -> np.ndarray:
    p = np.exp(a - np.max(a))
    return p / np.sum(p)


def _decreasing_root(f, fprime, lo, hi, eps_root, max_iter, what):
    """Safeguarded Newton for a strictly decreasing f with f(lo)>0>f(hi).

    Newton steps may land on the bracket endpoints (the root often does);
    only stalls and exits fall back to bisection.
    """
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        v = f(x)
        if abs(v) <= eps_root:
            return x
        if v > 0:
            lo = x
        else:
            hi = x
        d = fprime(x)
        step = x - v / d if d != 0 else None
        if step is None or not lo <= step <= hi or step == x:
            step = 0.5 * (lo + hi)
        x = step
    v = f(x)
    if abs(v) <= eps_root:
        return x
    raise ConvergenceError(f"{what}: no convergence after {max_iter} iterations",
                           {"x": x, "residual": v})


def beta_of_u(data: PartitionData, u, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """The unique beta > 0 with sum_s exp(u.c_s - beta F(s)) = 1.

    The log-partition is strictly decreasing and convex in beta, so a
    bracketed Newton iteration cannot fail.
    """
    u = np.asarray(u, dtype=float).reshape(data.rank)

    def f(beta):
        return data.log_partition(u, beta)

    def fprime(beta):
        p = _softmax(data.exponents(u, beta))
        return -float(p @ data.F)

    lo = 0.0
    if f(lo) <= 0:
        # cannot happen for positively spanning data; widen defensively
        while f(lo) <= 0 and lo > -2.0 ** 40:
            lo = 2.0 * lo - 1.0
    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
        if hi > 2.0 ** 40:
            raise ConvergenceError("beta_of_u: could not bracket the root")
    return _decreasing_root(f, fprime, lo, hi, config.eps_root,
                            config.max_iter, "beta_of_u")


def u_of_beta(data: PartitionData, beta: float,
              config: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Minimizer of u -> sum_s exp(u.c_s - beta F(s)).

    Damped Newton on the log-partition (strictly convex by the rank
    condition), starting at 0, with an Armijo backtracking line search.
    Terminates when the raw gradient sum_s c_s exp(...) is below eps_grad.
    """
    if data.rank == 0:
        raise RankZeroError("u_of_beta needs abelianization rank >= 1")
    u = np.zeros(data.rank)
    for _ in range(config.max_iter):
        a = data.exponents(u, beta)
        ell = logsumexp(a)
        p = _softmax(a)
        g = data.C.T @ p  # gradient of the log-partition
        raw = np.exp(ell) * np.linalg.norm(g)
        if raw <= config.eps_grad and np.linalg.norm(g) <= config.eps_grad:
            return u
        h = data.C.T @ (p[:, None] * data.C) - np.outer(g, g)
        try:
            step = np.linalg.solve(h + 1e-14 * np.eye(data.rank), -g)
        except np.linalg.LinAlgError:
            step = -g
        if g @ step >= 0:  # not a descent direction; fall back to gradient
            step = -g
        t = 1.0
        for _ in range(60):
            if data.log_partition(u + t * step, beta) <= ell + 1e-4 * t * (g @ step):
                break
            t *= 0.5
        u = u + t * step
    raise ConvergenceError("u_of_beta: no convergence",
                           {"beta": beta, "last_u": u.tolist()})


def min_log_partition(data: PartitionData, beta: float,
                      config: SolverConfig = DEFAULT_CONFIG) -> float:
    """log of h(beta) = min_u sum_s exp(u.c_s - beta F(s))."""
    if data.rank == 0:
        return data.log_partition(np.zeros(0), beta)
    u = u_of_beta(data, beta, config)
    return data.log_partition(u, beta)


def critical_beta(data: PartitionData, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Least beta admitting extreme exponential states: solves h(beta) = 1.

    h is strictly decreasing (envelope derivative -sum_s F(s) exp(...) < 0),
    so a bracketed Newton on log h converges unconditionally.
    """
    if data.rank == 0:
        return beta_of_u(data, np.zeros(0), config)

    def g(beta):
        return min_log_partition(data, beta, config)

    def gprime(beta):
        u = u_of_beta(data, beta, config)
        p = _softmax(data.exponents(u, beta))
        return -float(p @ data.F)  # envelope: du terms vanish at the minimizer

    lo = 0.0
    while g(lo) <= 0 and lo > -2.0 ** 40:
        lo = 2.0 * lo - 1.0
    hi = 1.0
    while g(hi) > 0:
        hi *= 2.0
        if hi > 2.0 ** 40:
            raise ConvergenceError("critical_beta: could not bracket the root")
    # |h - 1| <= eps_root: near the root |log h| tracks |h - 1|
    return _decreasing_root(g, gprime, lo, hi, 0.5 * config.eps_root,
                            config.max_iter, "critical_beta")


def radial_root(data: PartitionData, beta: float, v,
                config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Positive radius t with u(beta) + t v on the unit partition level set.

    Requires beta strictly above critical (partition minimum < 1); the
    radial section is strictly convex with minimum at t = 0, so the positive
    root is unique and bracketed by doubling.
    """
    v = np.asarray(v, dtype=float).reshape(data.rank)
    if abs(np.linalg.norm(v) - 1.0) > config.eps_geom:
        raise ValueError("direction must be a unit vector")
    u0 = u_of_beta(data, beta, config)
    ell0 = data.log_partition(u0, beta)
    if not np.exp(ell0) < 1.0 - config.eps_root:
        raise NoSphereError(
            f"no sphere at beta={beta!r}: partition minimum {np.exp(ell0)!r} >= 1")
    cv = data.C @ v

    def f(t):
        return logsumexp(data.exponents(u0, beta) + t * cv)

    def fprime(t):
        p = _softmax(data.exponents(u0, beta) + t * cv)
        return float(p @ cv)

    hi = 1.0
    while f(hi) <= 0:
        hi *= 2.0
        if hi > 2.0 ** 40:
            raise ConvergenceError("radial_root: could not bracket the root")
    lo = 0.0
    # increasing on t >= 0; reuse the decreasing-root driver on -f
    x = _decreasing_root(lambda t: -f(t), lambda t: -fprime(t), lo, hi,
                         config.eps_root, config.max_iter, "radial_root")
    return x


def power_sum_root(weights, exponents, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """The x > 0 with sum_s (x r_s)^{F(s)} = 1.

    The sum is strictly increasing in x, vanishing terms (r_s = 0) drop out.
    """
    r = np.asarray(weights, dtype=float)
    F = np.asarray(exponents, dtype=float)
    if r.shape != F.shape:
        raise ValueError("weights and exponents must align")
    if np.any(r < 0):
        raise ValueError("weights must be non-negative")
    mask = r > 0
    if not np.any(mask):
        raise ValueError("power_sum_root needs at least one positive weight")
    logr = np.log(r[mask])
    f = F[mask]

    def g(y):  # log of the power sum at x = e^y
        return logsumexp(f * (y + logr))

    def gprime(y):
        p = _softmax(f * (y + logr))
        return float(p @ f)

    hi = float(-np.max(logr))  # x r_max = 1 makes the sum >= 1
    lo = hi - 1.0
    while g(lo) >= 0:
        lo -= 1.0
        if lo < -2.0 ** 40:
            raise ConvergenceError("power_sum_root: could not bracket the root")
    while g(hi) < 0:
        hi += 1.0
    y = _decreasing_root(lambda t: -g(t), lambda t: -gprime(t), lo, hi,
                         config.eps_root, config.max_iter, "power_sum_root")
    return float(np.exp(y))
