"""Harmonic vectors, cylinder measures and equilibrium-state evaluation.

A normalized vector psi with sum_s e^{-beta F(s)} psi_{gs} = psi_g defines a
probability measure on the one-sided shift by m(t) = e^{-beta F(t)} psi at
the endpoint of t, and the corresponding state sends V_t V_u* to m(t) when
t = u and to 0 otherwise.  Three concrete families are implemented: the
exponential vectors e^{u . c(g)} (the extreme abelian states), the
closed-form infinite-dihedral family, and tabulated vectors on a ball
(used for perturbation controls).
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .cones import sphere_grid
from .errors import (EndpointMismatchError, KmsCayleyError, RankZeroError,
                     TabulatedDomainError)
from .groups import (GroupSpec, Word, abelianized_element, abelianized_word,
                     ball, endpoint, same_endpoint)
from .solvers import PartitionData, critical_beta, radial_root, u_of_beta


class HarmonicVector:
    """Base for evaluable psi : G -> [0, inf) at fixed inverse temperature."""

    def __init__(self, spec: GroupSpec, beta: float):
        self.spec = spec
        self.beta = float(beta)

    def psi_element(self, g) -> float:
        raise NotImplementedError

    def psi_word(self, t: Word) -> float:
        return self.psi_element(endpoint(self.spec, t))

    def cylinder_mass(self, t: Word) -> float:
        """Mass of the cylinder of words starting with t."""
        return math.exp(-self.beta * self.spec.word_potential(t)) * self.psi_word(t)

    def describe(self) -> dict:
        raise NotImplementedError


class ExponentialHarmonic(HarmonicVector):
    """psi_g = e^{u . c(g)}; multiplicative, hence extreme abelian."""

    def __init__(self, spec: GroupSpec, beta: float, u):
        super().__init__(spec, beta)
        self.u = np.asarray(u, dtype=float).reshape(spec.rank)
        self.u.flags.writeable = False

    def psi_element(self, g) -> float:
        return float(np.exp(self.u @ abelianized_element(self.spec, g)))

    def psi_word(self, t: Word) -> float:
        # letterwise c-sums need no oracle
        return float(np.exp(self.u @ abelianized_word(self.spec, t)))

    def probability_vector(self) -> np.ndarray:
        """p_s = e^{u . c_s - beta F(s)}; the Bernoulli marginal."""
        return np.exp(self.spec.C @ self.u - self.beta * self.spec.F)

    def describe(self) -> dict:
        return {"kind": "exponential", "beta": self.beta, "u": self.u.tolist()}


class DihedralHarmonic(HarmonicVector):
    """The infinite-dihedral family x_n = t e^{cn} + (1-t) e^{-cn}, y_n = x_{n-1}.

    c > 0 is pinned by e^c + e^{-c} = e^beta, so the family exists exactly
    for beta >= log 2; the mixing parameter t runs over [0, 1].
    """

    def __init__(self, spec: GroupSpec, beta: float, t_param: float):
        if spec.oracle is None or spec.oracle.kind != "dihedral_infinite":
            raise KmsCayleyError("dihedral family needs the dihedral oracle")
        if not 0.0 <= t_param <= 1.0:
            raise ValueError("t_param must lie in [0, 1]")
        half = math.exp(beta) / 2.0
        if half < 1.0:
            raise KmsCayleyError(
                f"no dihedral harmonic family below log 2 (beta={beta!r})")
        super().__init__(spec, beta)
        self.t_param = float(t_param)
        self.c_beta = math.acosh(half)

    def psi_element(self, g) -> float:
        k, eps = g
        if eps:
            k = k - 1
        return (self.t_param * math.exp(self.c_beta * k)
                + (1.0 - self.t_param) * math.exp(-self.c_beta * k))

    def describe(self) -> dict:
        return {"kind": "dihedral", "beta": self.beta,
                "t_param": self.t_param, "c_beta": self.c_beta}


class TabulatedHarmonic(HarmonicVector):
    """psi given by a finite table on group elements."""

    def __init__(self, spec: GroupSpec, beta: float, values: dict):
        super().__init__(spec, beta)
        self.values = dict(values)

    def psi_element(self, g) -> float:
        try:
            return float(self.values[g])
        except KeyError:
            raise TabulatedDomainError(f"element {g!r} outside the tabulated ball")

    def describe(self) -> dict:
        return {"kind": "tabulated", "beta": self.beta, "size": len(self.values)}


def psi_eval(psi: HarmonicVector, t_or_g) -> float:
    if isinstance(t_or_g, tuple) and all(isinstance(s, str) for s in t_or_g):
        return psi.psi_word(t_or_g)
    return psi.psi_element(t_or_g)


def cylinder_mass(psi: HarmonicVector, t: Word) -> float:
    return psi.cylinder_mass(t)


def harmonic_residual(psi: HarmonicVector, radius: int) -> float:
    """Max harmonicity defect |sum_s e^{-beta F(s)} psi_{gs} - psi_g| on a ball."""
    spec = psi.spec
    window = ball(spec, radius)
    decay = {s: math.exp(-psi.beta * spec.potential[s]) for s in spec.generators}
    worst = 0.0
    for g in window.elements:
        acc = 0.0
        for s, h in window.neighbors[g]:
            acc += decay[s] * psi.psi_element(h)
        worst = max(worst, abs(acc - psi.psi_element(g)))
    return worst


def _transfer_power(psi: HarmonicVector, g, k: int, memo: dict) -> float:
    """(T^k psi)(g) with (T psi)(g) = sum_s e^{-beta F(s)} psi_{gs}."""
    if k == 0:
        return psi.psi_element(g)
    key = (g, k)
    if key not in memo:
        spec = psi.spec
        oracle = spec.require_oracle()
        acc = 0.0
        for s in spec.generators:
            h = oracle.multiply(g, oracle.image(s))
            acc += math.exp(-psi.beta * spec.potential[s]) * _transfer_power(
                psi, h, k - 1, memo)
        memo[key] = acc
    return memo[key]


def kms_condition_check(psi: HarmonicVector, max_len: int) -> float:
    """Max violation of the equilibrium identity across equal-endpoint words.

    Cylinder masses are taken at the common refinement level max_len, i.e.
    m(t) = e^{-beta F(t)} (T^{max_len - |t|} psi)(endpoint t), so that m is
    additive by construction and the comparison e^{beta F(t)} m(t) across
    representatives genuinely probes harmonicity of psi.
    """
    if max_len > 6:
        raise ValueError("word enumeration capped at length 6")
    spec = psi.spec
    memo: dict = {}
    classes: dict = {}
    for length in range(max_len + 1):
        for t in itertools.product(spec.generators, repeat=length):
            g = endpoint(spec, t)
            ft = spec.word_potential(t)
            mass = math.exp(-psi.beta * ft) * _transfer_power(
                psi, g, max_len - length, memo)
            value = math.exp(psi.beta * ft) * mass
            classes.setdefault(g, []).append(value)
    worst = 0.0
    for values in classes.values():
        if len(values) > 1:
            worst = max(worst, max(values) - min(values))
    return worst


# ---------------------------------------------------------------------------
# The sphere of extreme abelian states
# ---------------------------------------------------------------------------

class QBetaPoint:
    """A homomorphism u with unit partition sum at inverse temperature beta."""

    def __init__(self, spec: GroupSpec, beta: float, u,
                 config: SolverConfig = DEFAULT_CONFIG):
        self.spec = spec
        self.beta = float(beta)
        self.u = np.asarray(u, dtype=float).reshape(spec.rank)
        self.u.flags.writeable = False
        res = self.residual()
        # guard only; sphere points are verified at eps_root by their tests,
        # while the critical point may sit anywhere in the eps_geom band
        if res > 10.0 * config.eps_geom:
            raise ValueError(f"point residual {res!r} violates the defining identity")

    def residual(self) -> float:
        total = float(np.sum(np.exp(self.spec.C @ self.u - self.beta * self.spec.F)))
        return abs(total - 1.0)

    def probability_vector(self) -> np.ndarray:
        return np.exp(self.spec.C @ self.u - self.beta * self.spec.F)

    def to_harmonic(self) -> ExponentialHarmonic:
        return ExponentialHarmonic(self.spec, self.beta, self.u)


def sample_q_beta(spec: GroupSpec, beta: float, count: int,
                  config: SolverConfig = DEFAULT_CONFIG,
                  beta0: float | None = None):
    """Extreme abelian states at beta: empty below critical, the single
    minimizer at critical (within eps_geom), a sphere grid above."""
    if spec.rank < 1:
        raise RankZeroError(
            "rank-zero groups carry a unique state at the critical beta; "
            "use the critical-beta path")
    data = PartitionData.from_spec(spec)
    if beta0 is None:
        beta0 = critical_beta(data, config)
    if beta < beta0 - config.eps_geom:
        return []
    u_star = u_of_beta(data, beta, config)
    if beta <= beta0 + config.eps_geom:
        return [QBetaPoint(spec, beta, u_star, config)]
    points = []
    for v in sphere_grid(spec.rank, count):
        t = radial_root(data, beta, v, config)
        points.append(QBetaPoint(spec, beta, u_star + t * v, config))
    return points


def critical_state(spec: GroupSpec, config: SolverConfig = DEFAULT_CONFIG):
    """The unique extreme state at the critical inverse temperature."""
    data = PartitionData.from_spec(spec)
    beta0 = critical_beta(data, config)
    if spec.rank == 0:
        psi = ExponentialHarmonic(spec, beta0, np.zeros(0))
    else:
        psi = ExponentialHarmonic(spec, beta0, u_of_beta(data, beta0, config))
    return beta0, psi


# ---------------------------------------------------------------------------
# Mixtures
# ---------------------------------------------------------------------------

class KmsState:
    """Finite convex mixture of extreme states at one inverse temperature."""

    def __init__(self, beta: float, mixture):
        self.beta = float(beta)
        self.mixture = [(float(w), psi) for w, psi in mixture]
        if not self.mixture:
            raise ValueError("state needs at least one component")
        total = sum(w for w, _ in self.mixture)
        if abs(total - 1.0) > 1e-9 or any(w < 0 for w, _ in self.mixture):
            raise ValueError("weights must form a probability vector")
        for _, psi in self.mixture:
            if abs(psi.beta - self.beta) > 1e-9:
                raise ValueError("all components must share the state's beta")
        self.spec = self.mixture[0][1].spec

    def cylinder_mass(self, t: Word) -> float:
        return sum(w * psi.cylinder_mass(t) for w, psi in self.mixture)

    def describe(self) -> dict:
        out = {"beta": self.beta, "mixture": []}
        for w, psi in self.mixture:
            entry = psi.describe()
            if entry["kind"] == "exponential":
                out["mixture"].append({"w": w, "u": entry["u"]})
            elif entry["kind"] == "dihedral":
                out["mixture"].append({"w": w, "dihedral_t": entry["t_param"]})
            else:
                raise KmsCayleyError("tabulated components are not serializable")
        return out

    @classmethod
    def from_json(cls, spec: GroupSpec, data: dict) -> "KmsState":
        beta = float(data["beta"])
        mixture = []
        for item in data["mixture"]:
            if "u" in item:
                mixture.append((item["w"], ExponentialHarmonic(spec, beta, item["u"])))
            elif "dihedral_t" in item:
                mixture.append((item["w"], DihedralHarmonic(spec, beta, item["dihedral_t"])))
            else:
                raise ValueError("mixture entry needs 'u' or 'dihedral_t'")
        return cls(beta, mixture)


def state_eval(state: KmsState, t: Word, u: Word) -> float:
    """Value on V_t V_u*: the mixture's cylinder mass when t = u, zero for
    distinct equal-endpoint words, an error otherwise."""
    spec = state.spec
    if t == u:
        return state.cylinder_mass(t)
    if not same_endpoint(spec, t, u):
        raise EndpointMismatchError(
            "V_t V_u* with distinct endpoints is not in the algebra")
    return 0.0
