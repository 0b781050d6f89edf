"""Zero-temperature limit set and the sphere parametrization H.

``h_eval`` computes the limit probability vector attached to a unit
direction by the recursive skeleton construction: centers of cones get the
equal-weight power-sum solution on their label, and any other direction is
split along the arc from its cone's center to the boundary, the boundary
value is computed recursively, and the two are merged through the
ratio/exponent identity solved by a power-sum normalization.

``ray_limit`` is the independent check: it evaluates the exponential
weights exp(-beta(w) F(s) + w . c_s) along the divergent sequence
w(r) = r * f + offset that the construction associates with the direction
(f the terminal face ray or center, offset the accumulated -log(lambda)
center shifts), driving beta to infinity numerically.  At cone centers and
on 1-dimensional cones the offset vanishes and this is the plain ray
through the direction itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .cones import Cone, Fan, boundary_decompose, build_fan, membership, sphere_grid
from .errors import ConvergenceError, EndpointMismatchError, KmsCayleyError
from .groups import GroupSpec, same_endpoint
from .solvers import PartitionData, beta_of_u, power_sum_root


@dataclass(frozen=True, eq=False)
class LimitPoint:
    """Probability vector on the generators with its exact support."""

    spec: GroupSpec
    p: np.ndarray

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        object.__setattr__(self, "p", arr)
        total = float(np.sum(arr))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"limit point mass {total!r} is not 1")
        if np.any(arr < 0):
            raise ValueError("limit point has a negative coordinate")
        arr.flags.writeable = False

    @property
    def support(self) -> frozenset:
        return frozenset(s for s, x in zip(self.spec.generators, self.p) if x > 0)

    def value(self, symbol: str) -> float:
        return float(self.p[self.spec.index(symbol)])

    def as_dict(self) -> dict:
        return {s: float(x) for s, x in zip(self.spec.generators, self.p)}


class HMapCache:
    """Per-cone memo of center values; anchors of the recursion."""

    def __init__(self):
        self._centers: dict = {}

    def center_value(self, fan: Fan, cone: Cone,
                     config: SolverConfig = DEFAULT_CONFIG) -> LimitPoint:
        key = cone.label
        if key not in self._centers:
            self._centers[key] = _solve_center(fan.spec, cone, config)
        return self._centers[key]


def _solve_center(spec: GroupSpec, cone: Cone, config: SolverConfig) -> LimitPoint:
    """Support exactly the label, equal x^{1/F} there, total mass one."""
    if cone.dim < 1:
        raise KmsCayleyError("center value needs a cone of dimension >= 1")
    mask = np.array([s in cone.label for s in spec.generators])
    r = mask.astype(float)
    x = power_sum_root(r, spec.F, config)
    p = np.where(mask, x ** spec.F, 0.0)
    return LimitPoint(spec=spec, p=p)


def h_center(fan: Fan, cone: Cone, cache: HMapCache | None = None,
             config: SolverConfig = DEFAULT_CONFIG) -> LimitPoint:
    cache = cache or HMapCache()
    return cache.center_value(fan, cone, config)


def _lookup_face(fan: Fan, base: Cone, u: np.ndarray,
                 config: SolverConfig) -> Cone:
    """Cone of the decomposition exit point; must be a proper face."""
    cone = membership(fan, u, config)
    if not set(base.label) < set(cone.label):
        merged = tuple(s for s in fan.spec.generators
                       if s in set(base.label) | set(cone.label))
        if merged in fan.cones:
            cone = fan.cones[merged]
    if cone.dim >= base.dim:
        raise KmsCayleyError(
            f"decomposition of {base.label} did not reach a proper face")
    return cone


def h_eval(fan: Fan, v, cache: HMapCache | None = None,
           config: SolverConfig = DEFAULT_CONFIG) -> LimitPoint:
    """Value of the sphere-to-limit-set map H at a unit direction."""
    cache = cache or HMapCache()
    v = np.asarray(v, dtype=float)
    cone = membership(fan, v, config)
    return _h_eval_in(fan, cone, v, cache, config)


def _h_eval_in(fan: Fan, cone: Cone, v: np.ndarray, cache: HMapCache,
               config: SolverConfig) -> LimitPoint:
    spec = fan.spec
    if cone.dim == 1 or np.linalg.norm(v - cone.center) <= config.eps_geom:
        return cache.center_value(fan, cone, config)
    lam, u = boundary_decompose(cone, v, config)
    face = _lookup_face(fan, cone, u, config)
    hp = _h_eval_in(fan, face, u, cache, config)
    return _merge(spec, cone, lam, hp, config)


def _merge(spec: GroupSpec, cone: Cone, lam: float, hp: LimitPoint,
           config: SolverConfig) -> LimitPoint:
    """Solve the ratio identity for the interior value.

    With z the first label element, the target t satisfies
        t_s^{1/F(s)} / t_z^{1/F(z)}
            = (hp_s^{1/F(s)} / hp_z^{1/F(z)})
              * exp(-log(lam) * center . (c_s/F(s) - c_z/F(z))),
    so t_s = (x r_s)^{F(s)} with x fixed by total mass one.  The exponent
    factor is <= 1: off-label constraints are negative at the center.
    """
    z = cone.label[0]
    iz = spec.index(z)
    if hp.p[iz] <= 0:
        raise KmsCayleyError(
            f"boundary value vanishes on the base label element {z!r}")
    ratios = spec.C / spec.F[:, None]
    qz = ratios - ratios[iz]
    expo = -np.log(lam) * (qz @ cone.center)  # <= 0 entrywise
    pos = hp.p > 0
    log_hp = np.full(len(hp.p), -np.inf)
    log_hp[pos] = np.log(hp.p[pos]) / spec.F[pos]
    log_r = log_hp - log_hp[iz] + expo
    r = np.where(np.isfinite(log_r), np.exp(log_r), 0.0)
    x = power_sum_root(r, spec.F, config)
    p = np.where(r > 0, (x * r) ** spec.F, 0.0)
    p = p / np.sum(p)
    return LimitPoint(spec=spec, p=p)


# ---------------------------------------------------------------------------
# Ray-limit oracle
# ---------------------------------------------------------------------------

def associated_ray(fan: Fan, v, config: SolverConfig = DEFAULT_CONFIG):
    """Terminal direction and offset of the divergent sequence for v.

    Walking the decomposition chain of v, each level contributes
    -log(lambda) times its center; the chain ends on a 1-dimensional cone
    or at a center, whose plain ray carries the recursion base.
    """
    v = np.asarray(v, dtype=float)
    offset = np.zeros(fan.rank)
    cone = membership(fan, v, config)
    w = v
    while True:
        if cone.dim == 1 or np.linalg.norm(w - cone.center) <= config.eps_geom:
            terminal = cone.center if cone.dim > 1 else cone.rays[0]
            return np.asarray(terminal, dtype=float), offset
        lam, u = boundary_decompose(cone, w, config)
        offset = offset - np.log(lam) * cone.center
        face = _lookup_face(fan, cone, u, config)
        cone, w = face, u


def ray_limit(spec: GroupSpec, v, fan: Fan | None = None,
              r0: float = 1.0, doublings: int = 12,
              config: SolverConfig = DEFAULT_CONFIG) -> LimitPoint:
    """Numerical limit of the exponential weights along the associated ray.

    Evaluates p_s(r) = exp(-beta(w(r)) F(s) + w(r) . c_s) at r = r0 * 2^k
    and stops once successive iterates agree to eps_limit / 10 in sup norm.
    """
    data = PartitionData.from_spec(spec)
    if data.rank < 1:
        raise KmsCayleyError("ray limits need abelianization rank >= 1")
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv <= 0:
        raise ValueError("direction must be nonzero")
    v = v / nv
    fan = fan or build_fan(spec, config)
    f, offset = associated_ray(fan, v, config=config)

    def weights(r: float) -> np.ndarray:
        w = r * f + offset
        beta = beta_of_u(data, w, config)
        a = data.exponents(w, beta)
        p = np.exp(a)
        return p / np.sum(p)

    prev = weights(r0)
    history = [prev]
    for k in range(1, doublings + 1):
        cur = weights(r0 * 2.0 ** k)
        history.append(cur)
        gap = float(np.max(np.abs(cur - prev)))
        if k >= 2 and gap < config.eps_limit / 10.0:
            return LimitPoint(spec=spec, p=cur / np.sum(cur))
        prev = cur
    gap = float(np.max(np.abs(history[-1] - history[-2])))
    raise ConvergenceError(
        "ray_limit: schedule exhausted before convergence",
        {"last": history[-1].tolist(), "previous": history[-2].tolist(),
         "gap": gap})


def ray_limit_iterates(spec: GroupSpec, v, fan: Fan | None = None,
                       r0: float = 1.0, doublings: int = 12,
                       config: SolverConfig = DEFAULT_CONFIG):
    """All schedule iterates (r, p(r)); convergence diagnostics for tests."""
    data = PartitionData.from_spec(spec)
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    fan = fan or build_fan(spec, config)
    f, offset = associated_ray(fan, v, config=config)
    out = []
    for k in range(doublings + 1):
        r = r0 * 2.0 ** k
        w = r * f + offset
        beta = beta_of_u(data, w, config)
        p = np.exp(data.exponents(w, beta))
        out.append((r, p / np.sum(p)))
    return out


# ---------------------------------------------------------------------------
# Limit states
# ---------------------------------------------------------------------------

def kms_infinity_eval(spec: GroupSpec, points, t, u) -> float:
    """Evaluate a convex mixture of limit Bernoulli states on V_t V_u^*."""
    weights = [w for w, _ in points]
    if abs(sum(weights) - 1.0) > 1e-9 or any(w < 0 for w in weights):
        raise ValueError("mixture weights must form a probability vector")
    if t != u:
        if not same_endpoint(spec, t, u):
            raise EndpointMismatchError(
                "V_t V_u* with distinct endpoints is not in the algebra")
        return 0.0
    total = 0.0
    for w, point in points:
        prod = 1.0
        for s in t:
            prod *= point.value(s)
        total += w * prod
    return total


def n_infinity_sample(fan: Fan, count: int, cache: HMapCache | None = None,
                      config: SolverConfig = DEFAULT_CONFIG):
    """H on the deterministic sphere grid; (direction, point) pairs."""
    cache = cache or HMapCache()
    out = []
    for v in sphere_grid(fan.rank, count):
        out.append((v, h_eval(fan, v, cache, config)))
    return out
