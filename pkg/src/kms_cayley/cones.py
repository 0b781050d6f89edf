"""Polyhedral cone fan of the directions c_s / F(s).

For a label set Z the cone holds the directions v where v . c_s/F(s) is
maximized exactly on Z; these cones tile the sphere.  Labels are kept
maximal, faces are labels containing Z, and every cone of dimension >= 1
carries the unit rays of its 1-faces plus their normalized average (the
center), which anchors the recursive zero-temperature construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import KmsCayleyError
from .groups import GroupSpec
from .linalg import matrix_rank, nullspace

ConeId = tuple  # generator symbols in declaration order

MAX_GENERATORS_FOR_FAN = 16


@dataclass(frozen=True)
class Cone:
    label: ConeId                 # maximal Z
    dim: int
    eq_normals: np.ndarray        # (|Z|-1, n): c_z'/F(z') - c_z0/F(z0)
    ineq_normals: np.ndarray      # (|Y\Z|, n): c_s/F(s) - c_z0/F(z0)
    ineq_symbols: tuple
    rays: np.ndarray              # (q, n) unit vectors of the 1-faces
    center: np.ndarray | None     # unit vector, None for the zero cone
    face_ids: tuple = field(default=())

    def contains(self, v: np.ndarray, tol: float) -> bool:
        v = np.asarray(v, dtype=float)
        if self.eq_normals.size and np.max(np.abs(self.eq_normals @ v)) > tol:
            return False
        if self.ineq_normals.size and np.max(self.ineq_normals @ v) > tol:
            return False
        return True


@dataclass(frozen=True)
class Fan:
    spec: GroupSpec
    cones: dict                   # ConeId -> Cone, insertion-ordered
    zero_cone: Cone | None
    scale: float                  # max |c_s/F(s)|, for relative tolerances

    def skeleton(self, k: int):
        """Cones of dimension between 1 and k."""
        return [c for c in self.cones.values() if 1 <= c.dim <= k]

    @property
    def rank(self) -> int:
        return self.spec.rank


def _ratio_matrix(spec: GroupSpec) -> np.ndarray:
    return spec.C / spec.F[:, None]


def _argmax_label(spec: GroupSpec, ratios: np.ndarray, v: np.ndarray,
                  tol: float) -> ConeId:
    vals = ratios @ v
    top = float(np.max(vals))
    return tuple(s for i, s in enumerate(spec.generators)
                 if top - vals[i] <= tol)


def _normals_for(spec: GroupSpec, ratios: np.ndarray, label: ConeId):
    idx = [spec.index(s) for s in label]
    base = idx[0]
    eq = np.array([ratios[i] - ratios[base] for i in idx[1:]],
                  dtype=float).reshape(len(idx) - 1, spec.rank)
    rest = [i for i in range(len(spec.generators)) if i not in idx]
    ineq = np.array([ratios[i] - ratios[base] for i in rest],
                    dtype=float).reshape(len(rest), spec.rank)
    syms = tuple(spec.generators[i] for i in rest)
    return eq, ineq, syms


def build_fan(spec: GroupSpec, config: SolverConfig = DEFAULT_CONFIG) -> Fan:
    """Enumerate the maximal-label cones by subset enumeration.

    Rays first: label subsets whose equality system has a 1-dimensional
    kernel and whose generator clears every inequality with one sign choice.
    Every higher cone is then the conical hull of the rays its label keeps
    tight, with its center certifying interior non-emptiness.
    """
    m = len(spec.generators)
    n = spec.rank
    if n < 1:
        raise KmsCayleyError("the fan needs abelianization rank >= 1")
    if m > MAX_GENERATORS_FOR_FAN:
        raise KmsCayleyError(f"fan enumeration capped at {MAX_GENERATORS_FOR_FAN} generators")
    ratios = _ratio_matrix(spec)
    scale = max(1.0, float(np.max(np.linalg.norm(ratios, axis=1))))
    tol = config.eps_geom * scale

    def mask_of(label):
        return sum(1 << spec.index(s) for s in label)

    # pass 1: unit rays of all 1-dimensional cones, deduplicated by label.
    # A 1-dimensional kernel needs n-1 independent equality rows, so labels
    # smaller than n cannot produce rays.
    rays_by_label: dict = {}
    for size in range(max(1, n), m + 1):
        for combo in itertools.combinations(range(m), size):
            label = tuple(spec.generators[i] for i in combo)
            eq, ineq, _ = _normals_for(spec, ratios, label)
            kern = nullspace(eq, config.eps_geom)
            if len(kern) != 1:
                continue
            w = kern[0]
            ok_pos = not ineq.size or float(np.max(ineq @ w)) <= tol
            ok_neg = not ineq.size or float(np.max(ineq @ -w)) <= tol
            if ok_pos and ok_neg:
                raise KmsCayleyError(
                    f"cone of {label} contains a line; input is not strongly convex")
            if not (ok_pos or ok_neg):
                continue
            ray = w if ok_pos else -w
            max_label = _argmax_label(spec, ratios, ray, tol)
            rays_by_label.setdefault(max_label, ray)

    ray_items = sorted(((mask_of(lbl), lbl, ray)
                        for lbl, ray in rays_by_label.items()),
                       key=lambda item: item[0])

    # pass 2: one cone per maximal label, certified by its center
    cones: dict = {}
    for size in range(1, m + 1):
        for combo in itertools.combinations(range(m), size):
            zmask = sum(1 << i for i in combo)
            members = [ray for lmask, _, ray in ray_items
                       if lmask & zmask == zmask]
            if not members:
                continue
            label = tuple(spec.generators[i] for i in combo)
            center = np.sum(members, axis=0) / len(members)
            norm = np.linalg.norm(center)
            if norm <= tol:
                raise KmsCayleyError(
                    f"degenerate center for {label}; input is not strongly convex")
            center = center / norm
            if _argmax_label(spec, ratios, center, tol) != label:
                continue  # label not maximal: some constraint stays tight
            eq, ineq, syms = _normals_for(spec, ratios, label)
            dim = n if eq.size == 0 else len(nullspace(eq, config.eps_geom))
            rays_arr = np.array(members).reshape(len(members), n)
            rays_arr.flags.writeable = False
            center.flags.writeable = False
            cones[label] = Cone(label=label, dim=dim, eq_normals=eq,
                                ineq_normals=ineq, ineq_symbols=syms,
                                rays=rays_arr, center=center)

    # faces: labels containing the cone's label
    masks = {label: mask_of(label) for label in cones}
    with_faces = {}
    for label, cone in cones.items():
        zmask = masks[label]
        faces = tuple(other for other in cones
                      if other != label and masks[other] & zmask == zmask)
        with_faces[label] = Cone(label=cone.label, dim=cone.dim,
                                 eq_normals=cone.eq_normals,
                                 ineq_normals=cone.ineq_normals,
                                 ineq_symbols=cone.ineq_symbols,
                                 rays=cone.rays, center=cone.center,
                                 face_ids=faces)

    zero = None
    full = tuple(spec.generators)
    eq, ineq, syms = _normals_for(spec, ratios, full)
    if matrix_rank(eq, config.eps_geom) >= n:
        zero = Cone(label=full, dim=0, eq_normals=eq, ineq_normals=ineq,
                    ineq_symbols=syms, rays=np.zeros((0, n)), center=None)

    return Fan(spec=spec, cones=with_faces, zero_cone=zero, scale=scale)


def membership(fan: Fan, v, config: SolverConfig = DEFAULT_CONFIG) -> Cone:
    """The cone with v in its relative interior (maximal tie set of v)."""
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > config.eps_geom:
        raise ValueError("membership expects a unit vector")
    spec = fan.spec
    ratios = _ratio_matrix(spec)
    tol = config.eps_geom * fan.scale
    label = _argmax_label(spec, ratios, v, tol)
    while label not in fan.cones and len(label) > 1:
        # tolerance produced a false tie; drop the weakest member
        vals = {s: float(ratios[spec.index(s)] @ v) for s in label}
        weakest = min(label, key=lambda s: vals[s])
        label = tuple(s for s in label if s != weakest)
    if label not in fan.cones:
        raise KmsCayleyError(f"no cone claims direction {v.tolist()}")
    return fan.cones[label]


def boundary_decompose(cone: Cone, v, config: SolverConfig = DEFAULT_CONFIG):
    """Split v (in the cone, off-center) along the arc from the center.

    Returns (lambda, u) with v = normalize((1-lambda) center + lambda u),
    u the first exit of the arc through v from the cone's boundary.  Works
    inside the 2-plane spanned by the center and v, where each inequality
    crosses zero at exactly one angle in (0, pi).
    """
    if cone.dim < 2:
        raise ValueError("boundary decomposition needs a cone of dimension >= 2")
    if cone.center is None:
        raise ValueError("zero cone has no center")
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > config.eps_geom:
        raise ValueError("boundary_decompose expects a unit vector")
    if not cone.contains(v, 1e2 * config.eps_geom):
        raise ValueError("vector lies outside the cone")
    c = cone.center
    w = v - float(v @ c) * c
    wn = float(np.linalg.norm(w))
    if wn <= config.eps_geom:
        raise ValueError("vector coincides with the cone center")
    w = w / wn
    theta_v = math.atan2(wn, float(v @ c))

    if not cone.ineq_normals.size:
        raise KmsCayleyError("cone of dimension >= 2 without inequalities")
    a = cone.ineq_normals @ c   # all < 0: center is strictly interior
    b = cone.ineq_normals @ w
    theta_exit = math.pi
    for ai, bi in zip(a, b):
        th = math.atan2(-float(ai), float(bi))
        theta_exit = min(theta_exit, th)
    theta_exit = max(theta_exit, theta_v)  # v itself may sit on the boundary
    u = math.cos(theta_exit) * c + math.sin(theta_exit) * w
    lam = math.sin(theta_v) / (math.sin(theta_v) + math.sin(theta_exit - theta_v))
    return lam, u


# ---------------------------------------------------------------------------
# Deterministic direction grids
# ---------------------------------------------------------------------------

def sphere_grid(n: int, count: int) -> np.ndarray:
    """Deterministic unit-vector grid: {+1,-1} on the line, equal angles on
    the circle, a Fibonacci lattice on the 2-sphere, seeded Gaussian beyond."""
    if n < 1:
        raise ValueError("need dimension >= 1")
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        angles = 2.0 * np.pi * np.arange(count) / max(count, 1)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if n == 3:
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        i = np.arange(count)
        z = 1.0 - 2.0 * (i + 0.5) / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = 2.0 * np.pi * i / golden
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(20240901 + n)
    pts = rng.standard_normal((count, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def quasi_random_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Low-discrepancy unit directions for property sampling; deterministic."""
    if n == 1:
        return np.array([[1.0 if k % 2 == 0 else -1.0] for k in range(count)])
    if n == 2:
        golden = (math.sqrt(5.0) - 1.0) / 2.0
        angles = 2.0 * np.pi * ((seed * golden + golden * np.arange(1, count + 1)) % 1.0)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    rng = np.random.default_rng(97 + 131 * seed + n)
    pts = rng.standard_normal((count, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)
