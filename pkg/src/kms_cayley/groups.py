"""Group specifications, exact word arithmetic and Cayley balls.

A :class:`GroupSpec` bundles the generator set Y, the positive potential F,
the abelianization vectors c_s and, when available, an exact word oracle so
that endpoint equality and finite-window harmonicity checks are decidable.
Built-in oracles cover free abelian groups, the discrete Heisenberg group,
the infinite dihedral group and finite groups given by multiplication table.
"""

from __future__ import annotations

import json
import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import OracleUnavailableError, UsageError
from .linalg import matrix_rank, nullspace

Word = tuple  # finite sequence of generator symbols; () is the empty word

DEFAULT_BALL_RADIUS_CAP = 12


# ---------------------------------------------------------------------------
# Oracles: exact multiplication on normal forms
# ---------------------------------------------------------------------------

class WordOracle:
    """Exact group arithmetic on unique normal forms.

    Normal-form equality is plain equality of the returned objects, and
    ``abelian_coords`` maps a normal form to integer coordinates spanning the
    free part of the abelianization (empty when that part is trivial).
    """

    kind = "none"
    abelian_dim = 0

    def identity(self):
        raise NotImplementedError

    def multiply(self, g, h):
        raise NotImplementedError

    def image(self, symbol):
        raise NotImplementedError

    def abelian_coords(self, g) -> tuple:
        raise NotImplementedError


class FreeAbelianOracle(WordOracle):
    kind = "free_abelian"

    def __init__(self, images: dict):
        if not images:
            raise ValueError("free abelian oracle needs generator images")
        dims = {len(v) for v in images.values()}
        if len(dims) != 1:
            raise ValueError("generator images must share a dimension")
        self.abelian_dim = dims.pop()
        self._images = {s: tuple(int(x) for x in v) for s, v in images.items()}

    def identity(self):
        return (0,) * self.abelian_dim

    def multiply(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def image(self, symbol):
        return self._images[symbol]

    def abelian_coords(self, g):
        return g


class HeisenbergOracle(WordOracle):
    """Upper unitriangular 3x3 integer matrices as triples (a, b, c)."""

    kind = "heisenberg"
    abelian_dim = 2

    _IMAGES = {
        "a": (1, 0, 0),
        "a_inv": (-1, 0, 0),
        "b": (0, 1, 0),
        "b_inv": (0, -1, 0),
        "c": (0, 0, 1),
        "c_inv": (0, 0, -1),
    }

    def identity(self):
        return (0, 0, 0)

    def multiply(self, g, h):
        a1, b1, c1 = g
        a2, b2, c2 = h
        # matrix product accumulates the corner entry c1 + c2 + a1*b2
        return (a1 + a2, b1 + b2, c1 + c2 + a1 * b2)

    def image(self, symbol):
        try:
            return self._IMAGES[symbol]
        except KeyError:
            raise UsageError(f"heisenberg oracle has no generator {symbol!r}")

    def abelian_coords(self, g):
        return (g[0], g[1])


class DihedralInfiniteOracle(WordOracle):
    """Elements a^k b^eps as pairs (k, eps); b^2 = e and b a b = a^-1."""

    kind = "dihedral_infinite"
    abelian_dim = 0

    _IMAGES = {"a": (1, 0), "b": (0, 1)}

    def identity(self):
        return (0, 0)

    def multiply(self, g, h):
        k1, e1 = g
        k2, e2 = h
        return (k1 + (k2 if e1 == 0 else -k2), e1 ^ e2)

    def image(self, symbol):
        try:
            return self._IMAGES[symbol]
        except KeyError:
            raise UsageError(f"dihedral oracle has no generator {symbol!r}")

    def abelian_coords(self, g):
        return ()


class FiniteTableOracle(WordOracle):
    kind = "finite_table"
    abelian_dim = 0

    def __init__(self, table, images: dict, identity: int = 0):
        self._table = [tuple(int(x) for x in row) for row in table]
        size = len(self._table)
        if any(len(row) != size for row in self._table):
            raise ValueError("multiplication table must be square")
        if not 0 <= identity < size:
            raise ValueError("identity index out of range")
        self._identity = int(identity)
        self._images = {s: int(i) for s, i in images.items()}
        for s, i in self._images.items():
            if not 0 <= i < size:
                raise ValueError(f"image of {s!r} out of range")
        self.size = size

    def identity(self):
        return self._identity

    def multiply(self, g, h):
        return self._table[g][h]

    def image(self, symbol):
        try:
            return self._images[symbol]
        except KeyError:
            raise UsageError(f"finite table has no generator {symbol!r}")

    def abelian_coords(self, g):
        return ()


# ---------------------------------------------------------------------------
# GroupSpec
# ---------------------------------------------------------------------------

class GroupSpec:
    """Input data (G, Y, F, abelianization vectors) for one model.

    Immutable after construction.  ``generators`` fixes the ordering used by
    every array, grid and CSV column downstream.
    """

    def __init__(self, name, generators, potential, cvec, rank, oracle=None):
        self.name = str(name)
        self.generators = tuple(str(s) for s in generators)
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator symbols must be distinct")
        self.potential = {s: float(potential[s]) for s in self.generators}
        self.rank = int(rank)
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        self.cvec = {}
        for s in self.generators:
            v = tuple(float(x) for x in cvec.get(s, ()))
            if len(v) != self.rank:
                raise ValueError(
                    f"c-vector of {s!r} has length {len(v)}, expected rank {self.rank}")
            self.cvec[s] = v
        self.oracle = oracle

        self._index = {s: i for i, s in enumerate(self.generators)}
        self.F = np.array([self.potential[s] for s in self.generators])
        self.C = np.array([self.cvec[s] for s in self.generators], dtype=float)
        self.C = self.C.reshape(len(self.generators), self.rank)
        self.F.flags.writeable = False
        self.C.flags.writeable = False
        self._abelian_matrix = None

    def __repr__(self):
        return f"GroupSpec({self.name!r}, |Y|={len(self.generators)}, rank={self.rank})"

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UsageError(f"unknown generator {symbol!r} for group {self.name!r}")

    def word(self, symbols) -> Word:
        w = tuple(symbols)
        for s in w:
            self.index(s)
        return w

    def word_potential(self, t: Word) -> float:
        return float(sum(self.potential[s] for s in t))

    def require_oracle(self) -> WordOracle:
        if self.oracle is None:
            raise OracleUnavailableError(
                f"group {self.name!r} has no word oracle")
        return self.oracle

    def abelian_matrix(self) -> np.ndarray:
        """Matrix A with A @ abelian_coords(g) = c(g), solved from generators."""
        if self._abelian_matrix is None:
            oracle = self.require_oracle()
            d = oracle.abelian_dim
            if self.rank == 0 or d == 0:
                a = np.zeros((self.rank, d))
            else:
                k = np.array([oracle.abelian_coords(oracle.image(s))
                              for s in self.generators], dtype=float)  # m x d
                a, *_ = np.linalg.lstsq(k, self.C, rcond=None)
                a = a.T  # rank x d
            a.flags.writeable = False
            self._abelian_matrix = a
        return self._abelian_matrix


# ---------------------------------------------------------------------------
# Word operations
# ---------------------------------------------------------------------------

def endpoint(spec: GroupSpec, t: Word):
    """Product of the letters of t in the oracle's normal form."""
    oracle = spec.require_oracle()
    g = oracle.identity()
    for s in t:
        g = oracle.multiply(g, oracle.image(s))
    return g


def same_endpoint(spec: GroupSpec, t: Word, u: Word) -> bool:
    return endpoint(spec, t) == endpoint(spec, u)


def abelianized_word(spec: GroupSpec, t: Word) -> np.ndarray:
    """Image of the endpoint under (c'_1, ..., c'_n), summed letterwise."""
    out = np.zeros(spec.rank)
    for s in t:
        out += spec.C[spec.index(s)]
    return out


def abelianized_element(spec: GroupSpec, g) -> np.ndarray:
    oracle = spec.require_oracle()
    coords = np.array(oracle.abelian_coords(g), dtype=float)
    return spec.abelian_matrix() @ coords


def abelianized(spec: GroupSpec, t_or_g) -> np.ndarray:
    """Dispatch on words (tuples of symbols) versus oracle normal forms."""
    if isinstance(t_or_g, tuple) and all(isinstance(s, str) for s in t_or_g):
        return abelianized_word(spec, t_or_g)
    return abelianized_element(spec, t_or_g)


@dataclass(frozen=True)
class Ball:
    """Endpoints of words of length <= radius, with right neighbors recorded.

    ``neighbors[g]`` lists (s, g*s) in generator order; the products may lie
    outside the ball.
    """

    radius: int
    elements: tuple
    neighbors: dict = field(repr=False)

    def __contains__(self, g):
        return g in self.neighbors

    def __len__(self):
        return len(self.elements)


def ball(spec: GroupSpec, radius: int, radius_cap: int = DEFAULT_BALL_RADIUS_CAP) -> Ball:
    """Breadth-first Cayley ball; deterministic layer-by-layer ordering."""
    oracle = spec.require_oracle()
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius > radius_cap:
        raise ValueError(f"radius {radius} exceeds cap {radius_cap}")
    seen = {oracle.identity(): None}
    order = [oracle.identity()]
    frontier = [oracle.identity()]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in spec.generators:
                h = oracle.multiply(g, oracle.image(s))
                if h not in seen:
                    seen[h] = None
                    order.append(h)
                    nxt.append(h)
        if not nxt:
            break  # finite group saturated
        frontier = nxt
    neighbors = {}
    for g in order:
        neighbors[g] = tuple((s, oracle.multiply(g, oracle.image(s)))
                             for s in spec.generators)
    return Ball(radius=radius, elements=tuple(order), neighbors=neighbors)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    errors: list
    warnings: list

    @property
    def ok(self) -> bool:
        return not self.errors


def _dual_cone_has_ray(C: np.ndarray, tol: float) -> bool:
    """True when {v : v . c_s <= 0 for all s} contains a nonzero vector.

    Extreme rays of the dual cone are kernels of (n-1)-subsets of the c_s;
    the rank hypothesis rules out lines, so checking those rays suffices.
    """
    m, n = C.shape
    scale = max(1.0, float(np.max(np.abs(C)))) if C.size else 1.0
    for subset in itertools.combinations(range(m), n - 1):
        rows = C[list(subset)].reshape(len(subset), n)
        kern = nullspace(rows, tol)
        if len(kern) != 1:
            continue
        w = kern[0]
        for cand in (w, -w):
            if np.max(C @ cand) <= tol * scale:
                return True
    return False


def validate_spec(spec: GroupSpec, config: SolverConfig = DEFAULT_CONFIG) -> ValidationReport:
    """Check the standing assumptions; returns a report, never raises."""
    errors, warnings = [], []
    m = len(spec.generators)
    if m < 2:
        errors.append("generator set must contain at least two elements")
    if any(f <= 0 for f in spec.potential.values()):
        errors.append("potential must be strictly positive on every generator")

    if spec.rank > 0 and m >= 2:
        if matrix_rank(spec.C, config.eps_geom) < spec.rank:
            errors.append(
                f"c-vectors do not span R^{spec.rank} (rank deficient)")
        elif _dual_cone_has_ray(spec.C, config.eps_geom):
            errors.append(
                "positive-spanning failure: some direction v has v.c_s <= 0 "
                "for every generator")

    # near-identical c_s/F(s) directions merge cones in the fan
    ratios = spec.C / spec.F[:, None] if spec.rank > 0 else np.zeros((m, 0))
    for i in range(m):
        for j in range(i + 1, m):
            if np.linalg.norm(ratios[i] - ratios[j]) <= config.eps_geom:
                warnings.append(
                    f"generators {spec.generators[i]!r} and {spec.generators[j]!r} "
                    "have numerically equal c_s/F(s); their cone labels merge")

    if spec.oracle is not None and not errors:
        dev = _homomorphism_deviation(spec, max_len=4)
        if dev > 1e-9:
            errors.append(
                f"abelianization is not constant on equal-endpoint words "
                f"(max deviation {dev:.3e})")
    return ValidationReport(errors=errors, warnings=warnings)


def _homomorphism_deviation(spec: GroupSpec, max_len: int) -> float:
    """Max spread of letterwise c-sums within an endpoint class, words <= max_len."""
    if spec.rank == 0:
        return 0.0
    classes = {}
    worst = 0.0
    for length in range(max_len + 1):
        for t in itertools.product(spec.generators, repeat=length):
            g = endpoint(spec, t)
            vec = abelianized_word(spec, t)
            ref = classes.setdefault(g, vec)
            if ref is not vec:
                worst = max(worst, float(np.max(np.abs(vec - ref))))
    return worst


# ---------------------------------------------------------------------------
# Built-in groups and JSON interchange
# ---------------------------------------------------------------------------

def heisenberg_spec() -> GroupSpec:
    """Canonical six-generator Heisenberg model, potential identically one."""
    gens = ("a", "a_inv", "b", "b_inv", "c", "c_inv")
    cvec = {
        "a": (1.0, 0.0), "a_inv": (-1.0, 0.0),
        "b": (0.0, 1.0), "b_inv": (0.0, -1.0),
        "c": (0.0, 0.0), "c_inv": (0.0, 0.0),
    }
    return GroupSpec("heisenberg", gens, {s: 1.0 for s in gens}, cvec,
                     rank=2, oracle=HeisenbergOracle())


def dihedral_infinite_spec() -> GroupSpec:
    gens = ("a", "b")
    return GroupSpec("dihedral_infinite", gens, {s: 1.0 for s in gens},
                     {s: () for s in gens}, rank=0,
                     oracle=DihedralInfiniteOracle())


def free_abelian_spec(n: int, potential=None, name=None) -> GroupSpec:
    """Z^n with generators +-e_i named e<i>/e<i>_inv; optional potential map."""
    if n < 1:
        raise ValueError("free abelian rank must be >= 1")
    gens, cvec, images = [], {}, {}
    for i in range(n):
        plus, minus = f"e{i + 1}", f"e{i + 1}_inv"
        unit = tuple(1.0 if j == i else 0.0 for j in range(n))
        gens += [plus, minus]
        cvec[plus] = unit
        cvec[minus] = tuple(-x for x in unit)
        images[plus] = tuple(int(x) for x in unit)
        images[minus] = tuple(-int(x) for x in unit)
    pot = {s: 1.0 for s in gens}
    if potential:
        pot.update({s: float(v) for s, v in potential.items()})
    return GroupSpec(name or f"zn:{n}", gens, pot, cvec, rank=n,
                     oracle=FreeAbelianOracle(images))


def cyclic_spec(order: int) -> GroupSpec:
    """Finite cyclic group of the given order with generators g, g_inv."""
    if order < 2:
        raise ValueError("cyclic order must be >= 2")
    table = [[(i + j) % order for j in range(order)] for i in range(order)]
    oracle = FiniteTableOracle(table, {"g": 1 % order, "g_inv": (order - 1) % order})
    gens = ("g", "g_inv")
    return GroupSpec(f"cyclic:{order}", gens, {s: 1.0 for s in gens},
                     {s: () for s in gens}, rank=0, oracle=oracle)


def builtin_spec(name: str) -> GroupSpec:
    if name == "heisenberg":
        return heisenberg_spec()
    if name == "dihedral_infinite":
        return dihedral_infinite_spec()
    if name.startswith("zn:"):
        return free_abelian_spec(int(name.split(":", 1)[1]))
    if name.startswith("cyclic:"):
        return cyclic_spec(int(name.split(":", 1)[1]))
    raise UsageError(f"unknown built-in group {name!r}")


def _oracle_from_json(data: dict) -> WordOracle | None:
    kind = data.get("oracle", "none")
    if kind == "none":
        return None
    if kind == "heisenberg":
        return HeisenbergOracle()
    if kind == "dihedral_infinite":
        return DihedralInfiniteOracle()
    if kind == "free_abelian":
        # generator images are the c-vectors, which must be integral
        images = {}
        for s, v in data["c"].items():
            rounded = [round(x) for x in v]
            if any(abs(r - x) > 1e-9 for r, x in zip(rounded, v)):
                raise UsageError(
                    f"free_abelian oracle needs integral c-vectors; {s!r} has {v}")
            images[s] = tuple(int(r) for r in rounded)
        return FreeAbelianOracle(images)
    if kind == "finite_table":
        table = data.get("table")
        if not table:
            raise UsageError("finite_table oracle requires a 'table' object")
        return FiniteTableOracle(table["product"], table["images"],
                                 identity=table.get("identity", 0))
    raise UsageError(f"unknown oracle kind {kind!r}")


def spec_from_json(data: dict) -> GroupSpec:
    try:
        gens = data["generators"]
        potential = data["F"]
        rank = data["rank"]
        cvec = {s: tuple(v) for s, v in data.get("c", {}).items()}
    except KeyError as exc:
        raise UsageError(f"group json missing field {exc}")
    return GroupSpec(data.get("name", "unnamed"), gens, potential, cvec,
                     rank, oracle=_oracle_from_json(data))


def spec_to_json(spec: GroupSpec) -> dict:
    return {
        "name": spec.name,
        "generators": list(spec.generators),
        "F": dict(spec.potential),
        "rank": spec.rank,
        "c": {s: list(v) for s, v in spec.cvec.items()},
        "oracle": spec.oracle.kind if spec.oracle is not None else "none",
    }


def load_group(name_or_path: str) -> GroupSpec:
    """Resolve a built-in name or a path to a group JSON file."""
    if name_or_path.endswith(".json"):
        try:
            with open(name_or_path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read group file: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed group json: {exc}")
        return spec_from_json(data)
    return builtin_spec(name_or_path)


def parse_word(spec: GroupSpec, text: str) -> Word:
    """Comma-separated generator symbols; empty string is the empty word."""
    text = text.strip()
    if not text:
        return ()
    return spec.word(s.strip() for s in text.split(","))
