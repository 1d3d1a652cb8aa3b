"""Random dynamical systems with affine torus fibers over a finite base.

A system consists of a finite base space (labels, probability weights, and a
permutation action of the group generators), a fiber dimension d <= 3, one
fiber domain per base point (the full torus or a finite union of coordinate
slices), and one affine torus map x -> Mx + c (mod 1) per generator and base
point, with M an integer matrix of determinant +-1.

The pairwise separation of two points x, y under the cocycle depends only on
the difference vector A(x - y) mod 1, because shifts cancel. All estimators
therefore walk a single difference vector along the base orbit instead of two
points; isometric fibers keep that vector constant bitwise, which is what the
exactness tests lean on. ``torus_distance`` and the walkers share one folding
kernel so their outputs agree bitwise on identical inputs.

Integer matrix entries use Python ints (arbitrary precision), so cocycle
composition cannot overflow; entry growth is bounded in practice by the
word-length cap in :func:`validate`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .groups import AmenableGroup, BudgetError

DTILDE_CONVENTION = (
    "pair separation takes the sup over support fibers containing both points; "
    "+inf when the points share no fiber"
)

MEMBERSHIP_TOL = 1e-9


class SystemSpecError(ValueError):
    """Raised when a system description is structurally malformed."""


class DomainError(ValueError):
    """Raised when a point violates a fiber-membership precondition."""


# ---------------------------------------------------------------------------
# torus geometry

def reduce_point(x) -> tuple[float, ...]:
    """Fold coordinates into [0, 1)."""
    return tuple(float(v) % 1.0 for v in x)


def torus_delta(x, y) -> tuple[float, ...]:
    """Coordinatewise difference x - y mod 1, in [0, 1)."""
    return tuple((float(a) - float(b)) % 1.0 for a, b in zip(x, y))


def _fold(c: float) -> float:
    # distance of c in [0, 1) to the nearest integer
    return c if c <= 0.5 else 1.0 - c


def fold_norm(delta) -> float:
    """Euclidean norm of the shortest lift of a difference vector."""
    if len(delta) == 1:
        return _fold(delta[0] % 1.0)
    return math.sqrt(math.fsum(_fold(c % 1.0) ** 2 for c in delta))


def torus_distance(x, y) -> float:
    """Flat metric on the d-torus: fold each coordinate, then take the norm."""
    return fold_norm(torus_delta(x, y))


def torus_diameter(dim: int) -> float:
    return math.sqrt(dim) / 2.0


# ---------------------------------------------------------------------------
# integer matrices (d <= 3)

def _mat_det(m) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
    raise SystemSpecError(f"fiber dimension {n} not supported (need 1..3)")


def _mat_adjugate(m):
    n = len(m)
    if n == 1:
        return ((1,),)
    if n == 2:
        return ((m[1][1], -m[0][1]), (-m[1][0], m[0][0]))
    if n == 3:
        def cof(i, j):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
            return (-1) ** (i + j) * minor

        # adjugate = transpose of the cofactor matrix
        return tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))
    raise SystemSpecError(f"fiber dimension {n} not supported (need 1..3)")


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _identity_matrix(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class FiberMap:
    """Affine torus map x -> Mx + c (mod 1); M integer with det +-1."""

    matrix: tuple[tuple[int, ...], ...]
    shift: tuple[float, ...]

    def __post_init__(self):
        n = len(self.matrix)
        mat = tuple(tuple(int(v) for v in row) for row in self.matrix)
        for row in self.matrix:
            for v in row:
                if int(v) != v:
                    raise SystemSpecError(f"matrix entry {v!r} is not an integer")
            if len(row) != n:
                raise SystemSpecError("matrix must be square")
        if len(self.shift) != n:
            raise SystemSpecError("shift length must match matrix size")
        det = _mat_det(mat)
        if det not in (1, -1):
            raise SystemSpecError(f"matrix determinant must be +-1, got {det}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "shift", tuple(float(s) % 1.0 for s in self.shift))

    @classmethod
    def identity(cls, dim: int) -> "FiberMap":
        return cls(_identity_matrix(dim), (0.0,) * dim)

    @classmethod
    def rotation(cls, angles) -> "FiberMap":
        angles = tuple(float(a) for a in angles)
        return cls(_identity_matrix(len(angles)), angles)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, x) -> tuple[float, ...]:
        n = self.dim
        return tuple(
            (math.fsum(self.matrix[i][j] * x[j] for j in range(n)) + self.shift[i]) % 1.0
            for i in range(n)
        )

    def compose(self, other: "FiberMap") -> "FiberMap":
        """self after other."""
        n = self.dim
        mat = _mat_mul(self.matrix, other.matrix)
        shift = tuple(
            (math.fsum(self.matrix[i][j] * other.shift[j] for j in range(n)) + self.shift[i]) % 1.0
            for i in range(n)
        )
        return FiberMap(mat, shift)

    def inverse(self) -> "FiberMap":
        det = _mat_det(self.matrix)
        adj = _mat_adjugate(self.matrix)
        inv = tuple(tuple(det * v for v in row) for row in adj)  # 1/det == det here
        n = self.dim
        shift = tuple(
            (-math.fsum(inv[i][j] * self.shift[j] for j in range(n))) % 1.0
            for i in range(n)
        )
        return FiberMap(inv, shift)

    def identity_residual(self) -> float:
        """Distance from the identity: inf if the matrix differs, else max
        coordinate distance of the shift to the integers."""
        if self.matrix != _identity_matrix(self.dim):
            return math.inf
        if not self.shift:
            return 0.0
        return max(_fold(c) for c in self.shift)


# ---------------------------------------------------------------------------
# fiber domains

@dataclass(frozen=True)
class FiberSpace:
    """Either the whole torus or a finite union of coordinate slices.

    A slice fixes some coordinates to constants; the remaining ones are free.
    ``slices=None`` means the full torus.
    """

    dim: int
    slices: tuple[tuple[tuple[int, float], ...], ...] | None = None

    def __post_init__(self):
        if self.slices is not None:
            norm = []
            for sl in self.slices:
                fixed = tuple(sorted((int(ax), float(val) % 1.0) for ax, val in sl))
                for ax, _ in fixed:
                    if not 0 <= ax < self.dim:
                        raise SystemSpecError(f"slice axis {ax} out of range")
                if len({ax for ax, _ in fixed}) != len(fixed):
                    raise SystemSpecError("slice fixes an axis twice")
                norm.append(fixed)
            if not norm:
                raise SystemSpecError("slice list must be nonempty")
            object.__setattr__(self, "slices", tuple(norm))

    @classmethod
    def full(cls, dim: int) -> "FiberSpace":
        return cls(dim, None)

    @property
    def is_full(self) -> bool:
        return self.slices is None

    def membership_residual(self, x) -> float:
        """0 for members; otherwise the worst fixed-coordinate defect of the
        nearest slice."""
        if self.slices is None:
            return 0.0
        best = math.inf
        for sl in self.slices:
            worst = 0.0
            for ax, val in sl:
                worst = max(worst, _fold((x[ax] - val) % 1.0))
            best = min(best, worst)
        return best

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.membership_residual(x) <= tol

    def sample(self, rng) -> tuple[float, ...]:
        pt = [float(v) for v in rng.random(self.dim)]
        if self.slices is not None:
            sl = self.slices[int(rng.integers(len(self.slices)))]
            for ax, val in sl:
                pt[ax] = val
        return tuple(pt)

    def sample_near(self, x, delta: float, rng) -> tuple[float, ...]:
        """A member point within torus distance < delta of x (x must belong)."""
        if delta <= 0:
            raise ValueError("delta must be positive")
        if not self.contains(x):
            raise DomainError("base point is not in the fiber domain")
        if self.slices is None:
            free = list(range(self.dim))
        else:
            sl = next(s for s in self.slices
                      if all(_fold((x[ax] - val) % 1.0) <= MEMBERSHIP_TOL for ax, val in s))
            fixed_axes = {ax for ax, _ in sl}
            free = [ax for ax in range(self.dim) if ax not in fixed_axes]
            x = list(x)
            for ax, val in sl:
                x[ax] = val
            x = tuple(x)
        if not free:
            return tuple(x)
        vec = rng.standard_normal(len(free))
        norm = math.sqrt(float(np.dot(vec, vec)))
        if norm == 0.0:
            return tuple(x)
        radius = delta * float(rng.random()) ** (1.0 / len(free))
        out = list(x)
        for ax, comp in zip(free, vec):
            out[ax] = (out[ax] + radius * float(comp) / norm) % 1.0
        return tuple(out)

    def grid(self, resolution: int, budget: int = 200_000) -> tuple[tuple[float, ...], ...]:
        """Deterministic grid of member points (resolution per free axis)."""
        if resolution < 1:
            raise ValueError("resolution must be positive")
        axis = [i / resolution for i in range(resolution)]
        points: list[tuple[float, ...]] = []
        if self.slices is None:
            if resolution ** self.dim > budget:
                raise BudgetError("grid over budget")
            points.extend(itertools.product(*([axis] * self.dim)))
        else:
            for sl in self.slices:
                fixed = dict(sl)
                free = [ax for ax in range(self.dim) if ax not in fixed]
                if resolution ** len(free) * len(self.slices) > budget:
                    raise BudgetError("grid over budget")
                for combo in itertools.product(*([axis] * len(free))):
                    pt = [0.0] * self.dim
                    for ax, val in fixed.items():
                        pt[ax] = val
                    for ax, v in zip(free, combo):
                        pt[ax] = v
                    points.append(tuple(pt))
        return tuple(points)


# ---------------------------------------------------------------------------
# base space

class _PermPowers:
    """O(1) powers of a permutation via its cycle decomposition."""

    def __init__(self, perm):
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise SystemSpecError(f"not a permutation of 0..{n - 1}: {perm}")
        self.cycle_of = [0] * n
        self.pos_in_cycle = [0] * n
        self.cycles = []
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                self.cycle_of[i] = len(self.cycles)
                self.pos_in_cycle[i] = len(cyc)
                cyc.append(i)
                i = perm[i]
            self.cycles.append(cyc)

    def apply(self, i: int, k: int) -> int:
        cyc = self.cycles[self.cycle_of[i]]
        return cyc[(self.pos_in_cycle[i] + k) % len(cyc)]


@dataclass
class BaseSpace:
    """Finite base: labels, probability weights, one permutation per generator."""

    labels: tuple[str, ...]
    weights: tuple[float, ...]
    generator_perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        self.labels = tuple(str(l) for l in self.labels)
        self.weights = tuple(float(w) for w in self.weights)
        if not self.labels:
            raise SystemSpecError("base space needs at least one point")
        if len(set(self.labels)) != len(self.labels):
            raise SystemSpecError("base labels must be distinct")
        if len(self.weights) != len(self.labels):
            raise SystemSpecError("one weight per base point required")
        for w in self.weights:
            if w < 0:
                raise SystemSpecError(f"weights must be nonnegative, got {w}")
        if not any(w > 0 for w in self.weights):
            raise SystemSpecError("support must be nonempty")
        self.generator_perms = tuple(tuple(int(i) for i in p) for p in self.generator_perms)
        self._powers = []
        for p in self.generator_perms:
            if len(p) != len(self.labels):
                raise SystemSpecError("permutation length must match base size")
            self._powers.append(_PermPowers(p))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w > 0)

    def index_of(self, omega) -> int:
        if isinstance(omega, str):
            try:
                return self.labels.index(omega)
            except ValueError:
                raise SystemSpecError(f"unknown base label {omega!r}") from None
        i = int(omega)
        if not 0 <= i < self.size:
            raise SystemSpecError(f"base index {i} out of range")
        return i

    def act_generator(self, gen: int, omega_idx: int, steps: int = 1) -> int:
        return self._powers[gen].apply(omega_idx, steps)

    def act(self, g, omega_idx: int) -> int:
        for i, steps in enumerate(g):
            omega_idx = self._powers[i].apply(omega_idx, steps)
        return omega_idx


# ---------------------------------------------------------------------------
# the system

@dataclass
class RandomDynamicalSystem:
    """Group action on a finite base with affine torus cocycle maps.

    ``maps[i][w]`` is the fiber map attached to generator i at base point w.
    ``identity_maps`` defaults to true identities; it exists so that the
    identity axiom is a checkable property rather than an assumption.
    """

    name: str
    group: AmenableGroup
    base: BaseSpace
    dim: int
    fibers: tuple[FiberSpace, ...]
    maps: tuple[tuple[FiberMap, ...], ...]
    identity_maps: tuple[FiberMap, ...] | None = None
    declared: dict = field(default_factory=dict)

    def __post_init__(self):
        gens = self.group.rank
        if len(self.maps) != gens:
            raise SystemSpecError(f"need one map row per generator ({gens})")
        if len(self.fibers) != self.base.size:
            raise SystemSpecError("need one fiber domain per base point")
        for fs in self.fibers:
            if fs.dim != self.dim:
                raise SystemSpecError("fiber domain dimension mismatch")
        if len(self.base.generator_perms) != gens:
            raise SystemSpecError("need one base permutation per generator")
        for row in self.maps:
            if len(row) != self.base.size:
                raise SystemSpecError("need one fiber map per base point")
            for fm in row:
                if fm.dim != self.dim:
                    raise SystemSpecError("fiber map dimension mismatch")
        if self.identity_maps is not None:
            if len(self.identity_maps) != self.base.size:
                raise SystemSpecError("need one identity map per base point")
        self._inv_maps = tuple(
            tuple(fm.inverse() for fm in row) for row in self.maps
        )

    # -- basic action ------------------------------------------------------

    def identity_map_at(self, omega_idx: int) -> FiberMap:
        if self.identity_maps is None:
            return FiberMap.identity(self.dim)
        return self.identity_maps[omega_idx]

    def generator_map(self, gen: int, omega_idx: int) -> FiberMap:
        return self.maps[gen][omega_idx]

    def inverse_generator_map(self, gen: int, omega_idx: int) -> FiberMap:
        """Map of the inverse generator at w, i.e. the inverse of the
        generator map at the predecessor fiber."""
        prev = self.base.act_generator(gen, omega_idx, -1)
        return self._inv_maps[gen][prev]

    def element_map(self, g, omega_idx: int) -> FiberMap:
        """Cocycle map F_{g, w} composed along the canonical coordinate path."""
        g = self.group.check_element(g)
        cur = self.identity_map_at(omega_idx)
        w = omega_idx
        for i, steps in enumerate(g):
            direction = 1 if steps >= 0 else -1
            for _ in range(abs(steps)):
                if direction == 1:
                    cur = self.maps[i][w].compose(cur)
                    w = self.base.act_generator(i, w, 1)
                else:
                    w = self.base.act_generator(i, w, -1)
                    cur = self._inv_maps[i][w].compose(cur)
        return cur

    def apply(self, g, omega, x) -> tuple[float, ...]:
        """Fiber image F_{g, w} x."""
        idx = self.base.index_of(omega)
        return self.element_map(g, idx).apply(reduce_point(x))

    def skew_apply(self, g, state) -> tuple[int, tuple[float, ...]]:
        """One step of the skew product: (w, x) -> (g w, F_{g, w} x)."""
        omega, x = state
        idx = self.base.index_of(omega)
        return self.base.act(self.group.check_element(g), idx), self.apply(g, idx, x)

    # -- separation --------------------------------------------------------

    def admissible_fibers(self, x, y) -> tuple[int, ...]:
        x = reduce_point(x)
        y = reduce_point(y)
        return tuple(
            i for i in self.base.support
            if self.fibers[i].contains(x) and self.fibers[i].contains(y)
        )

    def pair_engine(self, x, y) -> "PairEngine":
        return PairEngine(self, x, y)

    def dtilde(self, g, x, y) -> float:
        """Sup over support fibers containing both points of the separation
        after applying g; +inf when the points share no fiber."""
        return self.pair_engine(x, y).dtilde_at(g)


# ---------------------------------------------------------------------------
# difference-vector walks

class _LineWalk:
    """Values of the folded difference vector along a Z-orbit, two-sided."""

    def __init__(self, system: RandomDynamicalSystem, omega0: int, delta0):
        self.sys = system
        self.dim = system.dim
        self.right_vals: list[float] = []   # index t >= 0
        self.left_vals: list[float] = []    # left_vals[j] is t = -1-j
        self.rstate = (omega0, delta0)      # state at t = len(right_vals)
        self.lstate = (omega0, delta0)      # state at t = -len(left_vals)

    def _step_fwd(self, state):
        w, d = state
        mat = self.sys.maps[0][w].matrix
        nw = self.sys.base.act_generator(0, w, 1)
        return nw, self._mat_step(mat, d)

    def _step_back(self, state):
        w, d = state
        pw = self.sys.base.act_generator(0, w, -1)
        mat = self.sys._inv_maps[0][pw].matrix
        return pw, self._mat_step(mat, d)

    def _mat_step(self, mat, d):
        if self.dim == 1:
            return ((mat[0][0] * d[0]) % 1.0,)
        if self.dim == 2:
            return (
                (mat[0][0] * d[0] + mat[0][1] * d[1]) % 1.0,
                (mat[1][0] * d[0] + mat[1][1] * d[1]) % 1.0,
            )
        return tuple(
            (mat[i][0] * d[0] + mat[i][1] * d[1] + mat[i][2] * d[2]) % 1.0
            for i in range(3)
        )

    def ensure(self, lo: int, hi: int):
        while len(self.right_vals) < hi:
            self.right_vals.append(fold_norm(self.rstate[1]))
            self.rstate = self._step_fwd(self.rstate)
        while -len(self.left_vals) > lo:
            self.lstate = self._step_back(self.lstate)
            self.left_vals.append(fold_norm(self.lstate[1]))

    def array(self, lo: int, hi: int) -> np.ndarray:
        """Values at t = lo, ..., hi-1 as a float array."""
        self.ensure(lo, hi)
        chunk: list[float] = []
        if lo < 0:
            left = self.left_vals[: -lo]
            left.reverse()
            chunk.extend(left[: min(hi, 0) - lo])
        if hi > 0:
            chunk.extend(self.right_vals[max(lo, 0):hi])
        return np.asarray(chunk, dtype=np.float64)


class PairEngine:
    """Separation values of one pair (x, y) along base orbits.

    Exposes per-fiber value arrays over integer ranges on Z (the hot path) and
    memoized per-element values on every group. Values depend only on the
    difference vector, which each step multiplies by the local integer matrix
    and reduces mod 1.
    """

    def __init__(self, system: RandomDynamicalSystem, x, y):
        self.sys = system
        self.x = reduce_point(x)
        self.y = reduce_point(y)
        if len(self.x) != system.dim or len(self.y) != system.dim:
            raise DomainError("point dimension does not match the system")
        self.delta0 = torus_delta(self.x, self.y)
        self.admissible = system.admissible_fibers(self.x, self.y)
        self._line_walks: dict[int, _LineWalk] = {}
        self._memo: dict[tuple[int, tuple[int, ...]], tuple[int, tuple[float, ...]]] = {}

    # -- Z fast path --------------------------------------------------------

    def _walk(self, omega_idx: int) -> _LineWalk:
        if not self.sys.group.is_line:
            raise SystemSpecError("range scans need the group Z")
        lw = self._line_walks.get(omega_idx)
        if lw is None:
            lw = _LineWalk(self.sys, omega_idx, self.delta0)
            self._line_walks[omega_idx] = lw
        return lw

    def fiber_range(self, omega, lo: int, hi: int) -> np.ndarray:
        """Separation values in fiber omega at times lo..hi-1 (Z only)."""
        idx = self.sys.base.index_of(omega)
        return self._walk(idx).array(lo, hi)

    def dtilde_range(self, lo: int, hi: int) -> np.ndarray:
        if not self.admissible:
            return np.full(hi - lo, math.inf)
        parts = [self._walk(i).array(lo, hi) for i in self.admissible]
        return np.maximum.reduce(parts)

    def integral_range(self, lo: int, hi: int) -> np.ndarray:
        self._require_full_support_membership()
        out = np.zeros(hi - lo)
        for i in self.sys.base.support:
            out += self.sys.base.weights[i] * self._walk(i).array(lo, hi)
        return out

    # -- any group ----------------------------------------------------------

    def _state_at(self, g, omega_idx: int) -> tuple[int, tuple[float, ...]]:
        """Memoized (base point, difference vector) after applying g,
        walking the canonical coordinate path iteratively."""
        key = (omega_idx, g)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        # collect the predecessor chain until a memo hit or the identity
        chain: list[tuple[tuple[int, ...], int, int]] = []  # (elem, coord, dir)
        cur = g
        grp = self.sys.group
        while (omega_idx, cur) not in self._memo and any(cur):
            i = max(k for k in range(len(cur)) if cur[k])
            if i < grp.free_rank:
                d = 1 if cur[i] > 0 else -1
            else:
                d = 1  # cyclic coordinates walk forward canonically
            prev = list(cur)
            prev[i] -= d
            if i >= grp.free_rank:
                prev[i] %= grp.cyclic_orders[i - grp.free_rank]
            prev_t = tuple(prev)
            chain.append((cur, i, d))
            cur = prev_t
        state = self._memo.get((omega_idx, cur), (omega_idx, self.delta0))
        self._memo[(omega_idx, cur)] = state
        for elem, i, d in reversed(chain):
            w, delta = state
            if d == 1:
                mat = self.sys.maps[i][w].matrix
                nw = self.sys.base.act_generator(i, w, 1)
            else:
                nw = self.sys.base.act_generator(i, w, -1)
                mat = self.sys._inv_maps[i][nw].matrix
            n = self.sys.dim
            nd = tuple(
                math.fsum(mat[r][c] * delta[c] for c in range(n)) % 1.0 for r in range(n)
            )
            state = (nw, nd)
            self._memo[(omega_idx, elem)] = state
        return state

    def fiber_at(self, g, omega) -> float:
        idx = self.sys.base.index_of(omega)
        g = self.sys.group.check_element(g)
        if self.sys.group.is_line:
            return float(self._walk(idx).array(g[0], g[0] + 1)[0])
        return fold_norm(self._state_at(g, idx)[1])

    def dtilde_at(self, g) -> float:
        if not self.admissible:
            return math.inf
        return max(self.fiber_at(g, i) for i in self.admissible)

    def integral_at(self, g) -> float:
        self._require_full_support_membership()
        return math.fsum(
            self.sys.base.weights[i] * self.fiber_at(g, i) for i in self.sys.base.support
        )

    def _require_full_support_membership(self):
        for i in self.sys.base.support:
            fs = self.sys.fibers[i]
            if not (fs.contains(self.x) and fs.contains(self.y)):
                raise DomainError(
                    "integral separation needs both points in every support fiber"
                )


# ---------------------------------------------------------------------------
# validation

@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class ValidationReport:
    system: str
    max_word_length: int
    checks: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst_residual(self) -> float:
        finite = [c.residual for c in self.checks if math.isfinite(c.residual)]
        bad = [c for c in self.checks if not math.isfinite(c.residual)]
        if bad:
            return math.inf
        return max(finite) if finite else 0.0

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "max_word_length": self.max_word_length,
            "ok": self.ok,
            "worst_residual": self.worst_residual,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "residual": c.residual,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }

    def to_text(self) -> str:
        lines = [f"validation of {self.system} (relation words up to length {self.max_word_length})"]
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            line = f"  [{tag}] {c.name}: residual={c.residual:.3e}"
            if c.detail:
                line += f" ({c.detail})"
            lines.append(line)
        lines.append(f"  worst residual: {self.worst_residual:.3e}")
        return "\n".join(lines)


def _relation_word_sweep(system: RandomDynamicalSystem, max_len: int, node_budget: int):
    """DFS over all generator words up to max_len; whenever a word evaluates
    to the group identity, the composed cocycle matrices must be exactly the
    identity and the composed shifts must sit on the integer lattice.

    Returns (worst shift residual, failure detail or None, words checked)."""
    grp = system.group
    base = system.base
    letters = []
    for i in range(grp.rank):
        letters.append((i, 1))
        letters.append((i, -1))
    identity = grp.identity()
    id_mat = _identity_matrix(system.dim)

    worst = 0.0
    failure: str | None = None
    checked = 0
    nodes = 0

    start_states = [
        (w, system.identity_map_at(w)) for w in range(base.size)
    ]

    def describe(word):
        return "*".join(f"s{i}" + ("" if d == 1 else "^-1") for i, d in word)

    def recurse(elem, states, word):
        nonlocal worst, failure, checked, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetError("relation-word sweep exceeded its node budget")
        depth = len(word)
        if depth >= 1 and elem == identity:
            checked += 1
            for w0, (w, fm) in enumerate(states):
                if w != w0 and failure is None:
                    failure = (
                        f"word {describe(word)} returns to the identity but moves "
                        f"base point {base.labels[w0]} to {base.labels[w]}"
                    )
                if fm.matrix != id_mat:
                    worst = math.inf
                    if failure is None:
                        failure = (
                            f"word {describe(word)} starting at {base.labels[w0]} "
                            f"composes to matrix {fm.matrix}"
                        )
                else:
                    res = fm.identity_residual()
                    if res > worst:
                        worst = res
        if depth == max_len:
            return
        for (i, d) in letters:
            nxt = list(elem)
            nxt[i] += d
            if i >= grp.free_rank:
                nxt[i] %= grp.cyclic_orders[i - grp.free_rank]
            nxt_t = tuple(nxt)
            # only descend if the identity is still reachable in the budget
            if grp.word_length(nxt_t) > max_len - depth - 1:
                continue
            new_states = []
            for (w, fm) in states:
                if d == 1:
                    step = system.maps[i][w]
                    nw = base.act_generator(i, w, 1)
                else:
                    nw = base.act_generator(i, w, -1)
                    step = system._inv_maps[i][nw]
                new_states.append((nw, step.compose(fm)))
            recurse(nxt_t, new_states, word + [(i, d)])

    recurse(identity, start_states, [])
    return worst, failure, checked


def validate(
    system: RandomDynamicalSystem,
    max_word_length: int = 8,
    samples: int = 16,
    seed: int = 0,
    node_budget: int = 5_000_000,
) -> ValidationReport:
    """Check the cocycle axioms and structural invariants.

    Covers: identity maps are identities, base weights form a probability
    vector, base permutations commute and cyclic generators have exact order,
    every relation word up to ``max_word_length`` composes to the identity
    map, fiber domains are carried onto fiber domains, and a seeded cocycle
    spot check F_{g2, g1 w} o F_{g1, w} = F_{g2 g1, w} on random points.
    """
    grp = system.group
    base = system.base
    checks: list[CheckResult] = []
    rng = np.random.default_rng(seed)

    # identity axiom
    res = max(system.identity_map_at(w).identity_residual() for w in range(base.size))
    checks.append(CheckResult("identity-fiber-maps", res <= 1e-12, res))

    ident_worst = 0.0
    for w in range(base.size):
        for _ in range(max(1, samples // base.size)):
            x = system.fibers[w].sample(rng)
            ident_worst = max(
                ident_worst, torus_distance(system.apply(grp.identity(), w, x), x)
            )
    checks.append(CheckResult("identity-spot-check", ident_worst <= 1e-12, ident_worst))

    # base weights
    wsum = math.fsum(base.weights)
    res = abs(wsum - 1.0)
    checks.append(CheckResult("base-weights-sum", res <= 1e-12, res))

    # base action relations: commutation and cyclic orders, exact
    perm_ok = True
    detail = ""
    size = base.size
    for i in range(grp.rank):
        for j in range(i + 1, grp.rank):
            for w in range(size):
                a = base.act_generator(j, base.act_generator(i, w, 1), 1)
                b = base.act_generator(i, base.act_generator(j, w, 1), 1)
                if a != b:
                    perm_ok = False
                    detail = f"generators s{i}, s{j} do not commute on the base"
    orders = grp.generator_orders()
    for i, k in enumerate(orders):
        if k is None:
            continue
        for w in range(size):
            if base.act_generator(i, w, k) != w:
                perm_ok = False
                detail = f"generator s{i} does not have order {k} on the base"
    checks.append(CheckResult("base-action-relations", perm_ok, 0.0 if perm_ok else 1.0, detail))

    # relation-word sweep over the cocycle
    worst, failure, checked = _relation_word_sweep(system, max_word_length, node_budget)
    checks.append(
        CheckResult(
            "relation-words",
            failure is None and worst <= 1e-12,
            worst,
            failure or f"{checked} identity words checked",
        )
    )

    # fiber domains are carried onto fiber domains
    cover_worst = 0.0
    cover_detail = ""
    for i in range(grp.rank):
        for w in range(size):
            target = system.fibers[base.act_generator(i, w, 1)]
            for _ in range(max(1, samples // size)):
                x = system.fibers[w].sample(rng)
                r = target.membership_residual(system.maps[i][w].apply(x))
                if r > cover_worst:
                    cover_worst = r
                    cover_detail = f"generator s{i} at {base.labels[w]}"
    checks.append(
        CheckResult(
            "fiber-domain-coverage",
            cover_worst <= MEMBERSHIP_TOL,
            cover_worst,
            cover_detail if cover_worst > MEMBERSHIP_TOL else "",
        )
    )

    # cocycle spot check on random short words
    coc_worst = 0.0
    for _ in range(samples):
        g1 = tuple(
            int(rng.integers(-3, 4)) if k is None else int(rng.integers(0, k))
            for k in orders
        )
        g2 = tuple(
            int(rng.integers(-3, 4)) if k is None else int(rng.integers(0, k))
            for k in orders
        )
        w = int(rng.integers(0, size))
        x = system.fibers[w].sample(rng)
        one = system.apply(grp.multiply(g2, g1), w, x)
        two = system.apply(g2, base.act(g1, w), system.apply(g1, w, x))
        coc_worst = max(coc_worst, torus_distance(one, two))
    checks.append(CheckResult("cocycle-spot-check", coc_worst <= 1e-12, coc_worst))

    return ValidationReport(system.name, max_word_length, checks)
