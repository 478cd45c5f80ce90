"""Domain types shared across the package: cone and polytope descriptions,
face labels, intrinsic-volume vectors, Monte Carlo estimates and tabulated
densities."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_COMBINATORIAL_N = 64


class ParameterError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class ConeFamily(str, enum.Enum):
    SIMPLEX = "simplex"
    CROSS = "cross"
    CUBE = "cube"


class PolytopeFamily(str, enum.Enum):
    CUBE = "cube"
    CROSSPOLYTOPE = "crosspolytope"
    SIMPLEX = "simplex"


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ParameterError(f"expected an integer, got {n!r}")
    if n > MAX_COMBINATORIAL_N:
        raise ParameterError(f"n={n} exceeds the supported bound {MAX_COMBINATORIAL_N}")


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient, zero outside ``0 <= k <= n``."""
    _check_n(n)
    if n < 0:
        raise ParameterError("binomial requires n >= 0")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class ConeSpec:
    """One of the three cone families.

    ``param`` is ``r`` for the simplex family (Gram matrix ``r + delta_ij``)
    and ``sigma^2`` for the cross and cube families (generators lifted to
    height ``sigma``).
    """

    family: ConeFamily
    n: int
    param: float

    def __post_init__(self):
        object.__setattr__(self, "family", ConeFamily(self.family))
        _check_n(self.n)
        if self.n < 0:
            raise ParameterError("cone dimension parameter n must be >= 0")
        p = float(self.param)
        if not math.isfinite(p):
            raise ParameterError("cone parameter must be finite")
        object.__setattr__(self, "param", p)
        if self.family is ConeFamily.SIMPLEX:
            if self.n >= 1 and not p > -1.0 / self.n:
                raise ParameterError(f"simplex cone needs r > -1/n, got r={p} for n={self.n}")
        elif not p > 0:
            raise ParameterError(f"{self.family.value} cone needs sigma^2 > 0, got {p}")

    @property
    def ambient_dim(self) -> int:
        return self.n if self.family is ConeFamily.SIMPLEX else self.n + 1

    def generators(self) -> np.ndarray:
        """Generators, one per row, in ``R^ambient_dim``."""
        n, p = self.n, self.param
        if self.family is ConeFamily.SIMPLEX:
            if n == 0:
                return np.zeros((0, 0))
            # u_i = e_i + beta * 1 with n*beta^2 + 2*beta = r
            beta = p / (1.0 + math.sqrt(1.0 + n * p))
            return np.eye(n) + beta
        sigma = math.sqrt(p)
        if self.family is ConeFamily.CROSS:
            # C_0 is the ray through e_1; keep a single generator
            base = np.vstack([np.eye(n), -np.eye(n)]) if n else np.zeros((1, 0))
        else:
            base = _cube_vertices(n)
        return np.hstack([base, np.full((base.shape[0], 1), sigma)])

    def gram(self) -> np.ndarray:
        """Gram matrix of the generators from the scalar-product characterisation."""
        n, p = self.n, self.param
        if self.family is ConeFamily.SIMPLEX:
            return p + np.eye(n)
        if self.family is ConeFamily.CROSS:
            if n == 0:
                return np.array([[p]])
            eye = np.eye(n)
            return np.block([[p + eye, p - eye], [p - eye, p + eye]])
        eps = _cube_vertices(n)
        return p + eps @ eps.T


@dataclass(frozen=True)
class FaceDescriptor:
    """Combinatorial label of a face of a regular polytope.

    Cube faces fix the coordinates in ``indices`` to ``signs``; crosspolytope
    faces are ``conv{signs[i] * e_{indices[i]}}``; simplex faces are the
    convex hull of the vertices listed in ``indices``.
    """

    family: PolytopeFamily
    dim: int
    indices: tuple
    signs: tuple = ()


def _cube_vertices(n):
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n)), dtype=float).reshape(2 ** n, n)


@dataclass(frozen=True)
class PolytopeSpec:
    """Cube ``[-1,1]^n``, crosspolytope ``conv{+-e_i}`` or a regular
    ``n``-simplex centred at the origin.

    The simplex is built as ``conv{e_1..e_{n+1}} - centroid`` inside
    ``R^{n+1}``; all coordinates returned by this class are expressed in an
    orthonormal basis of its ``n``-dimensional span.
    """

    family: PolytopeFamily
    n: int

    def __post_init__(self):
        object.__setattr__(self, "family", PolytopeFamily(self.family))
        _check_n(self.n)
        if self.n < 1:
            raise ParameterError("polytope dimension must be >= 1")

    @cached_property
    def simplex_basis(self) -> np.ndarray:
        """Orthonormal ``(n+1) x n`` basis of the hyperplane ``sum x = 0``."""
        n = self.n
        a = np.eye(n + 1)[:, :n] - 1.0 / (n + 1)
        q, _ = np.linalg.qr(a)
        return q

    def vertices(self) -> np.ndarray:
        n = self.n
        if self.family is PolytopeFamily.CUBE:
            return _cube_vertices(n)
        if self.family is PolytopeFamily.CROSSPOLYTOPE:
            return np.vstack([np.eye(n), -np.eye(n)])
        lifted = np.eye(n + 1) - 1.0 / (n + 1)
        return lifted @ self.simplex_basis

    def halfspaces(self):
        """Return ``(A, b)`` with the polytope equal to ``{x : A x <= b}``."""
        n = self.n
        if self.family is PolytopeFamily.CUBE:
            return np.vstack([np.eye(n), -np.eye(n)]), np.ones(2 * n)
        if self.family is PolytopeFamily.CROSSPOLYTOPE:
            if n > 16:
                raise ParameterError("crosspolytope halfspace description limited to n <= 16")
            return _cube_vertices(n), np.ones(2 ** n)
        # facet opposite vertex i: x_i >= -1/(n+1) in lifted coordinates
        return -self.simplex_basis, np.full(n + 1, 1.0 / (n + 1))

    def max_face_dim(self) -> int:
        return self.n if self.family is PolytopeFamily.SIMPLEX else self.n - 1

    def faces(self, k: int):
        """All ``k``-faces, as a list of :class:`FaceDescriptor`."""
        n, fam = self.n, self.family
        if k < 0 or k > self.max_face_dim():
            return []
        out = []
        if fam is PolytopeFamily.CUBE:
            for fixed in itertools.combinations(range(n), n - k):
                for signs in itertools.product((-1, 1), repeat=n - k):
                    out.append(FaceDescriptor(fam, k, fixed, signs))
        elif fam is PolytopeFamily.CROSSPOLYTOPE:
            for idx in itertools.combinations(range(n), k + 1):
                for signs in itertools.product((-1, 1), repeat=k + 1):
                    out.append(FaceDescriptor(fam, k, idx, signs))
        else:
            for idx in itertools.combinations(range(n + 1), k + 1):
                out.append(FaceDescriptor(fam, k, idx))
        return out

    def face_vertices(self, face: FaceDescriptor) -> np.ndarray:
        """Vertex coordinates of ``face``, one vertex per row."""
        n = self.n
        if face.family is not self.family:
            raise ParameterError("face does not belong to this polytope family")
        if self.family is PolytopeFamily.CUBE:
            free = [i for i in range(n) if i not in face.indices]
            pts = np.empty((2 ** len(free), n))
            pts[:, list(face.indices)] = face.signs
            pts[:, free] = _cube_vertices(len(free))
            return pts
        if self.family is PolytopeFamily.CROSSPOLYTOPE:
            pts = np.zeros((len(face.indices), n))
            pts[np.arange(len(face.indices)), list(face.indices)] = face.signs
            return pts
        return self.vertices()[list(face.indices)]


def face_count(p: PolytopeSpec, k: int) -> int:
    """Number of ``k``-faces of ``p``; zero for out-of-range ``k``."""
    n = p.n
    if k < 0 or k > p.max_face_dim():
        return 0
    if p.family is PolytopeFamily.CUBE:
        return 2 ** (n - k) * binomial(n, k)
    if p.family is PolytopeFamily.CROSSPOLYTOPE:
        return 2 ** (k + 1) * binomial(n, k + 1)
    return binomial(n + 1, k + 1)


@dataclass(frozen=True)
class IntrinsicVolumeVector:
    """Conic intrinsic volumes ``v_0..v_m``; indexing outside the range gives 0."""

    values: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.stderr is not None:
            object.__setattr__(self, "stderr", np.asarray(self.stderr, dtype=float))

    @property
    def dim(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        if isinstance(k, (int, np.integer)):
            return float(self.values[k]) if 0 <= k < len(self.values) else 0.0
        return self.values[k]

    def error(self, k) -> float:
        if self.stderr is None or not 0 <= k < len(self.values):
            return 0.0
        return float(self.stderr[k])

    def total(self) -> float:
        return float(self.values.sum())

    def odd_sum(self) -> float:
        return float(self.values[1::2].sum())

    def even_sum(self) -> float:
        return float(self.values[0::2].sum())

    def tail_up(self, start: int) -> float:
        """``v_start + v_{start+2} + ...``; invalid indices contribute 0."""
        return sum(self[k] for k in range(start, len(self.values), 2))

    def tail_down(self, start: int) -> float:
        """``v_start + v_{start-2} + ...`` down to index 0."""
        return sum(self[k] for k in range(start, -1, -2))


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    discarded: int = 0

    def agrees(self, value, nsigma=4.0, atol=0.0) -> bool:
        return abs(self.mean - value) <= max(nsigma * self.stderr, atol)


@dataclass(frozen=True)
class GridDensity:
    """Density tabulated at ``origin + step * i``."""

    origin: float
    step: float
    values: np.ndarray
    total_mass: float = 1.0

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterError("grid step must be positive")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def grid(self) -> np.ndarray:
        return self.origin + self.step * np.arange(len(self.values))

    def mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.step))

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.values, dx=self.step) / self.mass())

    def __call__(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)


class AbsorptionFamily(str, enum.Enum):
    SYMMETRIC_GAUSSIAN = "symmetric_gaussian"
    GAUSSIAN_ZONOTOPE = "gaussian_zonotope"

    @classmethod
    def parse(cls, value):
        aliases = {"cross": cls.SYMMETRIC_GAUSSIAN, "cube": cls.GAUSSIAN_ZONOTOPE}
        if isinstance(value, str) and value.lower() in aliases:
            return aliases[value.lower()]
        return cls(value)


@dataclass(frozen=True)
class AbsorptionQuery:
    """``conv{+-X_i}`` or ``sum [-X_i, X_i]`` for ``n`` standard Gaussian
    points ``X_i`` in ``R^d``.

    ``s2`` is the variance scale of a random test point ``sigma X``; ``u``
    places a deterministic point at norm ``sqrt(2u)``. Either may be omitted.
    """

    family: AbsorptionFamily
    n: int
    d: int
    s2: float | None = None
    u: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", AbsorptionFamily.parse(self.family))
        if not (isinstance(self.n, (int, np.integer)) and isinstance(self.d, (int, np.integer))):
            raise ParameterError("n and d must be integers")
        if not self.n >= self.d >= 1:
            raise ParameterError(f"need n >= d >= 1, got n={self.n}, d={self.d}")
        if self.s2 is not None and not self.s2 > 0:
            raise ParameterError("sigma^2 must be positive")
        if self.u is not None and not self.u >= 0:
            raise ParameterError("u must be nonnegative")
