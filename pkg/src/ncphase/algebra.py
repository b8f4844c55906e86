"""Polynomial phase-space symbols and the terminating Moyal star product.

Every symbol lives over an ordered tuple of generator names, normally
``(x1, .., xn)`` for pure coordinate algebras or ``(x1, .., xn, p1, .., pn)``
for a full phase space.  A constant antisymmetric :class:`Bivector` fixes all
fundamental commutators ``[z_a, z_b] = i * Pi[a, b]``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

COEFF_ATOL = 1e-12


class DimensionError(ValueError):
    """Operands live over different generator sets."""


class SingularBivectorError(ValueError):
    """An inverse was requested from a degenerate bivector."""


def coordinate_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{k}" for k in range(1, n + 1))


def phase_space_names(n: int) -> tuple[str, ...]:
    return coordinate_names(n) + tuple(f"p{k}" for k in range(1, n + 1))


class Bivector:
    """Constant antisymmetric matrix of commutators over named generators."""

    __slots__ = ("names", "_entries", "_pairs")

    def __init__(self, entries, names: Sequence[str] | None = None):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"bivector must be a non-empty square matrix, got shape {arr.shape}")
        n = arr.shape[0]
        # antisymmetrize from the upper triangle so Pi[a, b] == -Pi[b, a] bit for bit
        upper = np.triu(arr, 1)
        lower = np.tril(arr, -1)
        if not np.allclose(lower, -upper.T, atol=1e-12, rtol=0):
            raise ValueError("bivector entries are not antisymmetric")
        arr = upper - upper.T
        arr.setflags(write=False)
        self._entries = arr
        self.names = tuple(names) if names is not None else coordinate_names(n)
        if len(self.names) != n:
            raise DimensionError(f"{len(self.names)} names for a {n}x{n} bivector")
        self._pairs = tuple(
            (a, b, float(arr[a, b])) for a in range(n) for b in range(n) if arr[a, b] != 0.0
        )

    @classmethod
    def from_upper(cls, n: int, upper: Sequence[float], names=None) -> "Bivector":
        """Build from the n(n-1)/2 strict upper-triangle entries, row-major."""
        if len(upper) != n * (n - 1) // 2:
            raise ValueError(f"expected {n * (n - 1) // 2} upper-triangle entries, got {len(upper)}")
        arr = np.zeros((n, n))
        arr[np.triu_indices(n, 1)] = upper
        return cls(arr - arr.T, names)

    @classmethod
    def coordinates(cls, theta) -> "Bivector":
        """Pure coordinate algebra ``[x_i, x_j] = i theta_ij``."""
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        return cls(theta, coordinate_names(theta.shape[0]))

    @classmethod
    def plane(cls, theta: float) -> "Bivector":
        return cls.from_upper(2, [theta])

    @classmethod
    def canonical(cls, n: int) -> "Bivector":
        return cls.phase_space(np.zeros((n, n)), np.zeros((n, n)))

    @classmethod
    def phase_space(cls, theta_x, theta_p=None, *, inverse_momenta: bool = False) -> "Bivector":
        """Combined bivector over ``(x, p)`` with ``[x_i, p_j] = i delta_ij``.

        ``theta_p`` sets ``[p_i, p_j]``; with ``inverse_momenta`` it is taken as
        the matrix inverse of ``theta_x`` instead.
        """
        tx = np.atleast_2d(np.asarray(theta_x, dtype=float))
        n = tx.shape[0]
        if inverse_momenta:
            tp = Bivector.coordinates(tx).inverse()
        elif theta_p is None:
            tp = np.zeros((n, n))
        else:
            tp = np.atleast_2d(np.asarray(theta_p, dtype=float))
        if tp.shape != (n, n):
            raise DimensionError("coordinate and momentum blocks differ in size")
        full = np.block([[tx, np.eye(n)], [-np.eye(n), tp]])
        return cls(full, phase_space_names(n))

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self._entries

    @property
    def pairs(self) -> tuple:
        return self._pairs

    def __getitem__(self, idx):
        return self._entries[idx]

    def scaled(self, s: float) -> "Bivector":
        return Bivector(self._entries * s, self.names)

    def is_invertible(self, tol: float = 1e-12) -> bool:
        if self.n % 2:
            return False
        return bool(np.min(np.linalg.svd(self._entries, compute_uv=False)) > tol)

    def inverse(self) -> np.ndarray:
        """Matrix inverse; refuses degenerate bivectors instead of pseudo-inverting."""
        if not self.is_invertible():
            raise SingularBivectorError("bivector is degenerate; no inverse")
        inv = np.linalg.inv(self._entries)
        if np.max(np.abs(self._entries @ inv - np.eye(self.n))) > 1e-12:
            raise SingularBivectorError("bivector inverse is numerically unreliable")
        return inv

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DimensionError(f"unknown generator {name!r}") from None

    def __eq__(self, other):
        return (
            isinstance(other, Bivector)
            and self.names == other.names
            and np.array_equal(self._entries, other._entries)
        )

    def __hash__(self):
        return hash((self.names, self._entries.tobytes()))

    def __repr__(self):
        return f"Bivector(names={self.names}, entries={self._entries.tolist()})"


class PhasePoly:
    """Polynomial with complex coefficients over a fixed generator tuple.

    Terms map exponent tuples to coefficients; exact zeros are never stored.
    Instances are immutable.
    """

    __slots__ = ("names", "_terms")

    def __init__(self, names: Sequence[str], terms: Mapping[tuple, complex] | None = None):
        self.names = tuple(names)
        n = len(self.names)
        clean = {}
        for key, value in (terms or {}).items():
            key = tuple(int(k) for k in key)
            if len(key) != n or min(key, default=0) < 0:
                raise DimensionError(f"exponent {key} does not fit generators {self.names}")
            value = complex(value)
            if value != 0:
                clean[key] = value
        self._terms = dict(sorted(clean.items(), reverse=True))

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, names) -> "PhasePoly":
        return cls(names)

    @classmethod
    def constant(cls, names, value: complex) -> "PhasePoly":
        return cls(names, {(0,) * len(tuple(names)): value})

    @classmethod
    def generator(cls, names, which: int | str, power: int = 1) -> "PhasePoly":
        names = tuple(names)
        k = names.index(which) if isinstance(which, str) else which
        exps = [0] * len(names)
        exps[k] = power
        return cls(names, {tuple(exps): 1.0})

    @classmethod
    def generators(cls, names) -> list["PhasePoly"]:
        names = tuple(names)
        return [cls.generator(names, k) for k in range(len(names))]

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exps: Iterable[int]) -> complex:
        return self._terms.get(tuple(exps), 0j)

    def constant_term(self) -> complex:
        return self.coefficient((0,) * len(self.names))

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self._terms), default=-1)

    def __len__(self):
        return len(self._terms)

    def is_zero(self, atol: float = COEFF_ATOL) -> bool:
        return all(abs(v) <= atol for v in self._terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(v) for v in self._terms.values()), default=0.0)

    def close(self, other, atol: float = COEFF_ATOL) -> bool:
        return (self - other).is_zero(atol)

    def chop(self, atol: float = COEFF_ATOL) -> "PhasePoly":
        """Drop coefficients below ``atol`` (real and imaginary parts separately)."""
        out = {}
        for k, v in self._terms.items():
            re = v.real if abs(v.real) > atol else 0.0
            im = v.imag if abs(v.imag) > atol else 0.0
            out[k] = complex(re, im)
        return PhasePoly(self.names, out)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "PhasePoly":
        if isinstance(other, PhasePoly):
            if other.names != self.names:
                raise DimensionError(f"generator mismatch: {self.names} vs {other.names}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return PhasePoly.constant(self.names, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0j) + v
        return PhasePoly(self.names, out)

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly(self.names, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Commutative (pointwise) product; use :func:`star` for the deformed one."""
        if isinstance(other, (int, float, complex, np.number)):
            return PhasePoly(self.names, {k: v * other for k, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0j) + v1 * v2
        return PhasePoly(self.names, out)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = PhasePoly.constant(self.names, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, which: int | str) -> "PhasePoly":
        k = self.names.index(which) if isinstance(which, str) else which
        out = {}
        for exps, v in self._terms.items():
            if exps[k]:
                e = list(exps)
                e[k] -= 1
                out[tuple(e)] = v * exps[k]
        return PhasePoly(self.names, out)

    def conjugate(self) -> "PhasePoly":
        """Complex-conjugate the coefficients (generators are real symbols)."""
        return PhasePoly(self.names, {k: v.conjugate() for k, v in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, PhasePoly):
            return NotImplemented
        return self.names == other.names and self._terms == other._terms

    __hash__ = None

    def __repr__(self):
        from .grammar import render

        return f"PhasePoly({render(self)!r}, names={self.names})"

    def __str__(self):
        from .grammar import render

        return render(self)


def _check(f: PhasePoly, g: PhasePoly, pi: Bivector) -> None:
    if f.names != pi.names or g.names != pi.names:
        raise DimensionError(
            f"generator mismatch: f{f.names} g{g.names} bivector{pi.names}"
        )


@lru_cache(maxsize=200_000)
def _monomial_star(pairs: tuple, alpha: tuple, beta: tuple) -> tuple:
    """exp((i/2) Pi^{ab} d_a (x) d_b) applied to x^alpha (x) x^beta.

    Repeatedly applies the bidifferential operator to a table keyed by the
    surviving exponent pair; the k-th application carries the 1/k! weight.
    """
    level = {(alpha, beta): 1 + 0j}
    out: dict = {}
    k = 0
    while level:
        for (a_exp, b_exp), c in level.items():
            key = tuple(x + y for x, y in zip(a_exp, b_exp))
            out[key] = out.get(key, 0j) + c
        k += 1
        nxt: dict = {}
        for (a_exp, b_exp), c in level.items():
            for a, b, val in pairs:
                ka, kb = a_exp[a], b_exp[b]
                if not ka or not kb:
                    continue
                na = a_exp[:a] + (ka - 1,) + a_exp[a + 1:]
                nb = b_exp[:b] + (kb - 1,) + b_exp[b + 1:]
                w = c * (0.5j * val) * ka * kb / k
                nxt[(na, nb)] = nxt.get((na, nb), 0j) + w
        level = nxt
    return tuple(out.items())


def star(f: PhasePoly, g: PhasePoly, pi: Bivector) -> PhasePoly:
    """Exact Moyal product; the bidifferential series terminates on polynomials."""
    _check(f, g, pi)
    pairs = pi.pairs
    out: dict = {}
    for a_exp, ca in f.items():
        for b_exp, cb in g.items():
            for key, c in _monomial_star(pairs, a_exp, b_exp):
                out[key] = out.get(key, 0j) + ca * cb * c
    return PhasePoly(pi.names, out)


def moyal_bracket(f: PhasePoly, g: PhasePoly, pi: Bivector) -> PhasePoly:
    return star(f, g, pi) - star(g, f, pi)


def poisson_bracket(f: PhasePoly, g: PhasePoly, pi: Bivector) -> PhasePoly:
    _check(f, g, pi)
    out = PhasePoly.zero(pi.names)
    for a, b, val in pi.pairs:
        out = out + f.derivative(a) * g.derivative(b) * val
    return out


def jacobi_residual(f: PhasePoly, g: PhasePoly, h: PhasePoly, pi: Bivector) -> PhasePoly:
    br = lambda u, v: moyal_bracket(u, v, pi)  # noqa: E731
    return br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))


def associator(f: PhasePoly, g: PhasePoly, h: PhasePoly, pi: Bivector) -> PhasePoly:
    return star(star(f, g, pi), h, pi) - star(f, star(g, h, pi), pi)


def random_poly(names, rng: np.random.Generator, max_degree: int = 4, n_terms: int = 5) -> PhasePoly:
    """Sparse random polynomial with small integer-valued complex coefficients."""
    names = tuple(names)
    terms = {}
    for _ in range(n_terms):
        deg = int(rng.integers(0, max_degree + 1))
        exps = [0] * len(names)
        for _ in range(deg):
            exps[int(rng.integers(len(names)))] += 1
        terms[tuple(exps)] = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
    return PhasePoly(names, terms)


def random_bivector(n: int, rng: np.random.Generator, names=None, scale: float = 1.0) -> Bivector:
    """Random constant bivector with entries on a dyadic grid (exact float products)."""
    upper = rng.integers(-8, 9, size=n * (n - 1) // 2) / 8.0 * scale
    return Bivector.from_upper(n, list(upper), names)
