"""Covariant coordinates, noncommutative field strength and the Yang-Mills matrix action.

Two levels live here:

* operator level: ``c_i = (theta^-1)_ij x^j + A_i`` as matrices on a truncated
  Fock space, with ``F_ij = -i[c_i, c_j] + (theta^-1)_ij`` and a trace action;
* symbol level: d x d matrices of polynomial symbols (:class:`MatrixPoly`)
  with the star product, the covariant derivative and the theta-corrected
  field strength.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import Bivector, DimensionError, PhasePoly, star
from .fock import FockBasis, OperatorMatrix, adapted_representation, interior_block

UNITARY_ATOL = 1e-10


class NonUnitaryError(ValueError):
    pass


# --- operator level -----------------------------------------------------------


@dataclass(frozen=True)
class CovariantCoords:
    theta: Bivector
    c: tuple[OperatorMatrix, ...]
    coupling: float = 1.0

    def __post_init__(self):
        if len(self.c) != self.theta.n:
            raise DimensionError(f"{len(self.c)} coordinates for a {self.theta.n}-dim theta")
        if self.coupling <= 0:
            raise ValueError("coupling must be positive")
        object.__setattr__(self, "c", tuple(self.c))

    @property
    def basis(self) -> FockBasis:
        return self.c[0].basis

    def hermiticity_defect(self) -> float:
        return max(ci.hermiticity_defect() for ci in self.c)

    def with_coupling(self, g: float) -> "CovariantCoords":
        return CovariantCoords(self.theta, self.c, g)

    def shifted(self, shifts: Sequence[OperatorMatrix]) -> "CovariantCoords":
        return CovariantCoords(self.theta, tuple(ci + h for ci, h in zip(self.c, shifts)), self.coupling)


def vacuum_coords(theta: Bivector, basis: FockBasis | int, coupling: float = 1.0) -> CovariantCoords:
    """A = 0 coordinates ``c_i = (theta^-1)_ij x^j`` on a theta-adapted Fock space.

    ``basis`` is either a bose cutoff or a FockBasis of ``theta.n // 2``
    equal-cutoff bose modes.
    """
    inv = theta.inverse()
    if isinstance(basis, FockBasis):
        cutoffs = {c for s, c in basis.modes if s == "bose"}
        if len(cutoffs) != 1 or basis.n_modes != theta.n // 2 or any(s != "bose" for s, _ in basis.modes):
            raise DimensionError(f"basis {basis} is not theta-adapted ({theta.n // 2} equal bose modes)")
        cutoff = cutoffs.pop()
    else:
        cutoff = int(basis)
    _, xs = adapted_representation(theta, cutoff)
    c = []
    for i in range(theta.n):
        acc = OperatorMatrix.zeros(xs[0].basis)
        for j in range(theta.n):
            if inv[i, j] != 0.0:
                acc = acc + xs[j] * inv[i, j]
        c.append(acc)
    return CovariantCoords(theta, tuple(c), coupling)


def field_strength(C: CovariantCoords) -> list[list[OperatorMatrix]]:
    """F_ij = -i [c_i, c_j] + (theta^-1)_ij * identity."""
    inv = C.theta.inverse()
    n = C.theta.n
    F = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            F[i][j] = C.c[i].comm(C.c[j]) * (-1j) + inv[i, j]
    return F


def ym_action(C: CovariantCoords, margin: int = 2) -> float:
    """Euclidean action (1/4g^2) sum_{i != j} Tr_int(F_ij F_ij^+); zero at the vacuum."""
    F = field_strength(C)
    total = 0.0
    n = C.theta.n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            Fi = interior_block(F[i][j], margin).entries
            total += float(np.real(np.vdot(Fi, Fi)))
    return total / (4.0 * C.coupling**2)


def gauge_transform(C: CovariantCoords, U: OperatorMatrix) -> CovariantCoords:
    defect = (U @ U.dag).distance_to_identity()
    if defect > UNITARY_ATOL:
        raise NonUnitaryError(f"U is not unitary (|UU^+ - I| = {defect:.3g})")
    return CovariantCoords(C.theta, tuple(U @ ci @ U.dag for ci in C.c), C.coupling)


def block_unitary(basis: FockBasis, margin: int, rng: np.random.Generator, scale: float = 1.0) -> OperatorMatrix:
    """Random unitary that maps the interior block to itself (and its complement to itself)."""
    from scipy.linalg import expm

    inner = basis.interior_indices(margin)
    outer = np.setdiff1d(np.arange(basis.dim), inner)
    U = np.zeros((basis.dim, basis.dim), complex)
    for idx in (inner, outer):
        if not len(idx):
            continue
        k = len(idx)
        h = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        h = (h + h.conj().T) * (scale / 2)
        U[np.ix_(idx, idx)] = expm(1j * h)
    return OperatorMatrix(basis, U)


# --- symbol level -------------------------------------------------------------


class MatrixPoly:
    """d x d array of :class:`PhasePoly` entries over one generator set."""

    __slots__ = ("names", "rows")

    def __init__(self, rows: Sequence[Sequence[PhasePoly]]):
        rows = tuple(tuple(r) for r in rows)
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise DimensionError("MatrixPoly must be square and non-empty")
        names = rows[0][0].names
        if any(e.names != names for r in rows for e in r):
            raise DimensionError("MatrixPoly entries use different generators")
        self.names = names
        self.rows = rows

    @property
    def d(self) -> int:
        return len(self.rows)

    @classmethod
    def scalar(cls, f: PhasePoly, d: int = 1) -> "MatrixPoly":
        zero = PhasePoly.zero(f.names)
        return cls([[f if i == j else zero for j in range(d)] for i in range(d)])

    @classmethod
    def from_constants(cls, names, mat) -> "MatrixPoly":
        mat = np.atleast_2d(mat)
        return cls([[PhasePoly.constant(names, v) for v in row] for row in mat])

    @classmethod
    def zero(cls, names, d: int = 1) -> "MatrixPoly":
        return cls([[PhasePoly.zero(names)] * d for _ in range(d)])

    def __getitem__(self, ij) -> PhasePoly:
        i, j = ij
        return self.rows[i][j]

    def _check(self, other: "MatrixPoly"):
        if other.names != self.names or other.d != self.d:
            raise DimensionError("MatrixPoly shape or generator mismatch")

    def __add__(self, other: "MatrixPoly") -> "MatrixPoly":
        self._check(other)
        return MatrixPoly([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "MatrixPoly") -> "MatrixPoly":
        self._check(other)
        return MatrixPoly([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return MatrixPoly([[-a for a in r] for r in self.rows])

    def scale(self, s: complex) -> "MatrixPoly":
        return MatrixPoly([[a * s for a in r] for r in self.rows])

    def _compose(self, other: "MatrixPoly", mul) -> "MatrixPoly":
        self._check(other)
        d = self.d
        out = []
        for i in range(d):
            row = []
            for k in range(d):
                acc = PhasePoly.zero(self.names)
                for j in range(d):
                    acc = acc + mul(self.rows[i][j], other.rows[j][k])
                row.append(acc)
            out.append(row)
        return MatrixPoly(out)

    def matmul(self, other: "MatrixPoly") -> "MatrixPoly":
        """Matrix product with pointwise (commutative) entry products."""
        return self._compose(other, lambda a, b: a * b)

    def star(self, other: "MatrixPoly", pi: Bivector) -> "MatrixPoly":
        return self._compose(other, lambda a, b: star(a, b, pi))

    def star_comm(self, other: "MatrixPoly", pi: Bivector) -> "MatrixPoly":
        return self.star(other, pi) - other.star(self, pi)

    def comm(self, other: "MatrixPoly") -> "MatrixPoly":
        return self.matmul(other) - other.matmul(self)

    def derivative(self, k: int | str) -> "MatrixPoly":
        return MatrixPoly([[a.derivative(k) for a in r] for r in self.rows])

    def close(self, other: "MatrixPoly", atol: float = 1e-12) -> bool:
        self._check(other)
        return all(a.close(b, atol) for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def is_zero(self, atol: float = 1e-12) -> bool:
        return all(a.is_zero(atol) for r in self.rows for a in r)

    def max_abs_coeff(self) -> float:
        return max(a.max_abs_coeff() for r in self.rows for a in r)

    def __repr__(self):
        return f"MatrixPoly({[[str(a) for a in r] for r in self.rows]})"


def _require_coords(theta: Bivector, names) -> None:
    if theta.names != tuple(names):
        raise DimensionError(f"theta generators {theta.names} differ from symbol generators {names}")


def covariant_coordinate(A_i: MatrixPoly, i: int, theta: Bivector) -> MatrixPoly:
    """c_i = (theta^-1)_ij x^j * 1 + A_i."""
    _require_coords(theta, A_i.names)
    inv = theta.inverse()
    lin = PhasePoly.zero(theta.names)
    for j, xj in enumerate(PhasePoly.generators(theta.names)):
        lin = lin + xj * inv[i, j]
    return MatrixPoly.scalar(lin, A_i.d) + A_i


def covariant_derivative(f: MatrixPoly, A: Sequence[MatrixPoly], theta: Bivector) -> list[MatrixPoly]:
    """nabla_i f = d_i f - i [A_i, f]_* for every coordinate direction i."""
    _require_coords(theta, f.names)
    if len(A) != theta.n:
        raise DimensionError(f"{len(A)} connection components for {theta.n} coordinates")
    return [f.derivative(i) - A[i].star_comm(f, theta).scale(1j) for i in range(theta.n)]


def covariant_derivative_cform(f: MatrixPoly, A: Sequence[MatrixPoly], theta: Bivector) -> list[MatrixPoly]:
    """Same derivation written as -i [c_i, f]_*."""
    return [covariant_coordinate(A[i], i, theta).star_comm(f, theta).scale(-1j) for i in range(theta.n)]


def sw_field_strength(
    A: Sequence[MatrixPoly], theta: Bivector, convention: str = "imaginary"
) -> list[list[MatrixPoly]]:
    """F_ij = d_i A_j - d_j A_i - i[A_i, A_j] + k theta^{kl}(d_k A_i d_l A_j - d_k A_j d_l A_i).

    Products are pointwise-in-symbol matrix products.  ``convention="imaginary"``
    takes k = i/2; ``"real"`` takes the usual k = 1/2, under which
    the expression reproduces the star-commutator field strength through first
    order in theta.
    """
    kappa = {"imaginary": 0.5j, "real": 0.5}[convention]
    n = theta.n
    if len(A) != n:
        raise DimensionError(f"{len(A)} connection components for {n} coordinates")
    for a in A:
        _require_coords(theta, a.names)
    dA = [[A[i].derivative(k) for i in range(n)] for k in range(n)]  # dA[k][i] = d_k A_i
    names, d = A[0].names, A[0].d
    F = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                F[i][j] = MatrixPoly.zero(names, d)
                continue
            if j < i:
                F[i][j] = -F[j][i]
                continue
            out = dA[i][j] - dA[j][i] - A[i].comm(A[j]).scale(1j)
            corr = MatrixPoly.zero(names, d)
            for k, l, val in theta.pairs:
                corr = corr + (dA[k][i].matmul(dA[l][j]) - dA[k][j].matmul(dA[l][i])).scale(val)
            F[i][j] = out + corr.scale(kappa)
    return F


def star_field_strength(A: Sequence[MatrixPoly], theta: Bivector) -> list[list[MatrixPoly]]:
    """d_i A_j - d_j A_i - i [A_i, A_j]_* with the exact star commutator."""
    n = theta.n
    return [
        [A[j].derivative(i) - A[i].derivative(j) - A[i].star_comm(A[j], theta).scale(1j) for j in range(n)]
        for i in range(n)
    ]
