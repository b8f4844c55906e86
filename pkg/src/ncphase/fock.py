"""Truncated multi-mode Fock space, dense operators and Weyl quantization."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial, sqrt
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import Bivector, DimensionError, PhasePoly, phase_space_names

HERMITIAN_ATOL = 1e-10


class EmptyBlockError(ValueError):
    pass


@dataclass(frozen=True)
class FockBasis:
    """Tensor product of bose modes (truncated at ``cutoff``) and fermi modes (dimension 2).

    Basis index <-> occupation tuple is row-major with mode 0 most significant.
    """

    modes: tuple[tuple[str, int], ...]

    def __post_init__(self):
        modes = []
        for stat, cutoff in self.modes:
            if stat not in ("bose", "fermi"):
                raise ValueError(f"unknown statistics {stat!r}")
            cutoff = int(cutoff)
            if stat == "fermi" and cutoff != 2:
                raise ValueError("fermi modes have dimension exactly 2")
            if cutoff < 1:
                raise ValueError("cutoff must be positive")
            modes.append((stat, cutoff))
        if not modes:
            raise ValueError("basis needs at least one mode")
        object.__setattr__(self, "modes", tuple(modes))

    @classmethod
    def bose(cls, cutoff: int, n_modes: int = 1) -> "FockBasis":
        return cls((("bose", cutoff),) * n_modes)

    @classmethod
    def parse(cls, spec: str) -> "FockBasis":
        """``bose:6,fermi:2`` or ``bose:6,fermi``."""
        modes = []
        for part in spec.split(","):
            stat, _, cut = part.strip().partition(":")
            modes.append((stat, int(cut) if cut else 2))
        return cls(tuple(modes))

    def __str__(self):
        return ",".join(f"{s}:{c}" for s, c in self.modes)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.modes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dim, n_modes) table of occupation numbers per basis index."""
        return np.array(np.unravel_index(np.arange(self.dim), self.dims)).T

    def index(self, occ: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(occ), self.dims))

    def occupation(self, index: int) -> tuple[int, ...]:
        return tuple(int(k) for k in np.unravel_index(index, self.dims))

    def fermion_parity(self) -> np.ndarray:
        """Diagonal of (-1)^F over the basis."""
        fermi = [k for k, (s, _) in enumerate(self.modes) if s == "fermi"]
        n_f = self.occupations[:, fermi].sum(axis=1) if fermi else np.zeros(self.dim, int)
        return np.where(n_f % 2 == 0, 1.0, -1.0)

    def interior_indices(self, margin: int) -> np.ndarray:
        """Indices whose every bose occupation is <= cutoff - margin."""
        bose = [(k, c) for k, (s, c) in enumerate(self.modes) if s == "bose"]
        if margin < 0:
            raise ValueError("margin must be non-negative")
        if any(margin >= c for _, c in bose):
            raise EmptyBlockError(
                f"margin {margin} leaves no interior for cutoffs {[c for _, c in bose]}"
            )
        keep = np.ones(self.dim, dtype=bool)
        for k, c in bose:
            keep &= self.occupations[:, k] <= c - margin
        return np.flatnonzero(keep)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex matrix on a :class:`FockBasis`.

    ``indices`` is ``None`` for the full space, else the basis indices spanned
    by a restricted block (see :func:`interior_block`).
    """

    basis: FockBasis
    entries: np.ndarray
    indices: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        size = self.basis.dim if self.indices is None else len(self.indices)
        if arr.shape != (size, size):
            raise DimensionError(f"entries shape {arr.shape} != ({size}, {size})")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls, basis: FockBasis) -> "OperatorMatrix":
        return cls(basis, np.eye(basis.dim))

    @classmethod
    def zeros(cls, basis: FockBasis) -> "OperatorMatrix":
        return cls(basis, np.zeros((basis.dim, basis.dim)))

    @property
    def shape(self):
        return self.entries.shape

    def _same(self, other: "OperatorMatrix"):
        if self.basis != other.basis or self.indices != other.indices:
            raise DimensionError("operators live on different bases or blocks")

    def _wrap(self, arr) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, arr, self.indices)

    def __matmul__(self, other):
        self._same(other)
        return self._wrap(self.entries @ other.entries)

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            self._same(other)
            return self._wrap(self.entries + other.entries)
        return self._wrap(self.entries + other * np.eye(self.shape[0]))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._wrap(-self.entries)

    def __mul__(self, s):
        return self._wrap(self.entries * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self._wrap(self.entries / s)

    @property
    def dag(self) -> "OperatorMatrix":
        return self._wrap(self.entries.conj().T)

    def comm(self, other) -> "OperatorMatrix":
        return self @ other - other @ self

    def anticomm(self, other) -> "OperatorMatrix":
        return self @ other + other @ self

    def norm(self) -> float:
        """Max absolute entry."""
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        return self.hermiticity_defect() <= atol

    def distance_to_identity(self, scale: complex = 1.0) -> float:
        return float(np.max(np.abs(self.entries - scale * np.eye(self.shape[0]))))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def expm(self) -> "OperatorMatrix":
        return self._wrap(scipy.linalg.expm(self.entries))

    # serialization ------------------------------------------------------
    def dumps(self) -> str:
        """Header lines then one row per line of ``re,im`` pairs (round-trip exact)."""
        lines = [
            "# OperatorMatrix",
            f"dims = {self.shape[0]}",
            f"basis = {self.basis}",
        ]
        if self.indices is not None:
            lines.append("indices = " + " ".join(map(str, self.indices)))
        for row in self.entries:
            lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "OperatorMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "# OperatorMatrix":
            raise ValueError("missing OperatorMatrix header")
        header = {}
        body = []
        for ln in lines[1:]:
            if "=" in ln and not body:
                key, _, val = ln.partition("=")
                header[key.strip()] = val.strip()
            else:
                body.append(ln)
        n = int(header["dims"])
        basis = FockBasis.parse(header["basis"])
        indices = tuple(int(k) for k in header["indices"].split()) if "indices" in header else None
        rows = [[complex(*map(float, tok.split(","))) for tok in ln.split()] for ln in body]
        arr = np.array(rows, dtype=complex).reshape(n, n)
        return cls(basis, arr, indices)


def interior_block(A: OperatorMatrix, margin: int) -> OperatorMatrix:
    """Restrict ``A`` to basis states with every bose occupation <= cutoff - margin."""
    keep = A.basis.interior_indices(margin)
    if A.indices is None:
        pos = keep
        new_idx = tuple(int(k) for k in keep)
    else:
        current = np.asarray(A.indices)
        mask = np.isin(current, keep)
        pos = np.flatnonzero(mask)
        new_idx = tuple(int(k) for k in current[mask])
    if not len(pos):
        raise EmptyBlockError("interior block is empty")
    return OperatorMatrix(A.basis, A.entries[np.ix_(pos, pos)], new_idx)


def _local_lowering(stat: str, cutoff: int) -> np.ndarray:
    if stat == "fermi":
        return np.array([[0.0, 1.0], [0.0, 0.0]])
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)


@dataclass(frozen=True)
class ModeOperators:
    a: OperatorMatrix
    adag: OperatorMatrix
    x: OperatorMatrix
    p: OperatorMatrix

    def __iter__(self):
        return iter((self.a, self.adag, self.x, self.p))


def mode_operators(basis: FockBasis, mode: int) -> ModeOperators:
    """Ladder pair and quadratures of one mode, with Jordan-Wigner strings for fermions."""
    if not 0 <= mode < basis.n_modes:
        raise IndexError(f"mode {mode} outside 0..{basis.n_modes - 1}")
    factors = []
    for k, (stat, cutoff) in enumerate(basis.modes):
        if k == mode:
            factors.append(_local_lowering(stat, cutoff))
        elif k < mode and stat == "fermi" and basis.modes[mode][0] == "fermi":
            factors.append(np.diag([1.0, -1.0]))
        else:
            factors.append(np.eye(cutoff))
    a = factors[0]
    for f in factors[1:]:
        a = np.kron(a, f)
    a_op = OperatorMatrix(basis, a)
    adag = a_op.dag
    x = (a_op + adag) / sqrt(2)
    p = (adag - a_op) * (1j / sqrt(2))
    return ModeOperators(a_op, adag, x, p)


def canonical_representation(basis: FockBasis) -> list[OperatorMatrix]:
    """Generator matrices in the order ``(x1..xm, p1..pm)``, one mode per pair."""
    ops = [mode_operators(basis, k) for k in range(basis.n_modes)]
    return [o.x for o in ops] + [o.p for o in ops]


def darboux(pi: Bivector) -> tuple[np.ndarray, np.ndarray]:
    """Real ``S`` with ``S @ J @ S.T == Pi`` for the standard block form J of m pairs.

    Generator a is then ``sum_k S[a, k] * z_k`` with ``z = (X1, P1, X2, P2, ...)``
    canonical, so ``[x_a, x_b] = i Pi[a, b]``.  Returns (S, strengths).
    """
    if not pi.is_invertible():
        raise ValueError("a Fock representation needs an invertible bivector")
    T, Z = scipy.linalg.schur(pi.matrix, output="real")
    n = pi.n
    S = np.zeros((n, n))
    strengths = []
    for k in range(0, n, 2):
        b = T[k, k + 1]
        u, v = Z[:, k], Z[:, k + 1]
        if b < 0:
            u, v, b = v, u, -b
        S[:, k] = np.sqrt(b) * u
        S[:, k + 1] = np.sqrt(b) * v
        strengths.append(b)
    return S, np.array(strengths)


def adapted_representation(pi: Bivector, cutoff: int) -> tuple[FockBasis, list[OperatorMatrix]]:
    """Hermitian matrices for every generator of ``pi`` on ``pi.n // 2`` bose modes.

    On the interior block ``[X_a, X_b] = i Pi[a, b] * identity`` holds exactly.
    """
    S, _ = darboux(pi)
    m = pi.n // 2
    basis = FockBasis.bose(cutoff, m)
    ops = [mode_operators(basis, k) for k in range(m)]
    canon = []
    for o in ops:
        canon.extend([o.x, o.p])
    gens = []
    for a in range(pi.n):
        acc = OperatorMatrix.zeros(basis)
        for k in range(pi.n):
            if S[a, k] != 0.0:
                acc = acc + canon[k] * S[a, k]
        gens.append(acc)
    return basis, gens


def _distinct_orderings(seq: tuple[int, ...]):
    return sorted(set(itertools.permutations(seq)))


def weyl_monomial(exps: Sequence[int], gens: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """Fully symmetrized product: average over every ordering of the factors."""
    seq = tuple(k for k, e in enumerate(exps) for _ in range(e))
    basis = gens[0].basis
    if not seq:
        return OperatorMatrix.identity(basis)
    orders = _distinct_orderings(seq)
    acc = np.zeros(gens[0].shape, dtype=complex)
    cache: dict = {}
    for order in orders:
        # reuse shared prefixes
        prod = None
        for depth in range(len(order), 0, -1):
            if order[:depth] in cache:
                prod = cache[order[:depth]]
                start = depth
                break
        if prod is None:
            prod = gens[order[0]].entries
            start = 1
            cache[order[:1]] = prod
        for depth in range(start, len(order)):
            prod = prod @ gens[order[depth]].entries
            cache[order[: depth + 1]] = prod
        acc += prod
    return OperatorMatrix(basis, acc / len(orders))


def weyl_quantize(
    f: PhasePoly,
    basis: FockBasis | None = None,
    generators: Sequence[OperatorMatrix] | None = None,
) -> OperatorMatrix:
    """Weyl (symmetric-ordered) operator of a polynomial symbol.

    With only ``basis`` given, ``f`` must be over ``(x1..xm, p1..pm)`` for the
    m modes and the canonical quadratures are used.  Pass ``generators`` to
    quantize over any representation (e.g. :func:`adapted_representation`).
    """
    if generators is None:
        if basis is None:
            raise ValueError("need a basis or generator matrices")
        expected = phase_space_names(basis.n_modes)
        if f.names != expected:
            raise DimensionError(f"symbol generators {f.names} do not match basis modes {expected}")
        generators = canonical_representation(basis)
    elif len(generators) != len(f.names):
        raise DimensionError(f"{len(generators)} generator matrices for {len(f.names)} generators")
    out = OperatorMatrix.zeros(generators[0].basis)
    for exps, c in f.items():
        out = out + weyl_monomial(exps, generators) * c
    return out


def composition_residual(
    f: PhasePoly,
    g: PhasePoly,
    fg: PhasePoly,
    basis: FockBasis,
    margin: int | None = None,
) -> float:
    """max |W[f*g] - W[f] W[g]| on the interior block; margin defaults to deg f + deg g."""
    if margin is None:
        margin = max(f.degree, 0) + max(g.degree, 0)
    lhs = weyl_quantize(fg, basis)
    rhs = weyl_quantize(f, basis) @ weyl_quantize(g, basis)
    return interior_block(lhs - rhs, margin).norm()


def n_orderings(exps: Sequence[int]) -> int:
    """Number of distinct orderings of a monomial's factors (multinomial)."""
    out = factorial(sum(exps))
    for e in exps:
        out //= factorial(e)
    return out
