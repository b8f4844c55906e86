"""q-deformed oscillators, the bose/fermi SUSY pair and the Witten index."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockBasis, OperatorMatrix, mode_operators


class TruncatedAlgebraError(ValueError):
    """Level recursion turned negative below the requested cutoff."""

    def __init__(self, q: float, requested: int, max_cutoff: int):
        super().__init__(
            f"q={q}: level {max_cutoff} would be negative; "
            f"maximal admissible cutoff is {max_cutoff} (requested {requested})"
        )
        self.q = q
        self.requested = requested
        self.max_cutoff = max_cutoff


def q_levels(q: float, cutoff: int) -> np.ndarray:
    """Eigenvalues of a^+ a from lambda_0 = 0, lambda_{n+1} = 1 - q lambda_n.

    A level that hits exactly zero closes the ladder (e.g. q = 1 stops at
    dimension 2); a negative one raises :class:`TruncatedAlgebraError`.
    """
    if isinstance(q, complex) or np.iscomplexobj(q):
        raise TypeError("complex q is not supported")
    q = float(q)
    if q < -1:
        raise ValueError("q must be >= -1")
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    levels = [0.0]
    while len(levels) < cutoff:
        nxt = 1.0 - q * levels[-1]
        if nxt == 0.0:
            break
        if nxt < 0.0:
            raise TruncatedAlgebraError(q, cutoff, len(levels))
        levels.append(nxt)
    return np.array(levels)


@dataclass(frozen=True)
class QOscillator:
    q: float
    levels: np.ndarray
    a: OperatorMatrix
    adag: OperatorMatrix

    @property
    def cutoff(self) -> int:
        return len(self.levels)

    def number_operator(self) -> OperatorMatrix:
        return self.adag @ self.a

    def q_residual(self) -> np.ndarray:
        """aa^+ + q a^+a - 1; only the last diagonal entry is a truncation artifact."""
        return (self.a @ self.adag + self.q * self.number_operator() - 1).entries

    def recursion_residual(self) -> float:
        lv = self.levels
        if len(lv) < 2:
            return 0.0
        return float(np.max(np.abs(lv[1:] - (1.0 - self.q * lv[:-1]))))


def q_mode(q: float, cutoff: int) -> QOscillator:
    levels = q_levels(q, cutoff)
    dim = len(levels)
    stat = "fermi" if dim == 2 and q == 1.0 else "bose"
    basis = FockBasis(((stat, dim),))
    a = np.diag(np.sqrt(levels[1:]), 1)
    a_op = OperatorMatrix(basis, a)
    return QOscillator(float(q), levels, a_op, a_op.dag)


@dataclass(frozen=True)
class SusySystem:
    Q: OperatorMatrix
    H: OperatorMatrix
    form: str

    @property
    def basis(self) -> FockBasis:
        return self.Q.basis

    def commutant_residual(self, margin: int = 1) -> float:
        C = self.Q.comm(self.H)
        idx = level_window(self.basis, margin)
        return float(np.max(np.abs(C.entries[np.ix_(idx, idx)])))


def susy_system(bose_cutoff: int, form: str = "anticommutator") -> SusySystem:
    """Q = a (x) f^+ on bose (x) fermi.

    ``form="anticommutator"`` gives H = QQ^+ + Q^+Q, for which [Q, H] = 0
    identically.  ``form="qdag_q"`` gives H = Q^+Q; its commutant with Q is
    only reported.
    """
    if bose_cutoff < 2:
        raise ValueError("bose_cutoff must be >= 2")
    basis = FockBasis((("bose", bose_cutoff), ("fermi", 2)))
    a = mode_operators(basis, 0).a
    f = mode_operators(basis, 1).a
    Q = a @ f.dag
    if form == "anticommutator":
        H = Q @ Q.dag + Q.dag @ Q
    elif form == "qdag_q":
        H = Q.dag @ Q
    else:
        raise ValueError(f"unknown form {form!r}")
    return SusySystem(Q, H, form)


def level_window(basis: FockBasis, margin: int = 1) -> np.ndarray:
    """States whose total excitation number is <= min bose cutoff - margin.

    Q = a (x) f^+ conserves the total number, so this window is mapped into
    itself by Q and Q^+ and keeps every boson/fermion partner pair together.
    A per-mode occupation window would split pairs at its edge.
    """
    bose = [c for s, c in basis.modes if s == "bose"]
    top = min(bose) - margin if bose else sum(c - 1 for c in basis.dims)
    if top < 0:
        raise ValueError(f"margin {margin} leaves an empty level window")
    return np.flatnonzero(basis.occupations.sum(axis=1) <= top)


def _restricted(A: OperatorMatrix, idx: np.ndarray) -> np.ndarray:
    return A.entries[np.ix_(idx, idx)]


def witten_index(Q: OperatorMatrix, H: OperatorMatrix, beta: float, margin: int = 1) -> complex:
    """Graded trace Tr((-1)^F exp(-beta H)) over the Q-closed level window."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not H.is_hermitian():
        raise ValueError(f"H is not hermitian (defect {H.hermiticity_defect():.3g})")
    idx = level_window(H.basis, margin)
    grading = H.basis.fermion_parity()[idx]
    h = _restricted(H, idx)
    w, v = np.linalg.eigh(h)
    # Tr(G V e^{-bw} V^+) = sum_k e^{-b w_k} <v_k|G|v_k>
    weights = np.einsum("ik,i,ik->k", v.conj(), grading, v).real
    value = complex(np.sum(np.exp(-beta * w) * weights))
    return value


@dataclass(frozen=True)
class WittenReport:
    index: complex
    graded_kernel: int
    kernel_q_minus_qdag: int
    pairing: list[tuple[float, bool]]


def graded_kernel_dimension(H: OperatorMatrix, margin: int = 1, tol: float = 1e-9) -> int:
    """sum over zero modes of H of their fermion parity (beta -> infinity limit)."""
    idx = level_window(H.basis, margin)
    grading = H.basis.fermion_parity()[idx]
    w, v = np.linalg.eigh(_restricted(H, idx))
    zero = np.abs(w) <= tol
    weights = np.einsum("ik,i,ik->k", v.conj(), grading, v).real
    return int(round(float(np.sum(weights[zero]))))


def kernel_dimension(A: OperatorMatrix, margin: int = 1, tol: float = 1e-9) -> int:
    idx = level_window(A.basis, margin)
    s = np.linalg.svd(_restricted(A, idx), compute_uv=False)
    return int(np.sum(s <= tol))


def pairing_table(H: OperatorMatrix, margin: int = 1) -> list[tuple[float, bool]]:
    """(eigenvalue, bose-sector flag) over the window, sorted by energy then sector.

    H commutes with (-1)^F, so each sector is diagonalized separately.
    """
    idx = level_window(H.basis, margin)
    grading = H.basis.fermion_parity()[idx]
    h = _restricted(H, idx)
    rows = []
    for flag, sign in ((True, 1.0), (False, -1.0)):
        sel = np.flatnonzero(grading == sign)
        if len(sel):
            for w in np.linalg.eigvalsh(h[np.ix_(sel, sel)]):
                rows.append((float(w), flag))
    rows.sort(key=lambda r: (round(r[0], 9), not r[1]))
    return rows


def nonzero_spectra(system: SusySystem, margin: int = 1, tol: float = 1e-9):
    """Sorted nonzero eigenvalues of Q^+Q and QQ^+ on the window."""
    idx = level_window(system.basis, margin)
    out = []
    for M in (system.Q.dag @ system.Q, system.Q @ system.Q.dag):
        w = np.linalg.eigvalsh(_restricted(M, idx))
        out.append(np.sort(w[np.abs(w) > tol]))
    return out


def witten_report(system: SusySystem, beta: float, margin: int = 1) -> WittenReport:
    return WittenReport(
        index=witten_index(system.Q, system.H, beta, margin),
        graded_kernel=graded_kernel_dimension(system.H, margin),
        kernel_q_minus_qdag=kernel_dimension(system.Q - system.Q.dag, margin),
        pairing=pairing_table(system.H, margin),
    )
