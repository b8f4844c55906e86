"""Planar magnetic-length example: theta = 1/B, Landau ladder, exponential braiding."""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .algebra import Bivector, PhasePoly, moyal_bracket
from .fock import FockBasis, OperatorMatrix, interior_block, mode_operators


class TruncationError(RuntimeError):
    """The truncated space is too small for the requested quantity."""


@dataclass(frozen=True)
class LandauSystem:
    B: float
    cutoff: int
    a: OperatorMatrix
    H: OperatorMatrix
    x1: OperatorMatrix
    x2: OperatorMatrix

    @property
    def theta(self) -> float:
        return 1.0 / self.B

    def coordinate_commutator(self, margin: int = 2) -> OperatorMatrix:
        return interior_block(self.x1.comm(self.x2), margin)

    def commutator_residual(self, margin: int = 2) -> float:
        """max |[x1, x2] - i/B| on the interior block."""
        return self.coordinate_commutator(margin).distance_to_identity(1j / self.B)

    def interior_spectrum(self, margin: int = 2) -> np.ndarray:
        return np.linalg.eigvalsh(interior_block(self.H, margin).entries)


def landau_system(B: float, cutoff: int) -> LandauSystem:
    """a = sqrt(B/2)(x1 + i x2) with [a, a^+] = 1, so [x1, x2] = i/B; H = B(a^+a + 1/2)."""
    if B <= 0:
        raise ValueError("B must be positive")
    if cutoff < 4:
        raise ValueError("cutoff must be >= 4")
    basis = FockBasis.bose(cutoff)
    a = mode_operators(basis, 0).a
    ad = a.dag
    x1 = (a + ad) / sqrt(2 * B)
    x2 = (ad - a) * (1j / sqrt(2 * B))
    H = (ad @ a + 0.5) * B
    return LandauSystem(float(B), cutoff, a, H, x1, x2)


@dataclass(frozen=True)
class BraidResult:
    phase: complex
    deviation: float  # max |G - phase * I| on the interior
    expected: complex  # exp(-i theta)
    alternative: complex  # exp(-2 pi i theta), the rescaled-exponent convention


def braiding_phase(theta: float, cutoff: int, margin: int | None = None, max_deviation: float = 0.05) -> BraidResult:
    """Group commutator e^{i x1} e^{i x2} e^{-i x1} e^{-i x2} with [x1, x2] = i theta.

    The central-commutator law gives exp(-i theta) exactly; the truncated
    estimate is the mean interior diagonal.  Default margin is cutoff // 2.
    """
    basis = FockBasis.bose(cutoff)
    if margin is None:
        margin = cutoff // 2
    m = mode_operators(basis, 0)
    s = sqrt(abs(theta))
    x1 = m.x * s
    x2 = m.p * (s if theta >= 0 else -s)
    G = (x1 * 1j).expm() @ (x2 * 1j).expm() @ (x1 * -1j).expm() @ (x2 * -1j).expm()
    block = interior_block(G, margin)
    phase = complex(np.mean(np.diag(block.entries)))
    deviation = block.distance_to_identity(phase)
    if deviation > max_deviation:
        raise TruncationError(
            f"interior deviation {deviation:.3g} from a scalar exceeds {max_deviation}; "
            f"increase cutoff beyond {cutoff}"
        )
    return BraidResult(phase, deviation, complex(np.exp(-1j * theta)), complex(np.exp(-2j * np.pi * theta)))


def shifted_commutator(theta: float, B: float) -> PhasePoly:
    """[x'1, x'2] after x^i -> x^i + i theta eps^{ij} A_j with A_i = (B/2) eps_ij x^j.

    The substitution is applied as written (no hermitization).  The closed
    form is i theta (1 - i theta B / 2)^2.
    """
    pi = Bivector.plane(theta)
    x = PhasePoly.generators(pi.names)
    eps = np.array([[0.0, 1.0], [-1.0, 0.0]])
    A = [sum((x[j] * (B / 2 * eps[i, j]) for j in range(2)), PhasePoly.zero(pi.names)) for i in range(2)]
    shifted = [
        x[i] + sum((A[j] * (1j * theta * eps[i, j]) for j in range(2)), PhasePoly.zero(pi.names))
        for i in range(2)
    ]
    return moyal_bracket(shifted[0], shifted[1], pi)
