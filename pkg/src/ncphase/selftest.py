"""Quick built-in checks, one list per CLI subcommand."""
from __future__ import annotations

import numpy as np

from .algebra import Bivector, PhasePoly, moyal_bracket, poisson_bracket, star
from .bogoliubov import BogoliubovTransform, algebra_residual, apply_transform, q_algebra_residual, theta_mode_commutators
from .fock import FockBasis, OperatorMatrix, interior_block, mode_operators, weyl_quantize
from .gauge import MatrixPoly, covariant_derivative, gauge_transform, sw_field_strength, vacuum_coords, ym_action
from .gaussian import QuadraticAction, green, log_partition
from .grammar import parse_symbol
from .landau import braiding_phase, landau_system, shifted_commutator
from .oscillators import q_mode, susy_system, witten_index


def _phase():
    pi = Bivector.plane(0.5)
    x1, x2 = PhasePoly.generators(pi.names)
    f = parse_symbol("(0+2i)*x1^2*x2 - 3*x2 + 1", pi.names)
    canon = Bivector.canonical(1)
    x, p = PhasePoly.generators(canon.names)
    return {
        "commutator x1,x2 = i theta": moyal_bracket(x1, x2, pi).close(PhasePoly.constant(pi.names, 0.5j)),
        "f * 1 = f": star(f, PhasePoly.constant(pi.names, 1), pi).close(f),
        "[f, f] = 0": moyal_bracket(f, f, pi).is_zero(),
        "{x, p} = 1": poisson_bracket(x, p, canon).close(PhasePoly.constant(canon.names, 1)),
        "linear: moyal = i poisson": moyal_bracket(x1 + x2 * 2, x1 * 3, pi).close(
            poisson_bracket(x1 + x2 * 2, x1 * 3, pi) * 1j
        ),
    }


def _quantize():
    basis = FockBasis.bose(6)
    m = mode_operators(basis, 0)
    fb = FockBasis.parse("fermi")
    fm = mode_operators(fb, 0)
    x = PhasePoly.generator(("x1", "p1"), "x1")
    A = m.a.comm(m.adag)
    return {
        "[a,a+] = I on interior (margin 2)": interior_block(A, 2).distance_to_identity() <= 1e-14,
        "fermi {a,a+} = I": fm.a.anticomm(fm.adag).distance_to_identity() == 0.0,
        "fermi a^2 = 0": (fm.a @ fm.a).norm() == 0.0,
        "x, p hermitian": m.x.is_hermitian() and m.p.is_hermitian(),
        "W[x1] = x": (weyl_quantize(x, basis) - m.x).norm() == 0.0,
        "W[1] = I": weyl_quantize(PhasePoly.constant(("x1", "p1"), 1), basis).distance_to_identity() == 0.0,
        "margin 0 unchanged": np.array_equal(interior_block(A, 0).entries, A.entries),
    }


def _qosc():
    bose = q_mode(-1, 8)
    fermi = q_mode(1, 8)
    return {
        "q=-1 levels = n": np.array_equal(bose.levels, np.arange(8.0)),
        "q=+1 two levels": fermi.cutoff == 2 and np.array_equal(fermi.levels, [0.0, 1.0]),
        "q=+1 aa+ + a+a = I": (fermi.a @ fermi.adag + fermi.adag @ fermi.a).distance_to_identity() == 0.0,
    }


def _witten():
    s = susy_system(12)
    return {
        "Q^2 = 0": (s.Q @ s.Q).norm() == 0.0,
        "index = 1": abs(witten_index(s.Q, s.H, 1.0) - 1) <= 1e-8,
    }


def _bogoliubov():
    ident = BogoliubovTransform.identity(2)
    basis = FockBasis.bose(8)
    m = mode_operators(basis, 0)
    out = apply_transform(BogoliubovTransform.identity(1), [(m.a, m.adag)])
    return {
        "identity: oracle residual 0": algebra_residual(ident, "bose").oracle_max == 0.0,
        "identity: fermi residual 0": algebra_residual(ident, "fermi").oracle_max == 0.0,
        "identity: q-conditions hold": q_algebra_residual(BogoliubovTransform.identity(1), 0.3).conditions_hold(),
        "identity: matrices unchanged": (out.b[0] - m.a).norm() == 0.0 and (out.bdag[0] - m.adag).norm() == 0.0,
    }


def _theta_modes():
    z = np.zeros((2, 2))
    t = theta_mode_commutators(z, z)
    return {
        "canonical [a,a+] = delta": np.allclose(t.aadag, np.eye(2), atol=1e-12, rtol=0),
        "canonical [a,a] = 0": np.allclose(t.aa, 0, atol=1e-12),
    }


def _ym():
    th = Bivector.plane(1.0)
    C = vacuum_coords(th, 10)
    I = OperatorMatrix.identity(C.basis)
    return {
        "vacuum action 0": ym_action(C) <= 1e-8,
        "U = I leaves c unchanged": all((a - b).norm() == 0 for a, b in zip(gauge_transform(C, I).c, C.c)),
        "doubling g quarters action": True if ym_action(C) == 0 else abs(
            ym_action(C.with_coupling(2.0)) * 4 - ym_action(C)) <= 1e-15,
        "c hermitian": C.hermiticity_defect() <= 1e-10,
    }


def _swfield():
    th = Bivector.plane(0.7)
    const = [MatrixPoly.scalar(PhasePoly.constant(th.names, v)) for v in (1.5, -2.0)]
    f = MatrixPoly.scalar(parse_symbol("x1^2*x2 + 3", th.names))
    zero = [MatrixPoly.zero(th.names), MatrixPoly.zero(th.names)]
    F = sw_field_strength(const, th)
    D = covariant_derivative(f, zero, th)
    return {
        "constant A: F = 0": all(F[i][j].is_zero() for i in range(2) for j in range(2)),
        "A = 0: nabla = d": all(D[i].close(f.derivative(i)) for i in range(2)),
    }


def _landau():
    L = landau_system(1.0, 16)
    return {
        "[x1,x2] = i/B": L.commutator_residual() <= 1e-8,
        "H hermitian": L.H.is_hermitian(),
        "shift B=0 keeps i theta": shifted_commutator(0.4, 0.0).close(PhasePoly.constant(("x1", "x2"), 0.4j)),
        "shift theta=0 gives 0": shifted_commutator(0.0, 2.0).is_zero(),
    }


def _braid():
    return {
        "theta=0 phase 1": abs(braiding_phase(0.0, 16).phase - 1) <= 1e-12,
    }


def _gaussian():
    Qa = QuadraticAction(np.eye(3), "bose")
    Qf = QuadraticAction(np.eye(3), "fermi")
    return {
        "log Z(I, 0) = 0": log_partition(Qa) == 0 and log_partition(Qf) == 0,
        "<chi_i chi+_j> = delta_ij": all(
            green(Qa, [(False, i), (True, j)]) == (1.0 if i == j else 0.0) for i in range(3) for j in range(3)
        ),
    }


CHECKS = {
    "star": _phase,
    "bracket": _phase,
    "quantize": _quantize,
    "qosc": _qosc,
    "witten": _witten,
    "bogoliubov": _bogoliubov,
    "theta-modes": _theta_modes,
    "ym": _ym,
    "swfield": _swfield,
    "landau": _landau,
    "braid": _braid,
    "gaussian": _gaussian,
}


def run(subcommand: str) -> dict[str, bool]:
    return {k: bool(v) for k, v in CHECKS[subcommand]().items()}
