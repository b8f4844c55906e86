import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncphase.fock import interior_block
from ncphase.oscillators import (
    TruncatedAlgebraError,
    graded_kernel_dimension,
    kernel_dimension,
    level_window,
    nonzero_spectra,
    pairing_table,
    q_levels,
    q_mode,
    susy_system,
    witten_index,
    witten_report,
)


# --- q-oscillator ---------------------------------------------------------

def test_bose_limit():
    assert np.array_equal(q_mode(-1, 10).levels, np.arange(10.0))


def test_fermi_limit():
    o = q_mode(1, 8)
    assert o.cutoff == 2 and np.array_equal(o.levels, [0.0, 1.0])
    assert (o.a @ o.adag + o.adag @ o.a).distance_to_identity() == 0.0
    assert o.a.basis.modes == (("fermi", 2),)


def test_q_half_levels_frozen():
    # iterated by hand: 1 - 0.5 * previous
    assert np.array_equal(q_levels(0.5, 6), [0, 1, 0.5, 0.75, 0.625, 0.6875])


@pytest.mark.parametrize("q", [-1, -0.5, 0, 0.5, 1, 0.9, -0.99])
def test_recursion_and_superdiagonal(q):
    o = q_mode(q, 12)
    assert o.levels[0] == 0 and o.recursion_residual() <= 1e-12
    assert np.all(o.levels >= 0)
    a = o.a.entries
    assert np.array_equal(a, np.diag(np.diag(a, 1), 1))
    assert np.allclose(np.diag(a, 1) ** 2, o.levels[1:], atol=1e-12, rtol=0)
    # only the truncation edge breaks aa+ + q a+a = 1
    R = o.q_residual()
    assert np.max(np.abs(R[:-1, :-1])) <= 1e-12
    assert np.max(np.abs(R - np.diag(np.diag(R)))) == 0.0


def test_q_residual_exact_for_fermi():
    assert np.max(np.abs(q_mode(1, 2).q_residual())) == 0.0


@pytest.mark.parametrize("eps", [1e-2, 1e-3])
def test_interpolation_to_bose(eps):
    lv = q_mode(-1 + eps, 8).levels
    n = np.arange(8.0)
    # lambda_n = (1 - (1 - eps)^n) / eps = n - eps n(n-1)/2 + O(eps^2)
    assert np.allclose(lv, (1 - (1 - eps) ** n) / eps, atol=1e-12, rtol=0)
    assert np.max(np.abs(lv - n)) <= 28 * eps


def test_interpolation_converges():
    errs = [np.max(np.abs(q_mode(-1 + e, 8).levels - np.arange(8))) for e in (1e-1, 1e-2, 1e-3)]
    assert errs[0] > errs[1] > errs[2]


def test_truncated_algebra_error():
    with pytest.raises(TruncatedAlgebraError) as exc:
        q_levels(1.5, 6)
    assert exc.value.max_cutoff == 2


def test_rejects_complex_and_small():
    with pytest.raises(TypeError):
        q_levels(0.5 + 0.1j, 4)
    with pytest.raises(ValueError):
        q_levels(-1.5, 4)
    with pytest.raises(ValueError):
        q_levels(0.5, 1)


@given(st.floats(-1, 1), st.integers(2, 30))
def test_levels_nonnegative(q, cutoff):
    lv = q_levels(q, cutoff)
    assert lv[0] == 0 and np.all(lv >= 0) and len(lv) <= cutoff


# --- SUSY system ----------------------------------------------------------

def test_q_nilpotent_and_h_positive():
    s = susy_system(12)
    assert (s.Q @ s.Q).norm() == 0.0
    assert s.H.is_hermitian()
    assert np.min(np.linalg.eigvalsh(s.H.entries)) >= -1e-12
    assert s.commutant_residual() == 0.0


def test_zero_mode_and_doubling_at_cutoff_12():
    s = susy_system(12)
    table = pairing_table(s.H)
    zeros = [r for r in table if abs(r[0]) <= 1e-9]
    assert zeros == [(0.0, True)]
    rest = [r for r in table if abs(r[0]) > 1e-9]
    assert len(rest) % 2 == 0
    for b, f in zip(rest[::2], rest[1::2]):
        assert b[1] and not f[1] and abs(b[0] - f[0]) <= 1e-8
    assert graded_kernel_dimension(s.H) == 1


def test_pairing_spectra_match():
    qq, qqd = nonzero_spectra(susy_system(10))
    assert len(qq) == len(qqd) and np.allclose(qq, qqd, atol=1e-8)


def test_qdag_q_form_commutant_reported():
    s = susy_system(8, "qdag_q")
    assert s.commutant_residual() > 1.0
    with pytest.raises(ValueError):
        susy_system(8, "other")


@pytest.mark.parametrize("beta", [0.1, 1.0, 5.0])
def test_witten_index_cutoff_16(beta):
    s = susy_system(16)
    w = witten_index(s.Q, s.H, beta)
    assert abs(w - 1) <= 1e-8 and abs(w.imag) <= 1e-10


def test_large_beta_equals_graded_kernel():
    s = susy_system(16)
    assert abs(witten_index(s.Q, s.H, 60.0) - graded_kernel_dimension(s.H)) <= 1e-12


def test_kernel_q_minus_qdag_compared():
    rep = witten_report(susy_system(16), 1.0)
    assert rep.kernel_q_minus_qdag == 1
    assert rep.graded_kernel == 1


@pytest.mark.parametrize("eps", [0.0, 0.1])
def test_index_invariant_under_q_exact_deformation(eps):
    s = susy_system(14)
    H = s.H + s.Q.anticomm(s.Q.dag * eps)
    assert abs(witten_index(s.Q, H, 1.0) - 1) <= 1e-8


def test_witten_errors():
    s = susy_system(6)
    with pytest.raises(ValueError):
        witten_index(s.Q, s.H, 0.0)
    with pytest.raises(ValueError):
        witten_index(s.Q, s.Q, 1.0)


def test_level_window_q_closed():
    s = susy_system(9)
    idx = level_window(s.basis)
    out = np.setdiff1d(np.arange(s.basis.dim), idx)
    assert np.max(np.abs(s.Q.entries[np.ix_(out, idx)])) == 0.0
    assert np.max(np.abs(s.Q.entries[np.ix_(idx, out)])) == 0.0


def test_interior_commutator_of_bose_ladder_in_susy_space():
    s = susy_system(8)
    assert interior_block(s.Q.comm(s.H), 1).norm() == 0.0


def test_kernel_dimension_of_zero():
    s = susy_system(5)
    assert kernel_dimension(s.Q * 0) == len(level_window(s.basis))
