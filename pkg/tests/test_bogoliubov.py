import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncphase.bogoliubov import (
    BogoliubovTransform,
    algebra_residual,
    apply_transform,
    closed_form_residuals,
    mixing_expressions,
    q_algebra_residual,
    q_condition_table,
    theta_mode_commutators,
)
from ncphase.fock import FockBasis, mode_operators
from ncphase.grammar import InputFormatError

from golden_util import check_golden

EPS = np.array([[0.0, 1.0], [-1.0, 0.0]])


def random_transform(rng, m):
    blocks = rng.normal(size=(4, m, m)) + 1j * rng.normal(size=(4, m, m))
    return BogoliubovTransform(*blocks)


def embed_squeeze(m, k, r):
    a = np.eye(m, dtype=complex)
    b = np.zeros((m, m), complex)
    a[k, k] = np.cosh(r)
    b[k, k] = np.sinh(r)
    return BogoliubovTransform.from_ab(a, b)


def unitary(rng, m):
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, _ = np.linalg.qr(z)
    return q


# --- algebra_residual -----------------------------------------------------

@pytest.mark.parametrize("stat", ["bose", "fermi"])
@pytest.mark.parametrize("m", [1, 3])
def test_identity_all_zero(stat, m):
    rep = algebra_residual(BogoliubovTransform.identity(m), stat)
    assert rep.oracle_max == 0.0
    assert all(rep.condition_max(k) == 0.0 for k in rep.conditions)


def test_squeeze_oracle_vs_conditions():
    r = 0.3
    rep = algebra_residual(BogoliubovTransform.squeeze(r), "bose")
    assert rep.preserves(1e-10)
    assert abs(np.cosh(r) ** 2 - np.sinh(r) ** 2 - 1) <= 1e-15
    assert rep.condition_max("alpha*delta-beta*gamma^T-I") <= 1e-15
    # the second block condition does not hold on a valid squeeze
    assert rep.condition_max("alpha*gamma+beta*delta^T") == pytest.approx(np.sinh(2 * r), abs=1e-14)


@pytest.mark.parametrize("stat", ["bose", "fermi"])
def test_oracle_matches_closed_form(rng, stat):
    for m in (1, 2, 3):
        T = random_transform(rng, m)
        rep = algebra_residual(T, stat)
        r1, r2, r3 = closed_form_residuals(T, stat)
        assert np.allclose(rep.bbdag, r1, atol=1e-12)
        assert np.allclose(rep.bb, r2, atol=1e-12)
        assert np.allclose(rep.bdagbdag, r3, atol=1e-12)
        assert rep.operator_leftover <= 1e-12


def test_composition_preserves(rng):
    for _ in range(10):
        parts = [embed_squeeze(2, int(rng.integers(2)), rng.normal() * 0.5) for _ in range(2)]
        parts.append(BogoliubovTransform.from_ab(unitary(rng, 2), np.zeros((2, 2))))
        rng.shuffle(parts)
        for p in parts:
            assert algebra_residual(p, "bose").preserves(1e-12)
        T = parts[0].then(parts[1]).then(parts[2])
        assert algebra_residual(T, "bose").oracle_max <= 1e-10


def test_composition_matches_operators():
    basis = FockBasis.bose(10, 2)
    modes = [(m.a, m.adag) for m in (mode_operators(basis, 0), mode_operators(basis, 1))]
    rng = np.random.default_rng(3)
    T1 = BogoliubovTransform.from_ab(unitary(rng, 2), np.zeros((2, 2)))
    T2 = embed_squeeze(2, 0, 0.2)
    step = apply_transform(T2, list(zip(*[apply_transform(T1, modes).b, apply_transform(T1, modes).bdag])))
    direct = apply_transform(T1.then(T2), modes)
    for x, y in zip(step.b, direct.b):
        assert (x - y).norm() <= 1e-13


def test_fermi_rotation():
    t = 0.4
    c, s = np.cos(t), np.sin(t)
    good = BogoliubovTransform([[c]], [[s]], [[s]], [[c]])
    rep = algebra_residual(good, "fermi")
    assert abs(rep.bbdag[0, 0]) <= 1e-15
    # one mode cannot mix a and a+ canonically: {b, b} = 2cs
    assert rep.bb[0, 0] == pytest.approx(2 * c * s, abs=1e-15)
    assert not rep.preserves()
    # the sign choice gamma = -beta is not adjoint-consistent and breaks {b, b+} = 1
    bad = BogoliubovTransform([[c]], [[s]], [[-s]], [[c]])
    rep = algebra_residual(bad, "fermi")
    assert rep.bbdag[0, 0] == pytest.approx(-2 * s * s, abs=1e-15)


def test_fermi_two_mode_unitary(rng):
    T = BogoliubovTransform.from_ab(unitary(rng, 2), np.zeros((2, 2)))
    assert algebra_residual(T, "fermi").preserves(1e-12)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        BogoliubovTransform(np.eye(2), np.eye(3), np.eye(2), np.eye(2))


def test_parse():
    T = BogoliubovTransform.parse("1  1.5 0.5i 1-1i 2")
    assert T.m == 1 and T.beta[0, 0] == 0.5j and T.gamma[0, 0] == 1 - 1j
    with pytest.raises(InputFormatError):
        BogoliubovTransform.parse("2 1 0 0 1")
    with pytest.raises(InputFormatError):
        BogoliubovTransform.parse("x")


# --- q algebra ------------------------------------------------------------

@pytest.mark.parametrize("q", [-1.0, -0.5, 0.0, 0.3, 1.0])
def test_q_identity(q):
    rep = q_algebra_residual(BogoliubovTransform.identity(1), q)
    assert rep.conditions_hold() and rep.preserves()
    assert rep.conditions["alpha*delta+q*gamma*beta-1"] == 0
    assert rep.conditions["beta*gamma+q*delta*alpha-q"] == 0


def test_q_minus_one_reduces_to_bose(rng):
    for _ in range(10):
        T = random_transform(rng, 1)
        rep = q_algebra_residual(T, -1.0)
        assert rep.oracle["1"] == pytest.approx(algebra_residual(T, "bose").bbdag[0, 0], abs=1e-12)
        assert abs(rep.oracle["aa"]) <= 1e-12 and abs(rep.oracle["a+a+"]) <= 1e-12 and abs(rep.oracle["a+a"]) <= 1e-12


@settings(max_examples=30)
@given(st.floats(-1, 1), st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3),
       st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_q_oracle_closed_form(q, al, be, ga, de):
    # bb+ + q b+b - 1 expanded by hand with aa+ = 1 - q a+a
    rep = q_algebra_residual(BogoliubovTransform([[al]], [[be]], [[ga]], [[de]]), q)
    expect = {
        "1": al * de + q * ga * be - 1,
        "aa": al * ga + q * ga * al,
        "a+a+": be * de + q * de * be,
        "a+a": be * ga + q * de * al - q * al * de - q * q * ga * be,
    }
    scale = 1 + max(abs(al), abs(be), abs(ga), abs(de)) ** 2
    for k, v in expect.items():
        assert abs(rep.oracle[k] - v) <= 1e-12 * scale


def test_q_requires_scalar_blocks():
    with pytest.raises(ValueError):
        q_algebra_residual(BogoliubovTransform.identity(2), 0.5)


def _table_text(rows):
    lines = ["draw oracle_max condition_max oracle_preserves conditions_hold agree"]
    for r in rows:
        lines.append(
            f"{r['draw']} {r['oracle_max']:.6e} {r['condition_max']:.6e} "
            f"{int(r['oracle_preserves'])} {int(r['conditions_hold'])} {int(r['agree'])}"
        )
    return "\n".join(lines) + "\n"


def test_q_condition_table_golden():
    rows = q_condition_table(100, 0.5, np.random.default_rng(0))
    assert len(rows) == 100
    check_golden("q_conditions_q0.5_seed0.txt", _table_text(rows))


# --- apply_transform ------------------------------------------------------

def test_apply_identity_unchanged():
    m = mode_operators(FockBasis.bose(8), 0)
    out = apply_transform(BogoliubovTransform.identity(1), [(m.a, m.adag)])
    assert np.array_equal(out.b[0].entries, m.a.entries)
    assert np.array_equal(out.bdag[0].entries, m.adag.entries)


def test_apply_squeeze_cutoff_20():
    m = mode_operators(FockBasis.bose(20), 0)
    out = apply_transform(BogoliubovTransform.squeeze(0.3), [(m.a, m.adag)])
    assert out.residual <= 1e-8
    assert out.adjoint_defect <= 1e-12


def test_apply_fermi_rotation_exact():
    m = mode_operators(FockBasis.parse("fermi"), 0)
    t = 0.7
    T = BogoliubovTransform.from_ab([[np.cos(t)]], [[np.sin(t)]])
    out = apply_transform(T, [(m.a, m.adag)])
    assert out.residual <= 1e-15


def test_apply_needs_adjoint_consistency():
    m = mode_operators(FockBasis.bose(6), 0)
    T = BogoliubovTransform([[1.0]], [[0.5]], [[-0.5]], [[1.0]])
    with pytest.raises(ValueError):
        apply_transform(T, [(m.a, m.adag)])


def test_apply_basis_mismatch():
    a = mode_operators(FockBasis.bose(6), 0)
    b = mode_operators(FockBasis.bose(7), 0)
    with pytest.raises(ValueError):
        apply_transform(BogoliubovTransform.identity(2), [(a.a, a.adag), (b.a, b.adag)])


# --- theta modes ----------------------------------------------------------

def test_theta_modes_canonical():
    z = np.zeros((2, 2))
    t = theta_mode_commutators(z, z)
    assert np.allclose(t.aadag, np.eye(2), atol=1e-15)
    assert np.allclose(t.aa, 0, atol=1e-15) and np.allclose(t.adagadag, 0, atol=1e-15)


def test_theta_modes_magnetic_example():
    B = 2.0
    t = theta_mode_commutators(EPS / B, B * EPS)
    # (i/2)(1/B - B) = -0.75i off the diagonal; [a, a+] picks up (i/2)(1/B + B) = 1.25i
    assert np.allclose(t.aa, [[0, -0.75j], [0.75j, 0]], atol=1e-15)
    assert np.allclose(t.aadag, [[1, 1.25j], [-1.25j, 1]], atol=1e-15)
    d = t.discrepancies()
    assert d["linear[a^i,a^j]"] == pytest.approx(0.75, abs=1e-14)
    # off-diagonal: 1.25i against i(1/B - B) = -1.5i, and against (i/2)(1/B - B) = -0.75i
    assert d["linear[a^i,a^+j]"] == pytest.approx(2.75, abs=1e-14)
    assert d["half[a_i,a^+_j]"] == pytest.approx(2.0, abs=1e-14)


@settings(max_examples=25)
@given(st.lists(st.integers(-8, 8), min_size=6, max_size=6), st.integers(-3, 3))
def test_theta_modes_linear_and_closed_form(vals, k):
    tx = np.zeros((3, 3))
    tp = np.zeros((3, 3))
    tx[np.triu_indices(3, 1)] = np.array(vals[:3]) / 8
    tp[np.triu_indices(3, 1)] = np.array(vals[3:]) / 8
    tx, tp = tx - tx.T, tp - tp.T
    t = theta_mode_commutators(tx, tp)
    assert np.allclose(t.aa, 0.5j * (tx - tp), atol=1e-14)
    assert np.allclose(t.aadag, np.eye(3) + 0.5j * (tx + tp), atol=1e-14)
    assert np.allclose(t.adagadag, 0.5j * (tx - tp), atol=1e-14)
    base = theta_mode_commutators(np.zeros((3, 3)), np.zeros((3, 3)))
    scaled = theta_mode_commutators(k * tx, k * tp)
    assert np.allclose(scaled.aa, k * t.aa, atol=1e-13)
    assert np.allclose(scaled.aadag - base.aadag, k * (t.aadag - base.aadag), atol=1e-13)


def test_theta_modes_dimension_mismatch():
    with pytest.raises(ValueError):
        theta_mode_commutators(np.zeros((2, 2)), np.zeros((3, 3)))


def test_mixing_expressions_identity():
    out = mixing_expressions(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2), EPS)
    vals = list(out.values())
    assert np.allclose(vals[0], 0) and np.allclose(vals[1], 2 * EPS)
