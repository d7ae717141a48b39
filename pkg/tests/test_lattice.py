import json
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvghz.lattice import (
    LatticeParams,
    StateVector,
    apply_local,
    basis_state,
    dft,
    expectation,
    identity,
    load_state,
    dump_state,
    local_factors,
    make_lattice,
    weyl_matrix,
)
from cvghz.states import CombLabel, psi_bz
from cvghz.weyl import WeylWord, ghz_family, make_word, mul, product, x_gen, y_gen

SIZES = (1, 2, 4)


def op_norm(a):
    return np.linalg.norm(a, 2)


def random_state(params, seed):
    gen = np.random.default_rng(seed)
    v = gen.normal(size=params.d**3) + 1j * gen.normal(size=params.d**3)
    return StateVector(params, v / np.linalg.norm(v))


def test_make_lattice_s1():
    p = make_lattice(1)
    assert p.d == 2
    assert p.x_grid == (-1, 0)


def test_make_lattice_s2():
    p = make_lattice(2)
    assert p.d == 8
    assert p.x_grid == tuple(Fraction(k - 4, 2) for k in range(8))
    assert p.x_grid[0] == -2 and p.x_grid[-1] == Fraction(3, 2)


@pytest.mark.parametrize("s", SIZES)
def test_grid_invariants(s):
    p = make_lattice(s)
    g = p.x_grid
    assert all(b - a == Fraction(1, s) for a, b in zip(g, g[1:]))
    assert g[0] == -s and g[-1] < s
    assert Fraction(1, s) ** 2 == Fraction(2, p.d)


def test_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        make_lattice(3)
    with pytest.raises(ValueError):
        make_lattice(0)


def test_rejects_oversized(monkeypatch):
    with pytest.raises(ValueError):
        make_lattice(8)
    monkeypatch.setenv("GHZ_MAX_DIM", "100")
    with pytest.raises(ValueError):
        make_lattice(2)
    assert make_lattice(1).d == 2


def test_dft_s1_by_hand():
    F = dft(make_lattice(1)).matrix
    # rows p in (-1, 0), columns x in (-1, 0): exp(-i pi p x) is -1 only at p = x = -1
    want = np.array([[-1, 1], [1, 1]]) / np.sqrt(2)
    assert np.allclose(F, want, atol=1e-15)


@pytest.mark.parametrize("s", SIZES)
def test_dft_unitary(s):
    F = dft(make_lattice(s)).matrix
    assert op_norm(F @ F.conj().T - np.eye(F.shape[0])) <= 1e-12


@pytest.mark.parametrize("s", SIZES)
def test_dft_of_uniform_vector(s):
    p = make_lattice(s)
    out = dft(p).matrix @ (np.ones(p.d) / np.sqrt(p.d))
    zero = p.index_of(0)
    assert abs(abs(out[zero]) - 1) <= 1e-12
    assert np.linalg.norm(np.delete(out, zero)) <= 1e-12


def test_x_and_y_at_s1():
    p = make_lattice(1)
    X = weyl_matrix(x_gen("A"), p).matrix
    Y = weyl_matrix(y_gen("A"), p).matrix
    assert np.allclose(X, np.diag([-1, 1]), atol=1e-15)
    assert np.allclose(Y, [[0, 1], [1, 0]], atol=1e-15)
    assert np.allclose(X @ Y + Y @ X, 0, atol=1e-15)


@pytest.mark.parametrize("s", SIZES)
def test_y_is_exact_translation(s):
    p = make_lattice(s)
    Y = weyl_matrix(y_gen("A"), p).matrix
    for k in range(p.d):
        col = Y[:, k]
        big = np.flatnonzero(np.abs(col) > 1e-9)
        assert len(big) == 1
        assert abs(abs(col[big[0]]) - 1) <= 1e-12
        assert (big[0] - k) % p.d in (s, p.d - s)  # one unit of x is s sites


@pytest.mark.parametrize("s", SIZES)
def test_x_is_translation_in_momentum(s):
    p = make_lattice(s)
    F = dft(p).matrix
    Xp = F @ weyl_matrix(x_gen("A"), p).matrix @ F.conj().T
    for k in range(p.d):
        big = np.flatnonzero(np.abs(Xp[:, k]) > 1e-9)
        assert len(big) == 1 and (big[0] - k) % p.d in (s, p.d - s)


@pytest.mark.parametrize("s", SIZES)
def test_anticommutation(s):
    p = make_lattice(s)
    X = weyl_matrix(x_gen("A"), p).matrix
    Y = weyl_matrix(y_gen("A"), p).matrix
    assert op_norm(X @ Y + Y @ X) <= 1e-12
    Yd = Y.conj().T
    assert op_norm(X @ Yd + Yd @ X) <= 1e-12


@pytest.mark.parametrize("s", SIZES)
@pytest.mark.parametrize("a", (-1, 0, 1, 2))
@pytest.mark.parametrize("b", (-1, 0, 1, 2))
def test_weyl_relation(s, a, b):
    p = make_lattice(s)
    Xa = weyl_matrix(make_word([("A", "x", a)]), p).matrix
    Yb = weyl_matrix(make_word([("A", "p", b)]), p).matrix
    assert op_norm(Xa @ Yb - np.exp(-1j * np.pi * a * b) * Yb @ Xa) <= 1e-12


def test_fractional_exponent_rejected():
    with pytest.raises(ValueError):
        weyl_matrix(make_word([("A", "x", Fraction(1, 2))]), make_lattice(2))


def test_multi_party_word_needs_party():
    with pytest.raises(ValueError):
        weyl_matrix(ghz_family().v1, make_lattice(1))


single = st.builds(
    lambda a, b, ph: WeylWord(((a, b), (0, 0), (0, 0)), Fraction(ph, 4)),
    st.integers(-3, 3),
    st.integers(-3, 3),
    st.integers(0, 7),
)


@settings(max_examples=40, deadline=None)
@given(single, single, st.sampled_from(SIZES))
def test_homomorphism(w1, w2, s):
    p = make_lattice(s)
    lhs = weyl_matrix(mul(w1, w2), p, "A").matrix
    rhs = weyl_matrix(w1, p, "A").matrix @ weyl_matrix(w2, p, "A").matrix
    assert op_norm(lhs - rhs) <= 1e-12


def test_apply_identity_exact():
    p = make_lattice(2)
    psi = random_state(p, 0)
    out = apply_local(identity(p), "B", psi)
    assert np.array_equal(out.amplitudes, psi.amplitudes)


def test_apply_x_on_basis_state():
    p = make_lattice(2)
    vals = (Fraction(-3, 2), Fraction(1, 2), Fraction(1))
    psi = basis_state(vals, p)
    out = apply_local(weyl_matrix(x_gen("A"), p), "A", psi)
    assert np.allclose(out.amplitudes, np.exp(1j * np.pi * -1.5) * psi.amplitudes, atol=1e-15)


@pytest.mark.parametrize("party", "ABC")
def test_apply_matches_kron(party):
    p = make_lattice(1)
    psi = random_state(p, 1)
    Y = weyl_matrix(y_gen("A"), p).matrix
    mats = [np.eye(2)] * 3
    mats["ABC".index(party)] = Y
    full = np.kron(np.kron(mats[0], mats[1]), mats[2])
    out = apply_local(weyl_matrix(y_gen("A"), p), party, psi)
    assert np.allclose(out.amplitudes, full @ psi.amplitudes, atol=1e-14)


@pytest.mark.parametrize("s", SIZES)
def test_unitary_preserves_norm(s):
    p = make_lattice(s)
    psi = random_state(p, s)
    out = apply_local(weyl_matrix(y_gen("B"), p), "B", psi)
    assert abs(out.norm - psi.norm) <= 1e-12


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_local(identity(make_lattice(1)), "A", random_state(make_lattice(2), 0))


def test_expectation_identity():
    p = make_lattice(2)
    assert abs(expectation([(identity(p), "A")], random_state(p, 3)) - 1) <= 1e-12


def test_expectation_v1_on_spin_ghz():
    p = make_lattice(1)
    psi = psi_bz((1, 0, 0, 0), [CombLabel()] * 3, p)
    ev = expectation(local_factors(ghz_family().v1, p), psi)
    assert abs(ev + 1) <= 1e-10


@pytest.mark.parametrize("s", SIZES)
def test_product_of_family_is_minus_one_numerically(s):
    p = make_lattice(s)
    psi = random_state(p, 10 + s)
    factors = []
    for w in ghz_family():
        factors.extend(local_factors(w, p))
    assert len(factors) == 12
    assert abs(expectation(factors, psi) + 1) <= 1e-10
    # and the exact product word agrees
    assert product(ghz_family()).phase == 1


def test_expectation_warns_and_normalizes():
    p = make_lattice(1)
    psi = StateVector(p, 2 * random_state(p, 4).amplitudes)
    with pytest.warns(RuntimeWarning):
        ev = expectation([(identity(p), "A")], psi)
    assert abs(ev - 1) <= 1e-12


def test_state_json_round_trip():
    p = make_lattice(2)
    psi = random_state(p, 5)
    text = dump_state(psi)
    data = json.loads(text)
    assert data["s"] == 2 and data["parties"] == 3
    assert data["basis"] == "position" and data["ordering"] == "A-major"
    back = load_state(text)
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) <= 1e-12


def test_a_major_ordering():
    p = make_lattice(1)
    psi = basis_state((-1, 0, -1), p)  # indices (0, 1, 0)
    assert np.flatnonzero(psi.amplitudes).tolist() == [(0 * 2 + 1) * 2 + 0]


def test_lattice_params_equality():
    assert LatticeParams(2) == make_lattice(2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert make_lattice(4).d == 32
