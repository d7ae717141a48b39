from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvghz.lattice import make_lattice
from cvghz.modular import su2_ops
from cvghz.states import (
    ODD_B,
    SYSTEMS,
    BVector,
    CombLabel,
    comb_basis,
    comb_state,
    comb_state_momentum_form,
    eigenstate,
    labels_from_z,
    line_table,
    psi_bz,
    solution_for,
    solve_constraints,
    verify_eigensystem,
)

Q = Fraction


def brute_force(b, eta, s):
    """Substitute every grid tuple into the four label equations."""
    grid = [Q(u, s) for u in range(s)]
    b1, b2, b3, b4 = b
    out = set()
    for xa, xb, xc, pa, pb, pc in product(grid, repeat=6):
        lhs = (
            (xa + xb + xc + b1) % 2,
            (-xa + pb - pc + b2) % 2,
            (-pa - xb + pc + b3) % 2,
            (pa - pb - xc + b4) % 2,
        )
        if lhs == tuple(eta):
            out.add((xa, xb, xc, pa, pb, pc))
    return out


def test_comb_s1_up_down():
    p = make_lattice(1)
    up = comb_state("up", CombLabel(), p)
    down = comb_state("down", CombLabel(), p)
    assert np.allclose(up, np.array([1j, 1]) / np.sqrt(2), atol=1e-15)
    assert np.allclose(down, np.array([-1j, 1]) / np.sqrt(2), atol=1e-15)


def test_comb_s1_matches_z0_eigenvectors():
    # oracle: diagonalize Z0 = -i X0 Y0 built from the hand-written s = 1 matrices
    X0 = np.diag([-1.0, 1.0])
    Y0 = np.array([[0.0, 1.0], [1.0, 0.0]])
    Z0 = -1j * X0 @ Y0
    w, v = np.linalg.eigh(Z0)
    p = make_lattice(1)
    up = comb_state("up", CombLabel(), p)
    down = comb_state("down", CombLabel(), p)
    assert abs(abs(np.vdot(v[:, np.argmax(w)], up)) - 1) <= 1e-12
    assert abs(abs(np.vdot(v[:, np.argmin(w)], down)) - 1) <= 1e-12


def all_labels(s):
    return [CombLabel(Q(a, s), Q(b, s)) for a in range(s) for b in range(s)]


@pytest.mark.parametrize("s", (1, 2, 4))
def test_action_table(s):
    p = make_lattice(s)
    t = su2_ops(p)
    X, Y, Z = t.X0.matrix, t.Y0.matrix, t.Z0.matrix
    for lab in all_labels(s):
        u, d = comb_state("up", lab, p), comb_state("down", lab, p)
        assert np.linalg.norm(X @ u - d) <= 1e-12
        assert np.linalg.norm(X @ d - u) <= 1e-12
        assert np.linalg.norm(Y @ u - 1j * d) <= 1e-12
        assert np.linalg.norm(Y @ d + 1j * u) <= 1e-12
        assert np.linalg.norm(Z @ u - u) <= 1e-12
        assert np.linalg.norm(Z @ d + d) <= 1e-12


@pytest.mark.parametrize("s", (1, 2, 4))
def test_comb_duality(s):
    p = make_lattice(s)
    for lab in all_labels(s):
        for spin in ("up", "down"):
            a = comb_state(spin, lab, p)
            b = comb_state_momentum_form(spin, lab, p)
            assert abs(abs(np.vdot(a, b)) - 1) <= 1e-10


@pytest.mark.parametrize("s", (1, 2, 4))
def test_comb_teeth(s):
    p = make_lattice(s)
    v = comb_state("up", CombLabel(Q(s - 1, s), 0), p)
    assert np.count_nonzero(np.abs(v) > 1e-12) == 2 * s
    assert abs(np.linalg.norm(v) - 1) <= 1e-12


@pytest.mark.parametrize("s", (1, 2, 4))
def test_basis_completeness(s):
    p = make_lattice(s)
    M, keys = comb_basis(p)
    assert M.shape == (p.d, p.d) and len(keys) == 2 * s * s
    assert np.linalg.norm(M.conj().T @ M - np.eye(p.d), 2) <= 1e-10


def test_label_quantization():
    with pytest.raises(ValueError):
        comb_state("up", CombLabel(Q(1, 3), 0), make_lattice(2))
    with pytest.raises(ValueError):
        CombLabel(1, 0)


def test_psi_bz_is_spin_ghz_at_s1():
    p = make_lattice(1)
    up, down = np.array([1j, 1]) / np.sqrt(2), np.array([-1j, 1]) / np.sqrt(2)
    k3 = lambda a: np.einsum("i,j,k->ijk", a, a, a).reshape(-1)  # noqa: E731
    psi = psi_bz((1, 0, 0, 0), [CombLabel()] * 3, p)
    assert np.allclose(psi.amplitudes, (k3(up) - k3(down)) / np.sqrt(2), atol=1e-15)


def test_psi_bz_binary_eigenvalues_s1():
    psi = psi_bz((1, 0, 0, 0), [CombLabel()] * 3, make_lattice(1))
    rep = verify_eigensystem(psi, "binaryGHZ")
    evs = [complex(*e) for e in rep["eigenvalues"]]
    assert np.allclose(evs, [-1, 1, 1, 1], atol=1e-12)
    assert rep["b"] == [1, 0, 0, 0]


def test_v_ops_eigenvalues_s1():
    psi = psi_bz((1, 0, 0, 0), [CombLabel()] * 3, make_lattice(1))
    rep = verify_eigensystem(psi, "V-ops")
    evs = [complex(*e) for e in rep["eigenvalues"]]
    assert np.allclose(evs, [-1, 1, 1, 1], atol=1e-10)


def test_even_parity_rejected():
    with pytest.raises(ValueError, match="even parity"):
        psi_bz((0, 0, 0, 0), [CombLabel()] * 3, make_lattice(1))


grid2 = st.sampled_from([Q(0), Q(1, 2)])


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ODD_B), st.tuples(*[grid2] * 6))
def test_psi_bz_eigen_residuals_s2(b, z):
    p = make_lattice(2)
    psi = psi_bz(b, labels_from_z(z), p)
    assert abs(psi.norm - 1) <= 1e-12
    rep = verify_eigensystem(psi, "binaryGHZ")
    assert rep["max_residual"] <= 1e-10 and rep["b"] == list(b)
    sol = solution_for(b, z)
    for system in ("GHZmodbin", "modularGHZ", "V-ops"):
        rep = verify_eigensystem(psi, system)
        assert rep["max_residual"] <= 1e-10
        assert tuple(Q(e) for e in rep["eta"]) == sol.eta
        assert sum(sol.eta) % 2 == 1


def test_v_product_is_minus_one_spectrally():
    p = make_lattice(2)
    psi = psi_bz((0, 1, 1, 1), labels_from_z([Q(1, 2), 0, Q(1, 2), 0, 0, Q(1, 2)]), p)
    evs = [complex(*e) for e in verify_eigensystem(psi, "V-ops")["eigenvalues"]]
    assert abs(np.prod(evs) + 1) <= 1e-10


def test_solve_single_zero_solution():
    sols = solve_constraints((1, 0, 0, 0), (1, 0, 0, 0), make_lattice(1))
    assert [s.z for s in sols] == [(0,) * 6]


@pytest.mark.parametrize("eta", [(0, 0, 0, 0), (1, 1, 0, 0), (Q(1, 2), Q(1, 2), 0, 1)])
def test_solve_even_eta_sum_is_empty(eta):
    for b in ODD_B:
        assert solve_constraints(b, eta, make_lattice(2)) == []


def test_solve_matches_brute_force_example():
    eta = (Q(3, 2), Q(1, 2), Q(1, 2), Q(1, 2))
    fast = {s.z for s in solve_constraints((1, 0, 0, 0), eta, make_lattice(2))}
    assert fast == brute_force((1, 0, 0, 0), eta, 2)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ODD_B), st.tuples(*[st.integers(0, 3)] * 4))
def test_solve_matches_brute_force_random(b, units):
    eta = tuple(Q(u, 2) for u in units)
    fast = {s.z for s in solve_constraints(b, eta, make_lattice(2))}
    assert fast == brute_force(b, eta, 2)


def test_solutions_predict_spectrum():
    p = make_lattice(2)
    b, eta = BVector(1, 0, 0, 0), (Q(3, 2), 0, 0, Q(3, 2))
    sols = solve_constraints(b, eta, p)
    assert sols
    for sol in sols:
        rep = verify_eigensystem(psi_bz(sol.b, sol.labels, p), "GHZmodbin")
        assert tuple(Q(e) for e in rep["eta"]) == eta


def test_eigenstate_single_solution():
    p = make_lattice(2)
    sol = solve_constraints((1, 0, 0, 0), (Q(3, 2), 0, 0, Q(3, 2)), p)[0]
    st_ = eigenstate([(sol, 1)], p)
    assert np.allclose(st_.amplitudes, psi_bz(sol.b, sol.labels, p).amplitudes, atol=1e-15)


def test_eigenstate_superposition_stays_eigen():
    p = make_lattice(2)
    eta = (Q(3, 2), 0, 0, Q(3, 2))
    pool = []
    for b in ODD_B:
        pool.extend(solve_constraints(b, eta, p))
    assert len(pool) >= 2
    state = eigenstate([(pool[0], 1), (pool[1], 1)], p)
    for system in ("GHZmodbin", "modularGHZ"):
        rep = verify_eigensystem(state, system)
        assert rep["max_residual"] <= 1e-10
        assert tuple(Q(e) for e in rep["eta"]) == eta


def test_orthogonal_superposition_norm():
    p = make_lattice(2)
    eta = (Q(3, 2), 0, 0, Q(3, 2))
    sols = solve_constraints((1, 0, 0, 0), eta, p)
    a, b = sols[0], sols[1]
    assert a.z != b.z
    g = (0.6, 0.8j)
    raw = g[0] * psi_bz(a.b, a.labels, p).amplitudes + g[1] * psi_bz(b.b, b.labels, p).amplitudes
    assert abs(np.linalg.norm(raw) ** 2 - sum(abs(x) ** 2 for x in g)) <= 1e-12


def test_mixed_eta_rejected():
    p = make_lattice(2)
    a = solution_for((1, 0, 0, 0), (0,) * 6)
    b = solution_for((1, 0, 0, 0), (Q(1, 2),) + (0,) * 5)
    with pytest.raises(ValueError):
        eigenstate([(a, 1), (b, 1)], p)


@pytest.mark.parametrize("s", (1, 2))
def test_modular_and_modbin_tables_coincide(s):
    p = make_lattice(s)
    for line in range(4):
        assert np.array_equal(line_table("modularGHZ", line, p), line_table("GHZmodbin", line, p))


def test_modbin_and_binary1_agree_on_b():
    p = make_lattice(2)
    b = BVector(0, 0, 0, 1)
    z = [Q(1, 2), 0, Q(1, 2), Q(1, 2), 0, 0]
    psi = psi_bz(b, labels_from_z(z), p)
    eta = [Q(e) for e in verify_eigensystem(psi, "GHZmodbin")["eta"]]
    assert verify_eigensystem(psi, "binary1GHZ")["b"] == list(b)
    xa, xb, xc, pa, pb, pc = z
    mod1_parts = (xa + xb + xc, -xa + pb - pc, -pa - xb + pc, pa - pb - xc)
    # dropping the mod1 terms shifts eta but leaves the digit parities alone
    assert [(e - c) % 2 for e, c in zip(eta, mod1_parts)] == list(b)
    assert eta != [Q(v) for v in b]


def test_all_systems_listed():
    assert set(SYSTEMS) == {"V-ops", "modularGHZ", "GHZmodbin", "binary1GHZ", "binaryGHZ"}
