"""End-to-end verification suite.

Each ``criterion_*`` function returns ``{"name", "pass", "metrics"}``.  Metrics
are rounded to a few significant digits so repeated runs serialize to the
same bytes; timings are deliberately left out.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .lattice import LatticeParams, make_lattice, weyl_matrix
from .lhv import check_associativity_gap, enumerate_digit_lhv, random_real_lhv
from .measurement import (
    SETTING_NAMES,
    RunConfig,
    mermin_statistic,
    sample,
    sampled_mermin,
    setting_statistics,
)
from .modular import (
    commutation_table,
    digit_units,
    modulus_units,
    residue_units,
    su2_ops,
    summarize_table,
)
from .states import (
    ODD_B,
    BVector,
    CombLabel,
    comb_basis,
    comb_state,
    constraint_lhs,
    labels_from_z,
    psi_bz,
    solution_for,
    solve_constraints,
    verify_eigensystem,
)
from .weyl import (
    PARTIES,
    WeylWord,
    dagger,
    ghz_certificate,
    make_word,
    mul,
    x_gen,
    y_gen,
)

TOL_OP = 1e-12
TOL_STATE = 1e-10
DEFAULT_SEED = 42


def _r(x: float) -> float:
    return float(f"{x:.4g}")


def _result(name: str, ok: bool, **metrics) -> dict:
    return {"name": name, "pass": bool(ok), "metrics": metrics}


def _label_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_z(gen: np.random.Generator, s: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(u), s) for u in gen.integers(0, s, size=6))


# -- exact algebra ----------------------------------------------------------

def anticommutation_certificate() -> dict:
    out = {}
    for p in PARTIES:
        X, Y = x_gen(p), y_gen(p)
        xy, yx = mul(X, Y), mul(Y, X)
        xyd, ydx = mul(X, dagger(Y)), mul(dagger(Y), X)
        out[p] = (
            xy.exponents == yx.exponents
            and (xy.phase - yx.phase) % 2 == 1
            and xyd.exponents == ydx.exponents
            and (xyd.phase - ydx.phase) % 2 == 1
        )
    return out


def criterion_1_exact_algebra() -> dict:
    cert = ghz_certificate()
    anti = anticommutation_certificate()
    ok = cert["pairwise_commute"] and cert["product_is_minus_identity"] and all(anti.values())
    return _result(
        "exact_algebra",
        ok,
        pairwise=cert["pairwise"],
        product=cert["product"],
        product_is_minus_identity=cert["product_is_minus_identity"],
        anticommuting_parties=anti,
    )


# -- lattice ----------------------------------------------------------------

def weyl_relation_error(params: LatticeParams, a: int, b: int) -> float:
    """``|| e^{i pi a x} e^{i pi b p} - e^{-i pi a b} e^{i pi b p} e^{i pi a x} ||``."""
    Xa = weyl_matrix(make_word([("A", "x", a)]), params).matrix
    Yb = weyl_matrix(make_word([("A", "p", b)]), params).matrix
    return float(np.linalg.norm(Xa @ Yb - np.exp(-1j * np.pi * a * b) * (Yb @ Xa), 2))


def anticommutator_norm(params: LatticeParams) -> float:
    X = weyl_matrix(x_gen("A"), params).matrix
    Y = weyl_matrix(y_gen("A"), params).matrix
    return float(np.linalg.norm(X @ Y + Y @ X, 2))


def criterion_2_lattice_anticommutation(sizes=(1, 2, 4)) -> dict:
    anti, weyl = {}, {}
    for s in sizes:
        params = make_lattice(s)
        anti[str(s)] = anticommutator_norm(params)
        weyl[str(s)] = max(
            weyl_relation_error(params, a, b) for a, b in iproduct((-1, 0, 1, 2), repeat=2)
        )
    ok = max(anti.values()) <= TOL_OP and max(weyl.values()) <= TOL_OP
    return _result(
        "lattice_anticommutation",
        ok,
        anticommutator_norm={k: _r(v) for k, v in anti.items()},
        weyl_relation_error={k: _r(v) for k, v in weyl.items()},
    )


def homomorphism_error(params: LatticeParams, trials: int = 20, seed: int = DEFAULT_SEED) -> float:
    """Max ``|| M(w1 w2) - M(w1) M(w2) ||`` over random single-party integer words."""
    gen = _label_rng(seed)
    worst = 0.0
    for _ in range(trials):
        a1, b1, a2, b2 = (int(v) for v in gen.integers(-3, 4, size=4))
        ph1, ph2 = (Fraction(int(v), 4) for v in gen.integers(0, 8, size=2))
        w1 = WeylWord(((a1, b1), (0, 0), (0, 0)), ph1)
        w2 = WeylWord(((a2, b2), (0, 0), (0, 0)), ph2)
        lhs = weyl_matrix(mul(w1, w2), params, "A").matrix
        rhs = weyl_matrix(w1, params, "A").matrix @ weyl_matrix(w2, params, "A").matrix
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst


# -- states -----------------------------------------------------------------

UP_S1 = np.array([1j, 1]) / np.sqrt(2)
DOWN_S1 = np.array([-1j, 1]) / np.sqrt(2)


def spin_ghz_s1() -> np.ndarray:
    """``(|uuu> - |ddd>)/sqrt 2`` from explicit s = 1 spinors."""
    uuu = np.einsum("i,j,k->ijk", UP_S1, UP_S1, UP_S1)
    ddd = np.einsum("i,j,k->ijk", DOWN_S1, DOWN_S1, DOWN_S1)
    return ((uuu - ddd) / np.sqrt(2)).reshape(-1)


def reference_state():
    params = make_lattice(1)
    return psi_bz((1, 0, 0, 0), [CombLabel()] * 3, params)


def criterion_3_spin_ghz() -> dict:
    state = reference_state()
    dev = float(np.linalg.norm(state.amplitudes - spin_ghz_s1()))
    rep = verify_eigensystem(state, "V-ops")
    evs = [complex(*e) for e in rep["eigenvalues"]]
    ev_err = max(abs(e - t) for e, t in zip(evs, (-1, 1, 1, 1)))
    ok = dev <= TOL_STATE and ev_err <= TOL_STATE and rep["max_residual"] <= TOL_STATE
    return _result(
        "spin_ghz_reduction",
        ok,
        state_deviation=_r(dev),
        eigenvalues=[round(e.real, 10) for e in evs],
        eigenvalue_error=_r(ev_err),
        max_residual=_r(rep["max_residual"]),
    )


def criterion_4_eigensystem_coverage(s: int = 2, tuples: int = 20, seed: int = DEFAULT_SEED) -> dict:
    params = make_lattice(s)
    gen = _label_rng(seed)
    worst = {"binaryGHZ": 0.0, "binary1GHZ": 0.0, "GHZmodbin": 0.0}
    failures = []
    checked = 0
    for b in ODD_B:
        for _ in range(tuples):
            z = random_z(gen, s)
            sol = solution_for(b, z)
            state = psi_bz(b, labels_from_z(z), params)
            for system in worst:
                rep = verify_eigensystem(state, system)
                worst[system] = max(worst[system], rep["max_residual"])
                if not rep["pass"]:
                    failures.append({"b": list(b), "z": [str(q) for q in z], "system": system})
                if system == "GHZmodbin":
                    eta = tuple(Fraction(e) for e in rep["eta"])
                    if eta != sol.eta or sum(eta) % 2 != 1:
                        failures.append({"b": list(b), "z": [str(q) for q in z], "eta": rep["eta"]})
                if system == "binaryGHZ" and rep["b"] != list(b):
                    failures.append({"b": list(b), "z": [str(q) for q in z], "measured_b": rep["b"]})
            checked += 1
    ok = not failures and max(worst.values()) <= TOL_STATE
    return _result(
        "eigensystem_coverage",
        ok,
        states_checked=checked,
        max_residual={k: _r(v) for k, v in worst.items()},
        failures=failures[:5],
    )


def brute_force_solutions(b, eta, s: int) -> set[tuple[Fraction, ...]]:
    """Every grid ``z`` in ``[0, 1)**6`` whose constraint values equal ``eta``."""
    eta = tuple(Fraction(e) for e in eta)
    grid = [Fraction(u, s) for u in range(s)]
    return {z for z in iproduct(grid, repeat=6) if constraint_lhs(b, z) == eta}


def solver_cases(s: int, n: int = 10, seed: int = DEFAULT_SEED):
    """Seeded (b, eta) pairs: most taken from a random label tuple, a few drawn blind."""
    gen = _label_rng(seed)
    cases = []
    for i in range(n):
        b = ODD_B[int(gen.integers(0, len(ODD_B)))]
        if i % 4 == 3:
            eta = tuple(Fraction(int(u), s) for u in gen.integers(0, 2 * s, size=4))
        else:
            eta = constraint_lhs(b, random_z(gen, s))
        cases.append((b, eta))
    return cases


def criterion_5_solver(s: int = 2, seed: int = DEFAULT_SEED) -> dict:
    params = make_lattice(s)
    rows = []
    for b, eta in solver_cases(s, seed=seed):
        fast = {sol.z for sol in solve_constraints(b, eta, params)}
        slow = brute_force_solutions(b, eta, s)
        rows.append(
            {
                "b": list(b),
                "eta": [f"{e.numerator}/{e.denominator}" for e in eta],
                "solutions": len(fast),
                "match": fast == slow,
            }
        )
    return _result("constraint_solver", all(r["match"] for r in rows), cases=rows)


def criterion_6_measurement(shots: int = 10_000, seed: int = DEFAULT_SEED) -> dict:
    state = reference_state()
    b = BVector(1, 0, 0, 0)
    per_setting = {}
    records = []
    for name in SETTING_NAMES:
        recs = sample(state, RunConfig(shots=shots, seed=seed, policy="fixed", settings=(name,)))
        stats = setting_statistics(recs, b)
        per_setting[name] = stats["exact_match_fraction"]
        records.extend(recs)
    m_exact = mermin_statistic(state, b)
    m_sampled = sampled_mermin(records, b)
    within = abs(m_sampled["value"] - m_exact) <= 5 * m_sampled["stderr"] + 1e-12
    ok = all(f == 1.0 for f in per_setting.values()) and abs(abs(m_exact) - 4) <= TOL_STATE and within
    return _result(
        "measurement_determinism",
        ok,
        shots_per_setting=shots,
        seed=seed,
        match_fraction=per_setting,
        mermin_exact=round(m_exact, 10),
        mermin_sampled=m_sampled["value"],
        mermin_sampled_stderr=_r(m_sampled["stderr"]),
    )


def criterion_7_lhv(samples: int = 100_000, seed: int = DEFAULT_SEED) -> dict:
    digits = {"".join(map(str, b)): enumerate_digit_lhv(b) for b in ODD_B}
    digit_ok = all(
        r["full_solutions"] == 0 and r["max_satisfied"] == 3 and r["assignments_checked"] == 64
        and r["parity_identity_violations"] == 0
        for r in digits.values()
    )
    reals = []
    for eta in ((1, 0, 0, 0), (Fraction(3, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))):
        rep = random_real_lhv(eta, samples, seed)
        reals.append(
            {
                "eta": rep["eta"],
                "parity_identity_violations": rep["parity_identity_violations"],
                "quantum_compatible": rep["quantum_compatible"],
                "full_solutions": rep["full_solutions"],
            }
        )
    real_ok = all(
        r["parity_identity_violations"] == 0 and r["quantum_compatible"] == 0 and r["full_solutions"] == 0
        for r in reals
    )
    return _result(
        "lhv_falsification",
        digit_ok and real_ok,
        digits={k: {"full_solutions": v["full_solutions"], "max_satisfied": v["max_satisfied"]}
                for k, v in digits.items()},
        real=reals,
        samples=samples,
        seed=seed,
    )


def digit_identities_exact(params: LatticeParams) -> dict:
    """Residue-digit recursion and binary recomposition, in exact integer units."""
    lg = params.log2_s
    recursion = all(
        np.array_equal(
            residue_units(n + 1, params),
            residue_units(n, params) + modulus_units(n, params) * digit_units(n, params),
        )
        for n in range(-lg, 1)
    )
    recomposed = sum(modulus_units(n, params) * digit_units(n, params) for n in range(-lg, 1))
    return {
        "mod_recursion": bool(recursion),
        "recomposition": bool(np.array_equal(recomposed, residue_units(1, params))),
    }


def action_table_error(params: LatticeParams) -> float:
    t = su2_ops(params)
    X, Y, Z = t.X0.matrix, t.Y0.matrix, t.Z0.matrix
    worst = 0.0
    s = params.s
    for ux, up in iproduct(range(s), repeat=2):
        lab = CombLabel(Fraction(ux, s), Fraction(up, s))
        u, d = comb_state("up", lab, params), comb_state("down", lab, params)
        for got, want in (
            (X @ u, d), (X @ d, u), (Y @ u, 1j * d), (Y @ d, -1j * u), (Z @ u, u), (Z @ d, -d),
        ):
            worst = max(worst, float(np.linalg.norm(got - want)))
    return worst


def criterion_8_modular_structure(s: int = 4) -> dict:
    params = make_lattice(s)
    summary = summarize_table(commutation_table(params))
    ident = digit_identities_exact(params)
    su2 = {str(sz): max(su2_ops(make_lattice(sz)).errors().values()) for sz in (1, 2, 4)}
    action = {str(sz): action_table_error(make_lattice(sz)) for sz in (1, 2, 4)}
    ok = (
        all(v["pass"] for v in summary.values())
        and all(ident.values())
        and max(su2.values()) <= TOL_OP
        and max(action.values()) <= TOL_OP
    )
    return _result(
        "modular_binary_structure",
        ok,
        commutation_rules={
            k: {
                "commuting_cells": v["commuting_cells"],
                "commuting_ok": v["commuting_ok"],
                "max_commuting_norm": _r(v["max_commuting_norm"]),
                "nonzero_violations": v["nonzero_violations"],
            }
            for k, v in summary.items()
        },
        identities=ident,
        su2_error={k: _r(v) for k, v in su2.items()},
        action_table_error={k: _r(v) for k, v in action.items()},
    )


def criterion_9_basis(s: int = 2) -> dict:
    params = make_lattice(s)
    M, _ = comb_basis(params)
    dev = float(np.linalg.norm(M.conj().T @ M - np.eye(params.d), 2))
    ok = M.shape == (params.d, params.d) and dev <= TOL_STATE
    return _result("basis_completeness", ok, states=M.shape[1], dimension=params.d, gram_deviation=_r(dev))


CRITERIA = (
    criterion_1_exact_algebra,
    criterion_2_lattice_anticommutation,
    criterion_3_spin_ghz,
    criterion_4_eigensystem_coverage,
    criterion_5_solver,
    criterion_6_measurement,
    criterion_7_lhv,
    criterion_8_modular_structure,
    criterion_9_basis,
)


def run_all() -> dict:
    """Every criterion above plus the associativity witnesses."""
    results = [c() for c in CRITERIA]
    assoc = {str(s): check_associativity_gap(make_lattice(s)) for s in (1, 2, 4)}
    assoc_ok = all(
        a["spectrum_XY_vs_minus_YX"] <= TOL_OP
        and a["anticommutator_norm"] <= TOL_OP
        and a["noncommuting_even_sum_gap"] > 0.1
        and a["commuting_even_sum_gap"] == 0
        for a in assoc.values()
    )
    results.append(
        _result(
            "associativity_gap",
            assoc_ok,
            **{
                s: {
                    "spectrum_XY_vs_minus_YX": _r(a["spectrum_XY_vs_minus_YX"]),
                    "noncommuting_even_sum_gap": _r(a["noncommuting_even_sum_gap"]),
                }
                for s, a in assoc.items()
            },
        )
    )
    return {
        "ok": all(r["pass"] for r in results),
        "failed": [r["name"] for r in results if not r["pass"]],
        "criteria": results,
    }

