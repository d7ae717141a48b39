"""Modular variables, binary digit operators and the unit-digit su(2) triple.

All residues are nonnegative: ``(z) mod 2**k`` lies in ``[0, 2**k)`` and the
digit ``[z]_n`` is ``floor((z mod 2**(n+1)) / 2**n)``.  Both are diagonal in
their own basis; values are computed in integer units of ``1/s`` so they are
exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .lattice import LatticeParams, LocalOperator, diagonal, dft

COMMUTE_TOL = 1e-12
NONZERO_MIN = 0.1


def _check_basis(basis: str) -> None:
    if basis not in ("x", "p"):
        raise ValueError(f"basis must be 'x' or 'p', got {basis!r}")


def modulus_units(k: int, params: LatticeParams) -> int:
    """``2**k`` in units of ``1/s``; raises if the residue is not representable."""
    lo, hi = -params.log2_s, 1 + params.log2_s
    if not lo <= k <= hi:
        raise ValueError(f"modulus exponent k={k} outside [{lo}, {hi}] for s={params.s}")
    return params.s * 2**k if k >= 0 else params.s // 2 ** (-k)


def residue_units(k: int, params: LatticeParams) -> np.ndarray:
    return np.mod(params.grid_units, modulus_units(k, params))


def digit_units(n: int, params: LatticeParams) -> np.ndarray:
    lo = -params.log2_s
    if not lo <= n <= 0:
        raise ValueError(f"digit index n={n} outside [{lo}, 0] for s={params.s}")
    q = modulus_units(n + 1, params)
    return np.mod(params.grid_units, q) // (q // 2)


@dataclass(frozen=True)
class ModularOperator:
    basis: str
    k: int
    values: tuple[Fraction, ...]

    def operator(self, params: LatticeParams) -> LocalOperator:
        return diagonal(np.array([float(v) for v in self.values]), self.basis, params)


@dataclass(frozen=True)
class DigitOperator:
    basis: str
    n: int
    values: tuple[int, ...]

    def operator(self, params: LatticeParams) -> LocalOperator:
        return diagonal(np.array(self.values, dtype=float), self.basis, params)


def mod_op(basis: str, k: int, params: LatticeParams) -> ModularOperator:
    _check_basis(basis)
    units = residue_units(k, params)
    return ModularOperator(basis, k, tuple(Fraction(int(u), params.s) for u in units))


def digit_op(basis: str, n: int, params: LatticeParams) -> DigitOperator:
    _check_basis(basis)
    return DigitOperator(basis, n, tuple(int(v) for v in digit_units(n, params)))


def _comm_norm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a @ b - b @ a, 2))


def _x_p_norm(x_vals: np.ndarray, p_vals: np.ndarray, params: LatticeParams) -> float:
    # x-diagonal against F^dag diag(p_vals) F
    F = dft(params).matrix
    P = F.conj().T @ (p_vals[:, None] * F)
    return _comm_norm(np.diag(x_vals).astype(complex), P)


def commutation_table(
    params: LatticeParams,
    k_range: range | None = None,
    l_range: range | None = None,
    m_range: range | None = None,
) -> list[dict]:
    """Commutator norms for the four x/p modular and digit pairings.

    Rules checked, with cells that must commute flagged ``expected_zero``:
    ``(x)mod 2^k`` vs ``(p)mod 2^l`` when ``k + l <= 1``;
    ``(x)mod 2^k`` vs ``[p]_m`` when ``k + m <= 0``;
    ``(p)mod 2^l`` vs ``[x]_m`` when ``l + m <= 0``;
    ``[x]_n`` vs ``[p]_m`` when ``n + m <= -1``.
    Cells outside the rule are recorded with ``expected_zero = False``; their
    ``pass`` only demands that the commutator is measurably nonzero.
    """
    lg = params.log2_s
    k_range = k_range if k_range is not None else range(-lg, lg + 2)
    l_range = l_range if l_range is not None else range(-lg, lg + 2)
    m_range = m_range if m_range is not None else range(-lg, 1)
    s = params.s

    mod_vals = {k: residue_units(k, params) / s for k in set(k_range) | set(l_range)}
    dig_vals = {m: digit_units(m, params).astype(float) for m in m_range}

    rows = []

    def add(kind, indices, norm, expected_zero):
        ok = norm <= COMMUTE_TOL if expected_zero else norm > NONZERO_MIN
        rows.append(
            {
                "kind": kind,
                "indices": list(indices),
                "commutator_norm": norm,
                "expected_zero": expected_zero,
                "pass": bool(ok),
            }
        )

    for k, l in iproduct(k_range, l_range):
        add("xmod-pmod", (k, l), _x_p_norm(mod_vals[k], mod_vals[l], params), k + l <= 1)
    for k, m in iproduct(k_range, m_range):
        add("xmod-pdigit", (k, m), _x_p_norm(mod_vals[k], dig_vals[m], params), k + m <= 0)
    for l, m in iproduct(l_range, m_range):
        # [x]_m against (p)mod 2^l
        add("pmod-xdigit", (l, m), _x_p_norm(dig_vals[m], mod_vals[l], params), l + m <= 0)
    for n, m in iproduct(m_range, m_range):
        add("xdigit-pdigit", (n, m), _x_p_norm(dig_vals[n], dig_vals[m], params), n + m <= -1)
    return rows


def summarize_table(rows: list[dict]) -> dict:
    """Per rule: all commuting cells pass, and at least one violating cell is nonzero."""
    out = {}
    for kind in ("xmod-pmod", "xmod-pdigit", "pmod-xdigit", "xdigit-pdigit"):
        sub = [r for r in rows if r["kind"] == kind]
        zero = [r for r in sub if r["expected_zero"]]
        other = [r for r in sub if not r["expected_zero"]]
        out[kind] = {
            "commuting_cells": len(zero),
            "commuting_ok": all(r["pass"] for r in zero),
            "max_commuting_norm": max((r["commutator_norm"] for r in zero), default=0.0),
            "violating_cells": len(other),
            "nonzero_violations": sum(r["commutator_norm"] > NONZERO_MIN for r in other),
        }
        out[kind]["pass"] = out[kind]["commuting_ok"] and out[kind]["nonzero_violations"] >= 1
    return out


@dataclass(frozen=True, eq=False)
class Su2Triple:
    X0: LocalOperator
    Y0: LocalOperator
    Z0: LocalOperator

    def errors(self) -> dict[str, float]:
        X, Y, Z = self.X0.matrix, self.Y0.matrix, self.Z0.matrix
        eye = np.eye(X.shape[0])
        n = lambda a: float(np.linalg.norm(a, 2))  # noqa: E731
        return {
            "X0^2-I": n(X @ X - eye),
            "Y0^2-I": n(Y @ Y - eye),
            "Z0^2-I": n(Z @ Z - eye),
            "[X0,Y0]-2iZ0": n(X @ Y - Y @ X - 2j * Z),
            "[Y0,Z0]-2iX0": n(Y @ Z - Z @ Y - 2j * X),
            "[Z0,X0]-2iY0": n(Z @ X - X @ Z - 2j * Y),
        }


def su2_ops(params: LatticeParams, tol: float = 1e-12) -> Su2Triple:
    """``X0 = exp(i pi [x]_0)``, ``Y0 = exp(i pi [p]_0)``, ``Z0 = -i X0 Y0``."""
    sign = 1.0 - 2.0 * digit_units(0, params)
    X0 = diagonal(sign, "x", params)
    Y0 = diagonal(sign, "p", params)
    Z0 = LocalOperator(-1j * X0.matrix @ Y0.matrix, "generic")
    triple = Su2Triple(X0, Y0, Z0)
    bad = {k: v for k, v in triple.errors().items() if v > tol}
    if bad:
        raise ArithmeticError(f"su(2) relations violated: {bad}")
    return triple
