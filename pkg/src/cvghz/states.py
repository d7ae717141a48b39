"""Comb qubits, the three-party GHZ eigenstates and their eigenvalue systems."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import NamedTuple, Sequence

import numpy as np

from .lattice import (
    LatticeParams,
    StateVector,
    apply_matrix,
    apply_ordered,
    dft,
    local_factors,
    product_state,
)
from .modular import digit_units
from .weyl import ghz_family

EIGEN_TOL = 1e-10

# measured axis per party for each of the four GHZ lines
SETTINGS = (("x", "x", "x"), ("x", "p", "p"), ("p", "x", "p"), ("p", "p", "x"))
# signs of the party terms in the modular form of each line
SIGNS = ((1, 1, 1), (-1, 1, -1), (-1, -1, 1), (1, -1, -1))
SYSTEMS = ("V-ops", "modularGHZ", "GHZmodbin", "binary1GHZ", "binaryGHZ")


class BVector(NamedTuple):
    b1: int
    b2: int
    b3: int
    b4: int

    @property
    def parity(self) -> int:
        return sum(self) % 2

    @classmethod
    def parse(cls, value) -> "BVector":
        if isinstance(value, str):
            value = [int(v) for v in value.replace(" ", "").split(",")]
        bits = tuple(int(v) for v in value)
        if len(bits) != 4 or any(v not in (0, 1) for v in bits):
            raise ValueError(f"b must be four bits, got {value!r}")
        return cls(*bits)


ODD_B = tuple(BVector(*bits) for bits in iproduct((0, 1), repeat=4) if sum(bits) % 2)


@dataclass(frozen=True)
class CombLabel:
    x0: Fraction = Fraction(0)
    p0: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "x0", Fraction(self.x0))
        object.__setattr__(self, "p0", Fraction(self.p0))
        for name in ("x0", "p0"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise ValueError(f"{name}={v} outside [0, 1)")

    def units(self, params: LatticeParams) -> tuple[int, int]:
        ux, up = self.x0 * params.s, self.p0 * params.s
        if ux.denominator != 1 or up.denominator != 1:
            raise ValueError(
                f"label ({self.x0}, {self.p0}) is not a multiple of 1/{params.s}"
            )
        return int(ux), int(up)


def _spin_sign(spin: str | int) -> int:
    if spin in ("up", 0):
        return 1
    if spin in ("down", 1):
        return -1
    raise ValueError(f"spin must be 'up'/'down' (or bit 0/1), got {spin!r}")


def comb_state(spin: str | int, label: CombLabel, params: LatticeParams) -> np.ndarray:
    """Position-form comb: teeth at ``x0 + n`` with amplitude ``e^{i pi n p0}``
    on even ``n`` and ``+-i e^{i pi n p0}`` on odd ``n``; ``2s`` teeth in all."""
    sigma = _spin_sign(spin)
    ux, up = label.units(params)
    s = params.s
    diff = params.grid_units - ux
    on = np.mod(diff, s) == 0
    n = diff // s
    phase = np.exp(1j * np.pi * np.mod(n * up, 2 * s) / s)
    coeff = np.where(n % 2 == 0, 1.0, sigma * 1j)
    return np.where(on, phase * coeff, 0.0) / np.sqrt(2 * s)


def comb_state_momentum_form(
    spin: str | int, label: CombLabel, params: LatticeParams
) -> np.ndarray:
    """The same comb written on momentum teeth ``p0 + k``, returned in position basis.

    The overall prefactor is ``exp(-i pi x0 p0)``.
    """
    sigma = _spin_sign(spin)
    ux, up = label.units(params)
    s = params.s
    diff = params.grid_units - up
    on = np.mod(diff, s) == 0
    k = diff // s
    phase = np.exp(-1j * np.pi * np.mod(k * ux, 2 * s) / s)
    coeff = 1.0 + sigma * 1j * np.where(k % 2 == 0, 1.0, -1.0)
    phi = np.where(on, phase * coeff, 0.0) / np.sqrt(4 * s)
    phi = phi * np.exp(-1j * np.pi * float(label.x0 * label.p0))
    F = dft(params).matrix
    return F.conj().T @ phi


def comb_basis(params: LatticeParams) -> tuple[np.ndarray, list[tuple[str, CombLabel]]]:
    """All ``2 s**2`` comb states as columns, with their ``(spin, label)`` keys."""
    s = params.s
    cols, keys = [], []
    for spin in ("up", "down"):
        for ux, up in iproduct(range(s), repeat=2):
            label = CombLabel(Fraction(ux, s), Fraction(up, s))
            cols.append(comb_state(spin, label, params))
            keys.append((spin, label))
    return np.stack(cols, axis=1), keys


def labels_from_z(z: Sequence) -> tuple[CombLabel, CombLabel, CombLabel]:
    """``z = (x0A, x0B, x0C, p0A, p0B, p0C)`` to per-party labels."""
    if len(z) != 6:
        raise ValueError(f"z needs six entries, got {len(z)}")
    return tuple(CombLabel(z[i], z[i + 3]) for i in range(3))


def psi_bz(b, labels: Sequence[CombLabel], params: LatticeParams) -> StateVector:
    """``(|b2>|b3>|b4> + (-1)^b1 |b2+1>|b3+1>|b4+1>) / sqrt 2`` with ``|0>=up, |1>=down``."""
    b = BVector.parse(b)
    if b.parity != 1:
        raise ValueError(
            f"b={tuple(b)} has even parity: the four GHZ operators multiply to -1, "
            "so their eigenvalue bits must sum to an odd number"
        )
    if len(labels) != 3:
        raise ValueError("need one label per party")
    first = [comb_state(bit % 2, lab, params) for bit, lab in zip(b[1:], labels)]
    second = [comb_state((bit + 1) % 2, lab, params) for bit, lab in zip(b[1:], labels)]
    t1 = product_state(first, params).amplitudes
    t2 = product_state(second, params).amplitudes
    return StateVector(params, (t1 + (-1) ** b.b1 * t2) / np.sqrt(2))


# -- constraint system ------------------------------------------------------

@dataclass(frozen=True)
class EigenSolution:
    b: BVector
    z: tuple[Fraction, ...]
    eta: tuple[Fraction, ...]

    @property
    def labels(self):
        return labels_from_z(self.z)

    def to_dict(self) -> dict:
        f = lambda q: f"{q.numerator}/{q.denominator}"  # noqa: E731
        return {"b": list(self.b), "z": [f(q) for q in self.z], "eta": [f(q) for q in self.eta]}


def constraint_lhs(b, z: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Left-hand sides of the four label constraints, each reduced into ``[0, 2)``."""
    xa, xb, xc, pa, pb, pc = (Fraction(v) for v in z)
    b1, b2, b3, b4 = b
    return (
        (xa + xb + xc + b1) % 2,
        (-xa + pb - pc + b2) % 2,
        (-pa - xb + pc + b3) % 2,
        (pa - pb - xc + b4) % 2,
    )


def solve_constraints(b, eta: Sequence, params: LatticeParams) -> list[EigenSolution]:
    """All grid labels ``z`` on which ``psi_bz(b, z)`` has modular eigenvalues ``eta``.

    Four labels are free; the first two equations fix ``x0C`` and ``p0C``
    (accepted only when they land in ``[0, 1)``), the last two are checked.
    """
    b = BVector.parse(b)
    eta = tuple(Fraction(e) for e in eta)
    if len(eta) != 4:
        raise ValueError("eta needs four entries")
    if any(not 0 <= e < 2 for e in eta):
        raise ValueError(f"eta entries must lie in [0, 2): {eta}")
    if b.parity != 1 or sum(eta) % 2 != 1:
        return []
    s = params.s
    units = [e * s for e in eta]
    if any(u.denominator != 1 for u in units):
        return []
    e1, e2, e3, e4 = (int(u) for u in units)
    b1, b2, b3, b4 = b
    two_s = 2 * s
    out = []
    for xa, xb, pa, pb in iproduct(range(s), repeat=4):
        xc = (e1 - s * b1 - xa - xb) % two_s
        if xc >= s:
            continue
        pc = (-e2 + s * b2 - xa + pb) % two_s
        if pc >= s:
            continue
        if (-pa - xb + pc + s * b3 - e3) % two_s:
            continue
        if (pa - pb - xc + s * b4 - e4) % two_s:
            continue
        z = tuple(Fraction(u, s) for u in (xa, xb, xc, pa, pb, pc))
        out.append(EigenSolution(b, z, eta))
    return out


def solution_for(b, z: Sequence) -> EigenSolution:
    """Package ``(b, z)`` with the eigenvalues it implies."""
    b = BVector.parse(b)
    z = tuple(Fraction(v) for v in z)
    return EigenSolution(b, z, constraint_lhs(b, z))


def eigenstate(
    weighted: Sequence[tuple[EigenSolution, complex]], params: LatticeParams
) -> StateVector:
    """Normalized superposition ``sum g_i |psi(xi_i)>`` over solutions sharing eta."""
    if not weighted:
        raise ValueError("need at least one solution")
    etas = {sol.eta for sol, _ in weighted}
    if len(etas) > 1:
        raise ValueError(f"solutions carry different eta values {sorted(etas)}")
    if all(w == 0 for _, w in weighted):
        raise ValueError("all weights are zero")
    amps = sum(w * psi_bz(sol.b, sol.labels, params).amplitudes for sol, w in weighted)
    state = StateVector(params, amps)
    if state.norm < 1e-12:
        raise ValueError("weights cancel to the zero vector")
    return state.normalized()


# -- operator realization -----------------------------------------------------

def _party_tables(params: LatticeParams):
    m = params.grid_units
    s = params.s
    return m, np.mod(m, s), digit_units(0, params)


def line_table(system: str, line: int, params: LatticeParams) -> np.ndarray:
    """Eigenvalue table of one GHZ line on its measured product basis, shape ``(d, d, d)``.

    Hermitian systems give real values (``modularGHZ``/``GHZmodbin`` in
    ``[0, 2)``, ``binary1GHZ`` in ``{0, 1}``); ``binaryGHZ`` gives ``+-1``.
    """
    s = params.s
    m, mod1, dig = _party_tables(params)
    signs = SIGNS[line]
    A, B, C = np.ix_(range(params.d), range(params.d), range(params.d))
    idx = (A, B, C)

    def total(per_party):
        return sum(per_party[j][idx[j]] for j in range(3))

    if system == "modularGHZ":
        units = total([signs[j] * m for j in range(3)])
        return np.mod(units, 2 * s) / s
    if system == "GHZmodbin":
        units = total([signs[j] * mod1 + s * dig for j in range(3)])
        return np.mod(units, 2 * s) / s
    digits = total([dig] * 3)
    if system == "binary1GHZ":
        return np.mod(digits, 2).astype(float)
    if system == "binaryGHZ":
        return np.where(digits % 2, -1.0, 1.0)
    raise ValueError(f"no table for system {system!r}")


def apply_line(system: str, line: int, state: StateVector) -> StateVector:
    params = state.params
    if system == "V-ops":
        word = tuple(ghz_family())[line]
        return apply_ordered(local_factors(word, params), state)
    axes = SETTINGS[line]
    F = dft(params).matrix
    t = state.tensor
    for j, ax in enumerate(axes):
        if ax == "p":
            t = apply_matrix(F, j, t)
    t = t * line_table(system, line, params)
    for j, ax in enumerate(axes):
        if ax == "p":
            t = apply_matrix(F.conj().T, j, t)
    return StateVector(params, t)


def _snap(value: float, s: int) -> Fraction:
    return Fraction(int(round(value * s)), s) % 2


def verify_eigensystem(
    state: StateVector, system: str, tol: float = EIGEN_TOL
) -> dict:
    """Eigenvalue estimates and residuals of the four operators of ``system``.

    For systems with phase-valued or modular eigenvalues the report carries
    ``eta`` (eigenphases in units of pi, or residues) snapped to the grid and
    checks that they sum to 1 mod 2; digit systems carry ``b`` likewise.
    """
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; choose from {SYSTEMS}")
    params = state.params
    s = params.s
    if abs(state.norm - 1) > 1e-12:
        raise ValueError(f"state norm {state.norm} != 1")
    evs, residuals = [], []
    for line in range(4):
        out = apply_line(system, line, state)
        ev = state.inner(out)
        evs.append(ev)
        residuals.append(float(np.linalg.norm(out.amplitudes - ev * state.amplitudes)))
    report = {
        "system": system,
        "s": s,
        "residuals": residuals,
        "max_residual": max(residuals),
    }
    if system in ("V-ops", "binaryGHZ"):
        report["eigenvalues"] = [[ev.real, ev.imag] for ev in evs]
        phases = [_snap(float(np.angle(ev)) / np.pi, s) for ev in evs]
    else:
        report["eigenvalues"] = [ev.real for ev in evs]
        phases = [_snap(ev.real, s) for ev in evs]
    key = "b" if system in ("binaryGHZ", "binary1GHZ") else "eta"
    if key == "b":
        values = [int(p) for p in phases]
        report["b"] = values
    else:
        report["eta"] = [f"{p.numerator}/{p.denominator}" for p in phases]
    total = sum(phases, Fraction(0)) % 2
    report["sum_mod2"] = f"{total.numerator}/{total.denominator}"
    report["pass"] = bool(report["max_residual"] <= tol and total == 1)
    return report


def measured_eta(report: dict) -> tuple[Fraction, ...]:
    return tuple(Fraction(e) for e in report["eta"])
