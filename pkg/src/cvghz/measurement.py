"""Born-rule sampling of local x/p measurements and the parity statistics built on them.

Sampling draws from ``numpy.random.Generator(Philox(seed))``, a counter-based
64-bit generator: identical ``(state, config)`` pairs give identical shot streams.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .lattice import NORM_TOL, StateVector, apply_matrix, dft
from .modular import digit_units
from .states import SETTINGS, SIGNS, BVector

SETTING_NAMES = tuple("".join(s) for s in SETTINGS)  # xxx, xpp, pxp, ppx
CSV_HEADER = (
    "shot", "setting", "rawA", "rawB", "rawC",
    "digitA", "digitB", "digitC", "parity", "eta_hat",
)


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def setting_index(setting: str | Sequence[str]) -> int:
    name = setting if isinstance(setting, str) else "".join(setting)
    try:
        return SETTING_NAMES.index(name)
    except ValueError:
        raise ValueError(f"unknown setting {name!r}; choose from {SETTING_NAMES}") from None


@dataclass(frozen=True)
class ShotRecord:
    setting: str
    raw: tuple[Fraction, Fraction, Fraction]

    @property
    def residue(self) -> tuple[Fraction, ...]:
        return tuple(v % 2 for v in self.raw)

    @property
    def mod1(self) -> tuple[Fraction, ...]:
        return tuple(v % 1 for v in self.raw)

    @property
    def digits(self) -> tuple[int, ...]:
        return tuple(int(r >= 1) for r in self.residue)

    @property
    def parity(self) -> int:
        return sum(self.digits) % 2

    @property
    def eta_hat(self) -> Fraction:
        signs = SIGNS[setting_index(self.setting)]
        return sum((sg * r for sg, r in zip(signs, self.residue)), Fraction(0)) % 2

    def row(self, shot: int) -> list:
        return [
            shot, self.setting, *(_frac(v) for v in self.raw),
            *self.digits, self.parity, _frac(self.eta_hat),
        ]


@dataclass(frozen=True)
class RunConfig:
    shots: int = 10_000
    seed: int = 42
    policy: str = "cycle-all-four"  # "fixed" | "cycle-all-four" | "random"
    settings: tuple[str, ...] = field(default=SETTING_NAMES)

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.policy not in ("fixed", "cycle-all-four", "random"):
            raise ValueError(f"unknown setting policy {self.policy!r}")
        for name in self.settings:
            setting_index(name)
        if self.policy == "fixed" and len(self.settings) != 1:
            raise ValueError("policy 'fixed' takes exactly one setting")


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def rotate(state: StateVector, setting: str) -> np.ndarray:
    """Amplitudes in the measured product basis (DFT on every p party)."""
    F = dft(state.params).matrix
    t = state.tensor
    for j, ax in enumerate(setting):
        if ax == "p":
            t = apply_matrix(F, j, t)
    return t


def born_distribution(state: StateVector, setting: str) -> np.ndarray:
    p = np.abs(rotate(state, setting).reshape(-1)) ** 2
    return p / p.sum()


def _require_normalized(state: StateVector) -> None:
    if abs(state.norm - 1) > NORM_TOL:
        raise ValueError(f"state norm {state.norm!r} != 1")


def sample(state: StateVector, config: RunConfig) -> list[ShotRecord]:
    """Inverse-CDF Born sampling, one joint outcome per shot."""
    _require_normalized(state)
    params = state.params
    d = params.d
    gen = rng(config.seed)
    n = config.shots
    if config.policy == "fixed":
        choice = np.zeros(n, dtype=int)
    elif config.policy == "cycle-all-four":
        choice = np.arange(n) % len(config.settings)
    else:
        choice = gen.integers(0, len(config.settings), size=n)
    u = gen.random(n)
    grid = params.x_grid
    records: list[ShotRecord] = [None] * n  # type: ignore[list-item]
    for ci, name in enumerate(config.settings):
        mask = np.flatnonzero(choice == ci)
        if not mask.size:
            continue
        cdf = np.cumsum(born_distribution(state, name))
        idx = np.searchsorted(cdf, u[mask] * cdf[-1], side="right")
        idx = np.minimum(idx, cdf.size - 1)
        a, rest = np.divmod(idx, d * d)
        b, c = np.divmod(rest, d)
        for shot, ia, ib, ic in zip(mask, a, b, c):
            records[shot] = ShotRecord(name, (grid[ia], grid[ib], grid[ic]))
    return records


def records_to_csv(records: Iterable[ShotRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for i, r in enumerate(records):
        w.writerow(r.row(i))
    return buf.getvalue()


def records_from_csv(text: str) -> list[ShotRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        ShotRecord(row["setting"], tuple(Fraction(row[k]) for k in ("rawA", "rawB", "rawC")))
        for row in rows
    ]


def setting_statistics(records: Sequence[ShotRecord], target=None) -> dict:
    """Parity and eta-hat histograms for single-setting records.

    ``target`` is a :class:`BVector` (compared on digit parity) or any other
    sequence of four rationals (compared on eta-hat); the entry for the
    records' setting is used.
    """
    if not records:
        raise ValueError("no records")
    names = {r.setting for r in records}
    if len(names) != 1:
        raise ValueError(f"records mix settings {sorted(names)}")
    (name,) = names
    i = setting_index(name)
    n = len(records)
    parity = Counter(r.parity for r in records)
    eta = Counter(r.eta_hat for r in records)
    report = {
        "setting": name,
        "shots": n,
        "parity": {str(k): parity.get(k, 0) / n for k in (0, 1)},
        "eta_hat": {_frac(k): v / n for k, v in sorted(eta.items())},
        "eta_hat_in_range": all(0 <= k < 2 for k in eta),
    }
    if target is not None:
        if isinstance(target, BVector):
            want = target[i]
            hits = parity.get(want, 0)
            report["target"] = {"kind": "b", "value": want}
        else:
            want = Fraction(target[i])
            hits = eta.get(want, 0)
            report["target"] = {"kind": "eta", "value": _frac(want)}
        report["exact_match_fraction"] = hits / n
        report["mismatches"] = n - hits
    return report


def correlators(state: StateVector) -> list[float]:
    """Exact ``<exp(i pi sum of unit digits)>`` for the four settings."""
    _require_normalized(state)
    sign = 1.0 - 2.0 * digit_units(0, state.params)
    table = sign[:, None, None] * sign[None, :, None] * sign[None, None, :]
    out = []
    for name in SETTING_NAMES:
        p = np.abs(rotate(state, name)) ** 2
        out.append(float(np.sum(p * table)))
    return out


def mermin_signs(b=(1, 0, 0, 0)) -> tuple[int, ...]:
    """``-(-1)**b_i``: (+, -, -, -) for ``b = (1, 0, 0, 0)``."""
    return tuple(-((-1) ** bit) for bit in BVector.parse(b))


def mermin_statistic(state: StateVector, b=(1, 0, 0, 0)) -> float:
    """``sum_i sign_i E_i``: at most 2 in modulus for local assignments, 4 on GHZ eigenstates."""
    return float(sum(sg * e for sg, e in zip(mermin_signs(b), correlators(state))))


def sampled_correlators(records: Sequence[ShotRecord]) -> dict[str, dict]:
    """Empirical ``E_i`` with binomial standard errors, keyed by setting."""
    by: dict[str, list[int]] = {}
    for r in records:
        by.setdefault(r.setting, []).append(1 - 2 * r.parity)
    out = {}
    for name, vals in by.items():
        n = len(vals)
        mean = sum(vals) / n
        var = max(1.0 - mean * mean, 0.0)
        out[name] = {"n": n, "mean": mean, "stderr": math.sqrt(var / n)}
    return out


def sampled_mermin(records: Sequence[ShotRecord], b=(1, 0, 0, 0)) -> dict:
    est = sampled_correlators(records)
    signs = mermin_signs(b)
    value = 0.0
    var = 0.0
    for sg, name in zip(signs, SETTING_NAMES):
        if name not in est:
            raise ValueError(f"no shots for setting {name}")
        value += sg * est[name]["mean"]
        var += est[name]["stderr"] ** 2
    return {"value": value, "stderr": math.sqrt(var)}
