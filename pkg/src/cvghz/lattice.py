"""Periodic lattice regularization of one particle's position and momentum.

The dimensionless position takes ``d = 2 s**2`` values ``(k - d/2)/s`` in
``[-s, s)``; momentum takes the same values.  Spacing product ``1/s**2 = 2/d``
makes ``exp(i pi x)`` and ``exp(i pi p)`` exact lattice translations.

Three-party states are stored flat, A-major (``index = (a*d + b)*d + c``), and
local operators are applied by contracting one axis of the ``(d, d, d)`` view.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .weyl import PARTIES, WeylWord, _party_index

UNITARY_TOL = 1e-12
NORM_TOL = 1e-12
DEFAULT_MAX_DIM = 32768  # d**3 at s = 4


def max_dim_from_env() -> int:
    raw = os.environ.get("GHZ_MAX_DIM")
    return int(raw) if raw else DEFAULT_MAX_DIM


@dataclass(frozen=True)
class LatticeParams:
    s: int
    L: float = 1.0

    def __post_init__(self):
        if not isinstance(self.s, (int, np.integer)) or self.s < 1:
            raise ValueError(f"s must be a positive integer, got {self.s!r}")
        if self.s & (self.s - 1):
            raise ValueError(f"s must be a power of two, got {self.s}")

    @property
    def d(self) -> int:
        return 2 * self.s * self.s

    @property
    def log2_s(self) -> int:
        return self.s.bit_length() - 1

    @cached_property
    def grid_units(self) -> np.ndarray:
        """Grid values times ``s``: the integers ``k - d/2``."""
        return np.arange(self.d, dtype=np.int64) - self.d // 2

    @cached_property
    def x_grid(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(m), self.s) for m in self.grid_units)

    @property
    def p_grid(self) -> tuple[Fraction, ...]:
        return self.x_grid

    @cached_property
    def grid(self) -> np.ndarray:
        return self.grid_units / self.s

    def index_of(self, value: Fraction | int | str) -> int:
        """Lattice index of a grid value, wrapped onto the torus ``[-s, s)``."""
        q = Fraction(value)
        m = q * self.s
        if m.denominator != 1:
            raise ValueError(f"{q} is not on the 1/{self.s} grid")
        return int((m.numerator + self.d // 2) % self.d)


def make_lattice(s: int, max_dim: int | None = None, L: float = 1.0) -> LatticeParams:
    params = LatticeParams(s, L)
    bound = max_dim_from_env() if max_dim is None else max_dim
    if params.d**3 > bound:
        raise ValueError(
            f"s={s} gives d**3={params.d**3} amplitudes, above the bound {bound}"
        )
    return params


@dataclass(frozen=True, eq=False)
class LocalOperator:
    matrix: np.ndarray
    tag: str = "generic"  # "diagonal-in-x" | "diagonal-in-p" | "generic"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "LocalOperator") -> "LocalOperator":
        tag = self.tag if self.tag == other.tag else "generic"
        return LocalOperator(self.matrix @ other.matrix, tag)

    @property
    def H(self) -> "LocalOperator":
        return LocalOperator(self.matrix.conj().T, self.tag)

    def unitarity_error(self) -> float:
        eye = np.eye(self.dim)
        return float(np.linalg.norm(self.matrix @ self.matrix.conj().T - eye, 2))


def identity(params: LatticeParams) -> LocalOperator:
    return LocalOperator(np.eye(params.d, dtype=complex), "diagonal-in-x")


def diagonal(values: np.ndarray, basis: str, params: LatticeParams) -> LocalOperator:
    """Operator with the given eigenvalues on the x- or p-basis grid."""
    values = np.asarray(values)
    if basis == "x":
        return LocalOperator(np.diag(values).astype(complex), "diagonal-in-x")
    if basis == "p":
        F = dft(params).matrix
        return LocalOperator(F.conj().T @ (values[:, None] * F), "diagonal-in-p")
    raise ValueError(f"basis must be 'x' or 'p', got {basis!r}")


_DFT_CACHE: dict[int, np.ndarray] = {}


def dft(params: LatticeParams) -> LocalOperator:
    """Position-to-momentum amplitudes, ``F[l, k] = exp(-i pi p_l x_k) / sqrt(d)``."""
    F = _DFT_CACHE.get(params.s)
    if F is None:
        # phase exponent p_l x_k = m_l m_k / s**2; reduce the integer product
        # mod 2 s**2 before going to floats so large grids stay exact
        m = params.grid_units
        ph = np.mod(np.outer(m, m), 2 * params.d)
        F = np.exp(-1j * np.pi * ph / (params.s * params.s)) / np.sqrt(params.d)
        F.setflags(write=False)
        _DFT_CACHE[params.s] = F
    return LocalOperator(F, "generic")


def _integer(q: Fraction, what: str) -> int:
    if q.denominator != 1:
        raise ValueError(f"{what} exponent {q} is not an integer; not single-valued on the torus")
    return q.numerator


def weyl_matrix(
    w: WeylWord, params: LatticeParams, party: str | int | None = None
) -> LocalOperator:
    """Matrix of a single-party word, ``e^{i pi phase} exp(i pi a x) exp(i pi b p)``."""
    support = w.support
    if party is None:
        if len(support) > 1:
            raise ValueError(f"word acts on several parties {support}; pass party=")
        party = support[0] if support else "A"
    i = _party_index(party)
    if any(p != PARTIES[i] for p in support):
        raise ValueError(f"word acts outside party {PARTIES[i]}: {support}")
    a = _integer(w.exponents[i][0], "x")
    b = _integer(w.exponents[i][1], "p")
    m = params.grid_units
    # exp(i pi a m / s) with the integer a*m reduced mod 2s
    xdiag = np.exp(1j * np.pi * np.mod(a * m, 2 * params.s) / params.s)
    pdiag = np.exp(1j * np.pi * np.mod(b * m, 2 * params.s) / params.s)
    F = dft(params).matrix
    ymat = F.conj().T @ (pdiag[:, None] * F)
    mat = np.exp(1j * np.pi * float(w.phase)) * (xdiag[:, None] * ymat)
    if b == 0:
        tag = "diagonal-in-x"
    elif a == 0:
        tag = "diagonal-in-p"
    else:
        tag = "generic"
    return LocalOperator(mat, tag)


def local_factors(w: WeylWord, params: LatticeParams) -> list[tuple[LocalOperator, str]]:
    """Split a three-party word into ``(operator, party)`` factors.

    The global phase rides on party A's factor.
    """
    out = []
    for i, party in enumerate(PARTIES):
        sub = w.restrict(party)
        if i > 0:
            sub = WeylWord(sub.exponents, 0)
        out.append((weyl_matrix(sub, params, party), party))
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    params: LatticeParams
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.params.d**3:
            raise ValueError(
                f"expected {self.params.d ** 3} amplitudes for s={self.params.s}, got {amps.size}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def tensor(self) -> np.ndarray:
        d = self.params.d
        return self.amplitudes.reshape(d, d, d)

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.params, self.amplitudes / n)

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.params, self.amplitudes + other.amplitudes)

    def __rmul__(self, c: complex) -> "StateVector":
        return StateVector(self.params, c * self.amplitudes)


def product_state(locals_: Sequence[np.ndarray], params: LatticeParams) -> StateVector:
    a, b, c = (np.asarray(v, dtype=complex) for v in locals_)
    return StateVector(params, np.einsum("i,j,k->ijk", a, b, c))


def basis_state(values: Sequence, params: LatticeParams) -> StateVector:
    """Product of position eigenstates at the given grid values."""
    vecs = []
    for v in values:
        e = np.zeros(params.d, dtype=complex)
        e[params.index_of(v)] = 1.0
        vecs.append(e)
    return product_state(vecs, params)


def apply_matrix(mat: np.ndarray, axis: int, tensor: np.ndarray) -> np.ndarray:
    out = np.tensordot(mat, tensor, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def apply_local(op: LocalOperator, party: str | int, state: StateVector) -> StateVector:
    if op.dim != state.params.d:
        raise ValueError(f"operator dimension {op.dim} != lattice dimension {state.params.d}")
    axis = _party_index(party)
    return StateVector(state.params, apply_matrix(op.matrix, axis, state.tensor))


def apply_ordered(ops: Sequence[tuple[LocalOperator, str | int]], state: StateVector) -> StateVector:
    """Apply ``O_1 O_2 ... O_n`` to ``state`` (rightmost first)."""
    for op, party in reversed(list(ops)):
        state = apply_local(op, party, state)
    return state


def _checked(state: StateVector) -> StateVector:
    n = state.norm
    if abs(n - 1.0) > NORM_TOL:
        warnings.warn(f"state norm {n!r} != 1; normalizing", RuntimeWarning, stacklevel=3)
        return state.normalized()
    return state


def expectation(ops: Sequence[tuple[LocalOperator, str | int]], state: StateVector) -> complex:
    state = _checked(state)
    return state.inner(apply_ordered(ops, state))


# -- serialization ---------------------------------------------------------

def state_to_dict(state: StateVector) -> dict:
    amps = state.amplitudes
    return {
        "s": state.params.s,
        "parties": 3,
        "basis": "position",
        "ordering": "A-major",
        "amplitudes": [[float(z.real), float(z.imag)] for z in amps],
    }


def state_from_dict(data: dict) -> StateVector:
    if data.get("parties", 3) != 3 or data.get("basis", "position") != "position":
        raise ValueError("only three-party position-basis states are supported")
    if data.get("ordering", "A-major") != "A-major":
        raise ValueError(f"unsupported ordering {data['ordering']!r}")
    params = make_lattice(int(data["s"]))
    pairs = np.asarray(data["amplitudes"], dtype=float)
    return StateVector(params, pairs[:, 0] + 1j * pairs[:, 1])


def dump_state(state: StateVector) -> str:
    return json.dumps(state_to_dict(state))


def load_state(text: str) -> StateVector:
    return state_from_dict(json.loads(text))
