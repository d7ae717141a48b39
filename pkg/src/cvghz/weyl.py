"""Exact algebra of phase-space translation words on three parties.

A word is ``exp(i*pi*phase) * prod_j exp(i*pi*a_j*x_j) exp(i*pi*b_j*p_j)``
with every exponent and the phase kept as :class:`fractions.Fraction`.
Moving a momentum factor to the right of a position factor of the same
party picks up ``exp(i*pi*a*b)``, because

    exp(i pi a x) exp(i pi b p) = exp(i pi b p) exp(i pi a x) exp(-i pi a b).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

PARTIES = ("A", "B", "C")
Rational = Union[int, Fraction, str]

_TWO = Fraction(2)


def _q(value: Rational) -> Fraction:
    return value if type(value) is Fraction else Fraction(value)


def _party_index(party: str | int) -> int:
    if isinstance(party, int):
        if party not in (0, 1, 2):
            raise ValueError(f"party index out of range: {party}")
        return party
    try:
        return PARTIES.index(party)
    except ValueError:
        raise ValueError(f"unknown party {party!r}, expected one of {PARTIES}") from None


@dataclass(frozen=True)
class WeylWord:
    """Canonical word: per party ``(alpha, beta)``, global phase in units of pi.

    Within each party the x-factor stands left of the p-factor; ``phase`` is
    reduced into ``[0, 2)``.
    """

    exponents: tuple[tuple[Fraction, Fraction], ...] = (
        (Fraction(0), Fraction(0)),
    ) * 3
    phase: Fraction = Fraction(0)

    def __post_init__(self):
        if len(self.exponents) != 3:
            raise ValueError("a word has exactly three parties")
        exps = tuple((_q(a), _q(b)) for a, b in self.exponents)
        object.__setattr__(self, "exponents", exps)
        phase = _q(self.phase)
        if not 0 <= phase < 2:
            phase %= _TWO
        object.__setattr__(self, "phase", phase)

    @classmethod
    def identity(cls) -> "WeylWord":
        return cls()

    @classmethod
    def _trusted(cls, exponents, phase: Fraction) -> "WeylWord":
        # skips validation; callers pass Fraction tuples built from canonical words
        w = object.__new__(cls)
        object.__setattr__(w, "exponents", exponents)
        object.__setattr__(w, "phase", phase if 0 <= phase < 2 else phase % _TWO)
        return w

    def alpha(self, party: str | int) -> Fraction:
        return self.exponents[_party_index(party)][0]

    def beta(self, party: str | int) -> Fraction:
        return self.exponents[_party_index(party)][1]

    @property
    def is_scalar(self) -> bool:
        return all(a == 0 and b == 0 for a, b in self.exponents)

    @property
    def support(self) -> tuple[str, ...]:
        """Parties on which the word acts non-trivially."""
        return tuple(p for p, (a, b) in zip(PARTIES, self.exponents) if a or b)

    def restrict(self, party: str | int) -> "WeylWord":
        """The factor of this word on one party, carrying the full phase."""
        i = _party_index(party)
        exps = [(Fraction(0), Fraction(0))] * 3
        exps[i] = self.exponents[i]
        return WeylWord(tuple(exps), self.phase)

    def __mul__(self, other: "WeylWord") -> "WeylWord":
        return mul(self, other)

    def __str__(self) -> str:
        return to_text(self)


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def to_text(w: WeylWord) -> str:
    """Canonical text form ``phase*pi | A:(a,b) B:(a,b) C:(a,b)``."""
    parts = " ".join(
        f"{p}:({_fmt(a)},{_fmt(b)})" for p, (a, b) in zip(PARTIES, w.exponents)
    )
    return f"{_fmt(w.phase)}*pi | {parts}"


def from_text(text: str) -> WeylWord:
    """Inverse of :func:`to_text`."""
    try:
        head, body = text.split("|")
        phase = Fraction(head.strip().removesuffix("*pi").strip())
        exps = []
        for token, party in zip(body.split(), PARTIES):
            name, pair = token.split(":")
            if name != party:
                raise ValueError(f"expected party {party}, found {name}")
            a, b = pair.strip("()").split(",")
            exps.append((Fraction(a), Fraction(b)))
        if len(exps) != 3:
            raise ValueError("expected three parties")
    except ValueError as exc:
        raise ValueError(f"malformed word text {text!r}: {exc}") from exc
    return WeylWord(tuple(exps), phase)


def mul(w1: WeylWord, w2: WeylWord) -> WeylWord:
    # (X^a1 Y^b1)(X^a2 Y^b2) = X^(a1+a2) Y^(b1+b2) exp(i pi a2 b1), per party
    phase = w1.phase + w2.phase
    exps = []
    for e1, e2 in zip(w1.exponents, w2.exponents):
        (a1, b1), (a2, b2) = e1, e2
        if not (a2 or b2):
            exps.append(e1)
            continue
        if not (a1 or b1):
            exps.append(e2)
            continue
        if a2 and b1:
            phase += a2 * b1
        exps.append((a1 + a2, b1 + b2))
    return WeylWord._trusted(tuple(exps), phase)


def product(words: Iterable[WeylWord]) -> WeylWord:
    out = None
    for w in words:
        out = w if out is None else mul(out, w)
    return WeylWord.identity() if out is None else out


def make_word(factors: Sequence[tuple[str, str, Rational]]) -> WeylWord:
    """Multiply out an ordered list of ``(party, axis, exponent)`` generators.

    >>> print(make_word([("A", "p", 1), ("A", "x", 1)]))
    1/1*pi | A:(1/1,1/1) B:(0/1,0/1) C:(0/1,0/1)
    """
    out = WeylWord.identity()
    for party, axis, exponent in factors:
        i = _party_index(party)
        e = _q(exponent)
        exps = [(Fraction(0), Fraction(0))] * 3
        if axis == "x":
            exps[i] = (e, Fraction(0))
        elif axis == "p":
            exps[i] = (Fraction(0), e)
        else:
            raise ValueError(f"axis must be 'x' or 'p', got {axis!r}")
        out = mul(out, WeylWord(tuple(exps)))
    return out


def dagger(w: WeylWord) -> WeylWord:
    # (e^{i pi f} X^a Y^b)^dag = e^{-i pi f} Y^-b X^-a = e^{-i pi f} e^{i pi a b} X^-a Y^-b
    phase = -w.phase + sum((a * b for a, b in w.exponents), Fraction(0))
    return WeylWord._trusted(tuple((-a, -b) for a, b in w.exponents), phase)


def symplectic_form(w1: WeylWord, w2: WeylWord) -> Fraction:
    """``sum_j (a1_j b2_j - b1_j a2_j)``; ``w1 w2 = exp(-i pi form) w2 w1``."""
    return sum(
        (a1 * b2 - b1 * a2 for (a1, b1), (a2, b2) in zip(w1.exponents, w2.exponents)),
        Fraction(0),
    )


def relation(w1: WeylWord, w2: WeylWord) -> str:
    """Classify the pair as ``"commute"``, ``"anticommute"`` or ``"non-scalar"``.

    ``"non-scalar"`` flags a non-integer symplectic form: the words then
    neither commute nor anticommute.
    """
    form = symplectic_form(w1, w2)
    if form.denominator != 1:
        return "non-scalar"
    return "commute" if form.numerator % 2 == 0 else "anticommute"


def commutes(w1: WeylWord, w2: WeylWord) -> bool:
    return relation(w1, w2) == "commute"


def _generator(party: str, axis: int) -> WeylWord:
    zero, one = Fraction(0), Fraction(1)
    exps = [(zero, zero)] * 3
    exps[_party_index(party)] = (one, zero) if axis == 0 else (zero, one)
    return WeylWord(tuple(exps))


@cache
def x_gen(party: str) -> WeylWord:
    return _generator(party, 0)


@cache
def y_gen(party: str) -> WeylWord:
    return _generator(party, 1)


@dataclass(frozen=True)
class GhzFamily:
    v1: WeylWord
    v2: WeylWord
    v3: WeylWord
    v4: WeylWord

    def __iter__(self):
        return iter((self.v1, self.v2, self.v3, self.v4))

    def pairwise_relations(self) -> dict[tuple[int, int], str]:
        words = tuple(self)
        return {
            (i + 1, j + 1): relation(words[i], words[j])
            for i, j in combinations(range(4), 2)
        }

    def ordered_product(self) -> WeylWord:
        return product(self)


def ghz_family() -> GhzFamily:
    """The four GHZ words built from ``X_j = exp(i pi x_j)``, ``Y_j = exp(i pi p_j)``."""
    X = {p: x_gen(p) for p in PARTIES}
    Y = {p: y_gen(p) for p in PARTIES}
    d = dagger
    return GhzFamily(
        v1=product([X["A"], X["B"], X["C"]]),
        v2=product([d(X["A"]), Y["B"], d(Y["C"])]),
        v3=product([d(Y["A"]), d(X["B"]), Y["C"]]),
        v4=product([Y["A"], d(Y["B"]), d(X["C"])]),
    )


MINUS_IDENTITY = WeylWord(phase=Fraction(1))


def ghz_certificate(family: GhzFamily | None = None) -> dict:
    """Exact check that the family commutes pairwise and multiplies to -1."""
    family = family or ghz_family()
    rel = family.pairwise_relations()
    prod = family.ordered_product()
    return {
        "pairwise": {f"V{i}V{j}": r for (i, j), r in rel.items()},
        "pairwise_commute": all(r == "commute" for r in rel.values()),
        "product": to_text(prod),
        "product_is_minus_identity": prod == MINUS_IDENTITY,
        "words": {f"V{i + 1}": to_text(w) for i, w in enumerate(family)},
    }
