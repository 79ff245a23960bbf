"""Exact phased Weyl (generalized Pauli) operator algebra on n qudits.

A label a = (x | z) in (Z_d)^(2n) stands for the phase-free operator

    eta(a) = tau^(x.z) X^x1 Z^z1 (x) ... (x) X^xn Z^zn,

where X and Z are the shift and clock matrices, omega = exp(2*pi*i/d), and
tau is a fixed square root of omega chosen so that eta(a)^d = I:
tau = exp(i*pi/d) for even d (for d = 2 this is the Hermitian convention
i^(x.z) X^x Z^z) and tau = omega^((d+1)/2) for odd d.

Phases of arbitrary operator products are tracked exactly as exponents of
mu = exp(2*pi*i/D), where D = d for odd d and D = 2d for even d.  No
floating point enters any group-theoretic computation; dense matrices are
produced only on request, as an independent cross-check.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ClosureTooLarge, InvalidInput, NonCommuting


def phase_order(d: int) -> int:
    """Order D of the lifted phase ring Z_D: d for odd d, 2d for even d."""
    return d if d % 2 else 2 * d


def _lift(d: int) -> int:
    return phase_order(d) // d


@dataclass(frozen=True)
class PauliLabel:
    """Phase-free Weyl operator index: X-part and Z-part exponent vectors."""

    x: tuple[int, ...]
    z: tuple[int, ...]
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise InvalidInput(f"qudit dimension must be >= 2, got {self.d}")
        if len(self.x) != len(self.z):
            raise InvalidInput("X-part and Z-part must have equal length")
        object.__setattr__(self, "x", tuple(int(v) % self.d for v in self.x))
        object.__setattr__(self, "z", tuple(int(v) % self.d for v in self.z))

    @classmethod
    def zero(cls, n: int, d: int) -> "PauliLabel":
        return cls((0,) * n, (0,) * n, d)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def is_zero(self) -> bool:
        return not any(self.x) and not any(self.z)

    def sort_key(self) -> tuple:
        return (self.x, self.z)

    def __add__(self, other: "PauliLabel") -> "PauliLabel":
        _check_compatible(self, other)
        return PauliLabel(
            tuple(a + b for a, b in zip(self.x, other.x)),
            tuple(a + b for a, b in zip(self.z, other.z)),
            self.d,
        )

    def __repr__(self):
        return f"PauliLabel({format_label(self)!r}, d={self.d})"


def _check_compatible(a: PauliLabel, b: PauliLabel):
    if a.d != b.d or a.n != b.n:
        raise InvalidInput(
            f"incompatible labels: (n={a.n}, d={a.d}) vs (n={b.n}, d={b.d})"
        )


def symplectic_form(a: PauliLabel, b: PauliLabel) -> int:
    """<a,b> = sum_i (a.x_i b.z_i - a.z_i b.x_i) mod d; zero iff [T_a,T_b]=0."""
    _check_compatible(a, b)
    s = sum(ax * bz - az * bx for ax, az, bx, bz in zip(a.x, a.z, b.x, b.z))
    return s % a.d


def commutes(a: PauliLabel, b: PauliLabel) -> bool:
    return symplectic_form(a, b) == 0


class PhaseConvention:
    """Choice of representative operator eta(a) for each label.

    The base convention is fixed (see module docstring); `gamma` re-phases it
    to eta_gamma(a) = omega^gamma(a) * eta(a).  Instances are immutable.
    """

    def __init__(self, d: int, gamma: Mapping[PauliLabel, int] | None = None):
        self.d = d
        items = {}
        for label, value in (gamma or {}).items():
            if label.d != d:
                raise InvalidInput("gamma keyed by labels of a different dimension")
            value = int(value) % d
            if label.is_zero and value != 0:
                raise InvalidInput("gamma(0) must be 0 (identity keeps phase 1)")
            if value:
                items[label] = value
        self._gamma = items

    def gamma_of(self, label: PauliLabel) -> int:
        return self._gamma.get(label, 0)

    def gamma_items(self) -> dict[PauliLabel, int]:
        return dict(self._gamma)

    def __eq__(self, other):
        return (
            isinstance(other, PhaseConvention)
            and self.d == other.d
            and self._gamma == other._gamma
        )

    def __repr__(self):
        return f"PhaseConvention(d={self.d}, |gamma|={len(self._gamma)})"


def rephase(conv: PhaseConvention, gamma: Mapping[PauliLabel, int]) -> PhaseConvention:
    """Convention with eta'(a) = omega^gamma(a) eta_conv(a); gamma(0) must be 0."""
    merged = conv.gamma_items()
    for label, value in gamma.items():
        merged[label] = (merged.get(label, 0) + value) % conv.d
    return PhaseConvention(conv.d, merged)


def base_phase_exponent(a: PauliLabel) -> int:
    """Exponent e(a) in Z_D with eta_base(a) = mu^e(a) * X^x Z^z."""
    dot = sum(xi * zi for xi, zi in zip(a.x, a.z))
    if a.d % 2:
        return (((a.d + 1) // 2) * dot) % a.d
    return dot % (2 * a.d)


def eta_exponent(a: PauliLabel, conv: PhaseConvention | None = None) -> int:
    e = base_phase_exponent(a)
    if conv is not None:
        e = (e + _lift(a.d) * conv.gamma_of(a)) % phase_order(a.d)
    return e


def product_exponent(a: PauliLabel, b: PauliLabel, conv: PhaseConvention | None = None) -> int:
    """Exponent c in Z_D with eta(a) eta(b) = mu^c eta(a+b)."""
    _check_compatible(a, b)
    d = a.d
    big = phase_order(d)
    cross = sum(za * xb for za, xb in zip(a.z, b.x))
    c = (
        eta_exponent(a, conv)
        + eta_exponent(b, conv)
        + _lift(d) * cross
        - eta_exponent(a + b, conv)
    )
    return c % big


def beta(a: PauliLabel, b: PauliLabel, convention: PhaseConvention | None = None) -> int:
    """Exponent k in Z_d with T_(a+b) = omega^k T_a T_b, for commuting a, b."""
    if symplectic_form(a, b) != 0:
        raise NonCommuting(f"beta undefined: {format_label(a)} and {format_label(b)} do not commute")
    c = product_exponent(a, b, convention)
    lift = _lift(a.d)
    # On commuting pairs the relative phase always lands in the omega subgroup.
    assert c % lift == 0, "phase of a commuting product escaped Z_d"
    return (-(c // lift)) % a.d


@dataclass(frozen=True)
class PauliOperator:
    """mu^phase * eta(label), with phase an exponent in Z_D."""

    label: PauliLabel
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", int(self.phase) % phase_order(self.label.d))

    @classmethod
    def identity(cls, n: int, d: int) -> "PauliOperator":
        return cls(PauliLabel.zero(n, d), 0)

    @property
    def d(self) -> int:
        return self.label.d

    @property
    def n(self) -> int:
        return self.label.n

    def with_omega_phase(self, k: int) -> "PauliOperator":
        """omega^k times this operator."""
        return PauliOperator(self.label, self.phase + _lift(self.d) * k)

    def __repr__(self):
        return f"PauliOperator({format_label(self.label)!r}, phase={self.phase}/{phase_order(self.d)})"


def multiply(p: PauliOperator, q: PauliOperator, convention: PhaseConvention | None = None) -> PauliOperator:
    """Exact operator product; label adds componentwise, phase lives in Z_D."""
    c = product_exponent(p.label, q.label, convention)
    return PauliOperator(p.label + q.label, p.phase + q.phase + c)


def power(p: PauliOperator, k: int, convention: PhaseConvention | None = None) -> PauliOperator:
    if k < 0:
        raise InvalidInput("negative powers not supported; use order-d identities")
    out = PauliOperator.identity(p.n, p.d)
    for _ in range(k):
        out = multiply(out, p, convention)
    return out


def closure(seed: Iterable[PauliOperator | PauliLabel], cap: int = 4096) -> tuple[PauliLabel, ...]:
    """Smallest label set containing 0 and the seed, closed under commuting sums.

    Output is sorted lexicographically on (x, z); the zero label sorts first.
    """
    labels = []
    for item in seed:
        labels.append(item.label if isinstance(item, PauliOperator) else item)
    if not labels:
        raise InvalidInput("closure needs a nonempty seed")
    n, d = labels[0].n, labels[0].d
    for lab in labels:
        if lab.n != n or lab.d != d:
            raise InvalidInput("seed mixes qudit counts or dimensions")
    found = {PauliLabel.zero(n, d)}
    found.update(labels)
    work = sorted(found, key=PauliLabel.sort_key)
    while work:
        fresh = []
        members = sorted(found, key=PauliLabel.sort_key)
        for a in work:
            for b in members:
                if symplectic_form(a, b) == 0:
                    c = a + b
                    if c not in found:
                        found.add(c)
                        fresh.append(c)
                        if len(found) > cap:
                            raise ClosureTooLarge(
                                f"closure exceeded cap of {cap} labels"
                            )
        work = fresh
    return tuple(sorted(found, key=PauliLabel.sort_key))


# ---------------------------------------------------------------------------
# Dense matrix realization (independent cross-check and small simulations).

def _shift_clock(d: int) -> tuple[np.ndarray, np.ndarray]:
    omega = np.exp(2j * np.pi / d)
    shift = np.zeros((d, d), dtype=complex)
    for j in range(d):
        shift[(j + 1) % d, j] = 1.0
    clock = np.diag(omega ** np.arange(d))
    return shift, clock


def operator_matrix(op: PauliOperator, convention: PhaseConvention | None = None) -> np.ndarray:
    """Dense matrix of mu^phase eta(label); exponential in n, for tests only."""
    a = op.label
    d = a.d
    shift, clock = _shift_clock(d)
    mat = np.array([[1.0 + 0j]])
    for xi, zi in zip(a.x, a.z):
        mat = np.kron(mat, np.linalg.matrix_power(shift, xi) @ np.linalg.matrix_power(clock, zi))
    mu = np.exp(2j * np.pi / phase_order(d))
    return mu ** ((op.phase + eta_exponent(a, convention)) % phase_order(d)) * mat


# ---------------------------------------------------------------------------
# Pauli string grammar (shared by the CLI and the scenario loader).
#
#   string  := [phase] token+            tokens separated by whitespace
#   phase   := "w^" int                  global factor omega^k
#   token   := "I" | "X" | "Z" | "Y" | "X^a" | "Z^b" | "X^aZ^b" | "XZ^b" ...
#
# For d = 2 a single unspaced word of letters I, X, Y, Z is also accepted
# ("XXI"), one letter per qubit.

_TOKEN_RE = re.compile(r"^(?:I|(?:X(?:\^(\d+))?)?(?:Z(?:\^(\d+))?)?)$")


def _parse_token(token: str, d: int) -> tuple[int, int]:
    if token == "Y":
        if d != 2:
            raise InvalidInput("token 'Y' is only defined for d = 2")
        return 1, 1
    m = _TOKEN_RE.match(token)
    if not m or token == "":
        raise InvalidInput(f"bad Pauli token {token!r}")
    if token == "I":
        return 0, 0
    x = 0 if "X" not in token else int(m.group(1) or 1)
    z = 0 if "Z" not in token else int(m.group(2) or 1)
    return x % d, z % d


def parse_operator(text: str, d: int, n: int | None = None) -> PauliOperator:
    """Parse a Pauli string, e.g. 'XXI', 'w^1 X Z^2 I', into an operator."""
    parts = text.split()
    if not parts:
        raise InvalidInput("empty Pauli string")
    omega_power = 0
    if parts[0].startswith("w^"):
        try:
            omega_power = int(parts[0][2:])
        except ValueError as exc:
            raise InvalidInput(f"bad phase token {parts[0]!r}") from exc
        parts = parts[1:]
        if not parts:
            raise InvalidInput("phase token without operator body")
    if len(parts) == 1 and d == 2 and re.fullmatch(r"[IXYZ]+", parts[0]):
        tokens = list(parts[0])
    else:
        tokens = parts
    xs, zs = [], []
    for token in tokens:
        x, z = _parse_token(token, d)
        xs.append(x)
        zs.append(z)
    if n is not None and len(xs) != n:
        raise InvalidInput(f"expected {n} qudit tokens, got {len(xs)}")
    label = PauliLabel(tuple(xs), tuple(zs), d)
    return PauliOperator(label, _lift(d) * omega_power)


def parse_label(text: str, d: int, n: int | None = None) -> PauliLabel:
    op = parse_operator(text, d, n)
    if op.phase:
        raise InvalidInput("labels carry no phase; drop the w^k prefix")
    return op.label


def format_label(a: PauliLabel) -> str:
    if a.d == 2:
        letters = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        return "".join(letters[(xi, zi)] for xi, zi in zip(a.x, a.z))
    tokens = []
    for xi, zi in zip(a.x, a.z):
        if xi == 0 and zi == 0:
            tokens.append("I")
            continue
        part = ""
        if xi:
            part += "X" if xi == 1 else f"X^{xi}"
        if zi:
            part += "Z" if zi == 1 else f"Z^{zi}"
        tokens.append(part)
    return " ".join(tokens)
