"""Chain complex attached to a closed set of commuting-product labels.

The complex has a single vertex, one edge per label, one face per ordered
commuting pair (a, b) (bounded by a, b and a+b) and one volume per ordered
pairwise-commuting triple.  Coefficients live in Z_d.  The two-cochain
`beta` stores, per face, the exponent k with T_(a+b) = omega^k T_a T_b.

Everything here is immutable after construction and safe to share across
threads; all maps are pure functions of their inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import pauli
from .errors import ClosureViolation, DegreeError, InvalidInput, NotClosed
from .pauli import PauliLabel, PhaseConvention, format_label, parse_label


class ObservableComplex:
    """Cells, boundary data and beta values for a closed label set."""

    def __init__(self, labels, convention, faces, face_sum, beta_values, volumes,
                 commute, add_index):
        self.labels: tuple[PauliLabel, ...] = labels
        self.convention: PhaseConvention = convention
        self.d: int = convention.d
        self.n: int = labels[0].n
        self.label_index: dict[PauliLabel, int] = {a: i for i, a in enumerate(labels)}
        self.faces: list[tuple[int, int]] = faces          # ordered pairs (i, j)
        self.face_sum: np.ndarray = face_sum               # index of a+b per face
        self.beta: np.ndarray = beta_values                # Z_d entry per face
        self.volumes: list[tuple[int, int, int]] = volumes
        self.commute: np.ndarray = commute                 # |E| x |E| bool
        self.add_index: np.ndarray = add_index             # |E| x |E| int, -1 if noncommuting
        self.face_index: dict[tuple[int, int], int] = {f: k for k, f in enumerate(faces)}
        self._vol_faces = None
        self._vol_signs = None

    # -- basic counts -------------------------------------------------------
    @property
    def edge_count(self) -> int:
        return len(self.labels)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def volume_count(self) -> int:
        return len(self.volumes)

    def face_edges(self, k: int) -> tuple[int, int, int]:
        i, j = self.faces[k]
        return i, j, int(self.face_sum[k])

    def beta_of_face(self, i: int, j: int) -> int:
        return int(self.beta[self.face_index[(i, j)]])

    def volume_faces(self) -> tuple[np.ndarray, np.ndarray]:
        """Per volume [a|b|c]: face indices of [b|c], [a+b|c], [a|b+c], [a|b] and signs."""
        if self._vol_faces is None:
            vf = np.empty((len(self.volumes), 4), dtype=np.int64)
            for t, (i, j, k) in enumerate(self.volumes):
                ij = self.add_index[i, j]
                jk = self.add_index[j, k]
                vf[t, 0] = self.face_index[(j, k)]
                vf[t, 1] = self.face_index[(ij, k)]
                vf[t, 2] = self.face_index[(i, jk)]
                vf[t, 3] = self.face_index[(i, j)]
            self._vol_faces = vf
            self._vol_signs = np.array([1, -1, 1, -1], dtype=np.int64)
        return self._vol_faces, self._vol_signs

    # -- chains and cochains -------------------------------------------------
    def chain(self, degree: int, coeffs=None) -> "Chain":
        return Chain(self, degree, dict(coeffs or {}))

    def face_chain(self, pairs) -> "Chain":
        """2-chain from (label, label) or (index-pair) items with coefficient 1."""
        coeffs = {}
        for item in pairs:
            if isinstance(item[0], PauliLabel):
                i, j = self.label_index[item[0]], self.label_index[item[1]]
            else:
                i, j = item
            k = self.face_index[(i, j)]
            coeffs[k] = (coeffs.get(k, 0) + 1) % self.d
        return Chain(self, 2, coeffs)

    def beta_cochain(self) -> "Cochain":
        return Cochain(self, 2, {k: int(v) for k, v in enumerate(self.beta) if v})

    def beta_of_chain(self, chain: "Chain") -> int:
        if chain.degree != 2:
            raise DegreeError("beta pairs with 2-chains")
        return int(sum(int(self.beta[k]) * c for k, c in chain.coeffs.items()) % self.d)

    # -- rephasing ------------------------------------------------------------
    def rephased(self, gamma: dict[PauliLabel, int]) -> "ObservableComplex":
        """Same cells with beta shifted by the coboundary of gamma (cheap)."""
        g = np.zeros(self.edge_count, dtype=np.int64)
        for label, value in gamma.items():
            g[self.label_index[label]] = value % self.d
        left = np.array([i for i, _ in self.faces], dtype=np.int64)
        right = np.array([j for _, j in self.faces], dtype=np.int64)
        new_beta = (self.beta - g[left] - g[right] + g[self.face_sum]) % self.d
        return ObservableComplex(
            self.labels, pauli.rephase(self.convention, gamma), self.faces,
            self.face_sum, new_beta, self.volumes, self.commute, self.add_index,
        )

    # -- serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "schema": "ctx/1",
            "d": self.d,
            "qudits": self.n,
            "labels": [format_label(a) for a in self.labels],
            "faces": [[i, j] for i, j in self.faces],
            "face_sum": [int(v) for v in self.face_sum],
            "beta": [int(v) for v in self.beta],
            "volumes": [[i, j, k] for i, j, k in self.volumes],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ObservableComplex":
        if doc.get("schema") != "ctx/1":
            raise InvalidInput("unknown schema; expected 'ctx/1'")
        d = int(doc["d"])
        labels = tuple(parse_label(s, d) for s in doc["labels"])
        cx = build_complex(labels, PhaseConvention(d))
        if [list(f) for f in cx.faces] != [list(f) for f in doc["faces"]]:
            raise InvalidInput("face table does not match the label set")
        if [list(v) for v in cx.volumes] != [list(v) for v in doc["volumes"]]:
            raise InvalidInput("volume table does not match the label set")
        if list(map(int, doc["face_sum"])) != [int(v) for v in cx.face_sum]:
            raise InvalidInput("face sums do not match the label set")
        beta = np.array([int(v) % d for v in doc["beta"]], dtype=np.int64)
        if len(beta) != cx.face_count:
            raise InvalidInput("beta table has the wrong length")
        cx.beta = beta
        return cx

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def __repr__(self):
        return (f"ObservableComplex(d={self.d}, edges={self.edge_count}, "
                f"faces={self.face_count}, volumes={self.volume_count})")


@dataclass
class Chain:
    """Formal Z_d-combination of cells of one degree, sparsely stored."""

    complex: ObservableComplex
    degree: int
    coeffs: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        d = self.complex.d
        self.coeffs = {k: v % d for k, v in self.coeffs.items() if v % d}

    def add(self, cell: int, value: int = 1) -> "Chain":
        d = self.complex.d
        out = dict(self.coeffs)
        out[cell] = (out.get(cell, 0) + value) % d
        return Chain(self.complex, self.degree, out)

    def __add__(self, other: "Chain") -> "Chain":
        if other.degree != self.degree or other.complex is not self.complex:
            raise DegreeError("can only add chains of equal degree on one complex")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Chain(self.complex, self.degree, out)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other.scaled(-1)

    def scaled(self, factor: int) -> "Chain":
        return Chain(self.complex, self.degree, {k: v * factor for k, v in self.coeffs.items()})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, Chain)
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def describe(self) -> list:
        cx = self.complex
        if self.degree == 1:
            return [[format_label(cx.labels[k]), v] for k, v in sorted(self.coeffs.items())]
        if self.degree == 2:
            return [
                [[format_label(cx.labels[i]), format_label(cx.labels[j])], v]
                for (i, j), v in sorted(
                    ((cx.faces[k], v) for k, v in self.coeffs.items())
                )
            ]
        if self.degree == 3:
            return [
                [[format_label(cx.labels[i]) for i in cx.volumes[k]], v]
                for k, v in sorted(self.coeffs.items())
            ]
        return [[k, v] for k, v in sorted(self.coeffs.items())]


@dataclass
class Cochain:
    """Z_d-valued linear functional on cells of one degree, sparsely stored."""

    complex: ObservableComplex
    degree: int
    values: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        d = self.complex.d
        self.values = {k: v % d for k, v in self.values.items() if v % d}

    def __call__(self, chain: Chain) -> int:
        if chain.degree != self.degree:
            raise DegreeError("cochain degree does not match chain degree")
        d = self.complex.d
        return sum(self.values.get(k, 0) * v for k, v in chain.coeffs.items()) % d

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and self.degree == other.degree
            and self.values == other.values
        )


def boundary(chain: Chain) -> Chain:
    """Linear extension of the cell boundary formulas; degree drops by one."""
    cx = chain.complex
    if chain.degree == 1:
        return Chain(cx, 0, {})
    if chain.degree == 2:
        out: dict[int, int] = {}
        for k, c in chain.coeffs.items():
            i, j, s = cx.face_edges(k)
            out[i] = out.get(i, 0) + c
            out[j] = out.get(j, 0) + c
            out[s] = out.get(s, 0) - c
        return Chain(cx, 1, out)
    if chain.degree == 3:
        vf, signs = cx.volume_faces()
        out = {}
        for k, c in chain.coeffs.items():
            for pos in range(4):
                f = int(vf[k, pos])
                out[f] = out.get(f, 0) + c * int(signs[pos])
        return Chain(cx, 2, out)
    raise DegreeError(f"boundary needs degree in {{1,2,3}}, got {chain.degree}")


def coboundary(phi: Cochain) -> Cochain:
    """(d phi)(c) = phi(boundary c) for every cell c of the next degree."""
    cx = phi.complex
    if phi.degree == 0:
        return Cochain(cx, 1, {})
    if phi.degree == 1:
        vals = {}
        for k in range(cx.face_count):
            i, j, s = cx.face_edges(k)
            v = phi.values.get(i, 0) + phi.values.get(j, 0) - phi.values.get(s, 0)
            if v % cx.d:
                vals[k] = v
        return Cochain(cx, 2, vals)
    if phi.degree == 2:
        vf, signs = cx.volume_faces()
        vals = {}
        for k in range(cx.volume_count):
            v = sum(phi.values.get(int(vf[k, pos]), 0) * int(signs[pos]) for pos in range(4))
            if v % cx.d:
                vals[k] = v
        return Cochain(cx, 3, vals)
    raise DegreeError(f"coboundary needs degree in {{0,1,2}}, got {phi.degree}")


def build_complex(labels, convention: PhaseConvention | None = None) -> ObservableComplex:
    """Enumerate faces and volumes of a closed label set and fill beta.

    Cell enumeration is lexicographic, so two builds of the same label set
    agree cell-for-cell.  Raises ClosureViolation if some commuting pair
    sums outside the set.
    """
    labels = tuple(sorted(set(labels), key=PauliLabel.sort_key))
    if not labels:
        raise InvalidInput("empty label set")
    d = labels[0].d
    n = labels[0].n
    for lab in labels:
        if lab.d != d or lab.n != n:
            raise InvalidInput("label set mixes qudit counts or dimensions")
    if not labels[0].is_zero:
        raise ClosureViolation("label set must contain the identity label 0")
    convention = convention or PhaseConvention(d)
    if convention.d != d:
        raise InvalidInput("convention modulus does not match the labels")
    index = {a: i for i, a in enumerate(labels)}
    m = len(labels)

    xs = np.array([a.x for a in labels], dtype=np.int64)
    zs = np.array([a.z for a in labels], dtype=np.int64)
    sym = (xs @ zs.T - zs @ xs.T) % d
    commute = sym == 0

    add_index = np.full((m, m), -1, dtype=np.int64)
    faces = []
    for i in range(m):
        for j in np.nonzero(commute[i])[0]:
            c = labels[i] + labels[int(j)]
            k = index.get(c)
            if k is None:
                raise ClosureViolation(
                    f"{format_label(labels[i])} + {format_label(labels[int(j)])} "
                    f"= {format_label(c)} is missing from the label set"
                )
            add_index[i, j] = k
            faces.append((i, int(j)))
    face_sum = np.array([add_index[i, j] for i, j in faces], dtype=np.int64)

    # beta per face, computed in the lifted phase ring.
    big = pauli.phase_order(d)
    lift = big // d
    e_arr = np.array([pauli.eta_exponent(a, convention) for a in labels], dtype=np.int64)
    left = np.array([i for i, _ in faces], dtype=np.int64)
    right = np.array([j for _, j in faces], dtype=np.int64)
    cross = np.einsum("fk,fk->f", zs[left], xs[right])
    c_exp = (e_arr[left] + e_arr[right] + lift * cross - e_arr[face_sum]) % big
    if np.any(c_exp % lift):
        raise AssertionError("phase of a commuting product escaped Z_d")
    beta_values = (-(c_exp // lift)) % d

    volumes = []
    for fi, (i, j) in enumerate(faces):
        both = commute[i] & commute[j]
        for k in np.nonzero(both)[0]:
            volumes.append((i, j, int(k)))

    return ObservableComplex(labels, convention, faces, face_sum, beta_values,
                             volumes, commute, add_index)


class RelativeComplex:
    """Quotient complex with the cells of a closed sub-label set removed."""

    def __init__(self, parent: ObservableComplex, sub_labels):
        self.parent = parent
        sub = set()
        for item in sub_labels:
            if isinstance(item, PauliLabel):
                idx = parent.label_index.get(item)
                if idx is None:
                    raise InvalidInput(f"sub-label {format_label(item)!r} is not in the complex")
            else:
                idx = int(item)
                if not 0 <= idx < parent.edge_count:
                    raise InvalidInput(f"edge index {idx} out of range")
            sub.add(idx)
        for i in sub:
            for j in sub:
                if parent.commute[i, j]:
                    s = int(parent.add_index[i, j])
                    if s not in sub:
                        raise NotClosed(
                            "sub-label set is not closed under commuting sums"
                        )
        self.sub_edges = frozenset(sub)
        self.surviving_edges = [i for i in range(parent.edge_count) if i not in self.sub_edges]
        self.surviving_faces = [
            k for k, (i, j) in enumerate(parent.faces)
            if not (i in self.sub_edges and j in self.sub_edges)
        ]
        self.surviving_volumes = [
            k for k, (i, j, c) in enumerate(parent.volumes)
            if not (i in self.sub_edges and j in self.sub_edges and c in self.sub_edges)
        ]
        self.face_survives = np.ones(parent.face_count, dtype=bool)
        for k, (i, j) in enumerate(parent.faces):
            if i in self.sub_edges and j in self.sub_edges:
                self.face_survives[k] = False

    def reduce_chain(self, chain: Chain) -> Chain:
        """Drop coefficients on removed cells (pass to the quotient)."""
        cx = self.parent
        if chain.degree == 1:
            keep = {k: v for k, v in chain.coeffs.items() if k not in self.sub_edges}
        elif chain.degree == 2:
            keep = {k: v for k, v in chain.coeffs.items() if self.face_survives[k]}
        elif chain.degree == 3:
            alive = set(self.surviving_volumes)
            keep = {k: v for k, v in chain.coeffs.items() if k in alive}
        else:
            raise DegreeError("relative reduction needs degree in {1,2,3}")
        return Chain(cx, chain.degree, keep)

    def boundary_r(self, chain: Chain) -> Chain:
        """Relative boundary: boundary with removed cells deleted."""
        return self.reduce_chain(boundary(self.reduce_chain(chain)))


def relative_complex(parent: ObservableComplex, sub_labels) -> RelativeComplex:
    return RelativeComplex(parent, sub_labels)
