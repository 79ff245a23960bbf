"""Parity-based contextuality decisions with machine-checkable certificates.

A deterministic value assignment s : E -> Z_d is consistent when, on every
face (a, b), s(a) + s(b) - s(a+b) = -beta(a, b).  The prover solves that
linear system exactly; on infeasibility the solver's left certificate is
itself a closed 2-cycle F with beta(F) != 0, i.e. a topological witness of
contextuality.  The state-dependent variant works in the quotient complex
with the stabilizer labels of the state removed and beta replaced by the
relative cocycle beta + d(s_state).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import modlinalg
from .complexes import Chain, ObservableComplex, RelativeComplex, boundary, relative_complex
from .errors import InconsistentStateData, InvalidInput, NotACycle
from .modlinalg import ModMatrix
from .pauli import PauliLabel, format_label


@dataclass
class ValueAssignment:
    """Candidate outcome exponents, one per edge of the complex."""

    complex: ObservableComplex
    values: np.ndarray

    def value_of(self, label: PauliLabel) -> int:
        return int(self.values[self.complex.label_index[label]])

    def is_consistent(self) -> bool:
        cx = self.complex
        v = self.values
        for k in range(cx.face_count):
            i, j, s = cx.face_edges(k)
            if (v[i] + v[j] - v[s] + cx.beta[k]) % cx.d:
                return False
        return True

    def as_dict(self) -> dict[str, int]:
        return {
            format_label(a): int(self.values[i])
            for i, a in enumerate(self.complex.labels)
        }


@dataclass
class StateData:
    """Stabilizer-type labels of a state with their eigenvalue exponents."""

    labels: tuple[PauliLabel, ...]
    values: dict[PauliLabel, int]

    @classmethod
    def from_generators(cls, pairs, convention=None) -> "StateData":
        """Close generator (label, exponent) pairs under commuting sums.

        Exponents of products are forced by s(a+b) = s(a) + s(b) + beta(a, b);
        conflicting derivations raise InconsistentStateData.
        """
        from . import pauli as _pauli

        pairs = list(pairs)
        if not pairs:
            raise InvalidInput("state needs at least one stabilizer generator")
        d = pairs[0][0].d
        values: dict[PauliLabel, int] = {PauliLabel.zero(pairs[0][0].n, d): 0}
        for label, value in pairs:
            value = int(value) % d
            if values.get(label, value) != value:
                raise InconsistentStateData(f"conflicting exponents for {format_label(label)}")
            values[label] = value
        work = sorted(values, key=PauliLabel.sort_key)
        while work:
            fresh = []
            members = sorted(values, key=PauliLabel.sort_key)
            for a in work:
                for b in members:
                    if _pauli.symplectic_form(a, b) == 0:
                        c = a + b
                        v = (values[a] + values[b] + _pauli.beta(a, b, convention)) % d
                        if c in values:
                            if values[c] != v:
                                raise InconsistentStateData(
                                    f"stabilizer exponents disagree on {format_label(c)}"
                                )
                        else:
                            values[c] = v
                            fresh.append(c)
            work = fresh
        labels = tuple(sorted(values, key=PauliLabel.sort_key))
        return cls(labels, values)

    def validate(self, cx: ObservableComplex):
        """Check containment in E and the face relation inside the sub-set."""
        for a in self.labels:
            if a not in cx.label_index:
                raise InvalidInput(f"state label {format_label(a)} is not in the complex")
        idx = {cx.label_index[a] for a in self.labels}
        for i in idx:
            for j in idx:
                if cx.commute[i, j]:
                    s = int(cx.add_index[i, j])
                    if s not in idx:
                        raise InconsistentStateData("state labels are not closed")
                    k = cx.face_index[(i, j)]
                    lhs = (
                        self.values[cx.labels[i]]
                        + self.values[cx.labels[j]]
                        - self.values[cx.labels[s]]
                    ) % cx.d
                    if lhs != (-int(cx.beta[k])) % cx.d:
                        raise InconsistentStateData(
                            "state exponents violate the face relation"
                        )


@dataclass
class ContextualityVerdict:
    """Either a consistent assignment or a verified topological witness."""

    contextual: bool
    assignment: ValueAssignment | None = None
    witness: Chain | None = None
    witness_value: int | None = None
    certificate: list[tuple[int, int]] | None = None  # (face index, coefficient)
    relative: bool = False

    def to_json(self) -> dict:
        out = {
            "branch": "contextual" if self.contextual else "noncontextual",
            "relative": self.relative,
        }
        if self.assignment is not None:
            out["assignment"] = self.assignment.as_dict()
        if self.witness is not None:
            out["witness"] = {
                "faces": self.witness.describe(),
                "value": self.witness_value,
            }
        if self.certificate is not None:
            cx = self.witness.complex
            out["certificate"] = [
                [[format_label(cx.labels[i]) for i in cx.faces[k]], c]
                for k, c in self.certificate
            ]
        return out


def _face_rows(cx: ObservableComplex, face_indices, column_of, state: StateData | None):
    """Constraint rows s(a)+s(b)-s(a+b) = -beta with state values substituted."""
    d = cx.d
    sub_value = {}
    if state is not None:
        sub_value = {cx.label_index[a]: v for a, v in state.values.items()}
    rows, rhs = [], []
    for k in face_indices:
        i, j, s = cx.face_edges(k)
        row: dict[int, int] = {}
        r = (-int(cx.beta[k])) % d
        for edge, coeff in ((i, 1), (j, 1), (s, -1)):
            col = column_of.get(edge)
            if col is None:
                r -= coeff * sub_value[edge]
            else:
                row[col] = (row.get(col, 0) + coeff) % d
        rows.append(row)
        rhs.append(r % d)
    return rows, np.array(rhs, dtype=np.int64)


def relative_beta(cx: ObservableComplex, rel: RelativeComplex, state: StateData) -> np.ndarray:
    """beta + d(s_state) on all faces, with the state exponents extended by zero."""
    ext = np.zeros(cx.edge_count, dtype=np.int64)
    for a, v in state.values.items():
        ext[cx.label_index[a]] = v
    left = np.array([i for i, _ in cx.faces], dtype=np.int64)
    right = np.array([j for _, j in cx.faces], dtype=np.int64)
    return (cx.beta + ext[left] + ext[right] - ext[cx.face_sum]) % cx.d


def check_state_independent(cx: ObservableComplex, minimize: bool = True) -> ContextualityVerdict:
    """Decide whether a consistent assignment exists on the whole complex."""
    column_of = {i: i for i in range(cx.edge_count)}
    rows, rhs = _face_rows(cx, range(cx.face_count), column_of, None)
    A = ModMatrix(len(rows), cx.edge_count, cx.d, rows)
    res = modlinalg.solve(A, rhs, minimize_certificate=minimize)
    if res.feasible:
        return ContextualityVerdict(False, assignment=ValueAssignment(cx, res.solution))
    coeffs = {k: int(res.certificate[k]) for k in range(cx.face_count) if res.certificate[k]}
    witness = Chain(cx, 2, coeffs)
    value = cx.beta_of_chain(witness)
    assert boundary(witness).is_zero and value != 0
    return ContextualityVerdict(
        True, witness=witness, witness_value=value,
        certificate=sorted(coeffs.items()),
    )


def check_state_dependent(cx: ObservableComplex, state: StateData,
                          minimize: bool = True) -> ContextualityVerdict:
    """Decide whether an assignment extending the state exponents exists."""
    state.validate(cx)
    rel = relative_complex(cx, state.labels)
    beta_rel = relative_beta(cx, rel, state)
    # The relative cocycle must vanish on faces inside the removed sub-set.
    for k in range(cx.face_count):
        if not rel.face_survives[k]:
            assert beta_rel[k] == 0, "relative cocycle nonzero on a removed face"

    column_of = {e: c for c, e in enumerate(rel.surviving_edges)}
    rows, rhs = _face_rows(cx, rel.surviving_faces, column_of, state)
    A = ModMatrix(len(rows), len(rel.surviving_edges), cx.d, rows)
    res = modlinalg.solve(A, rhs, minimize_certificate=minimize)
    if res.feasible:
        full = np.zeros(cx.edge_count, dtype=np.int64)
        for a, v in state.values.items():
            full[cx.label_index[a]] = v
        for col, e in enumerate(rel.surviving_edges):
            full[e] = res.solution[col]
        assignment = ValueAssignment(cx, full)
        assert assignment.is_consistent()
        return ContextualityVerdict(False, assignment=assignment, relative=True)
    coeffs = {}
    for pos, k in enumerate(rel.surviving_faces):
        if res.certificate[pos]:
            coeffs[k] = int(res.certificate[pos])
    witness = Chain(cx, 2, coeffs)
    value = int(sum(int(beta_rel[k]) * c for k, c in coeffs.items()) % cx.d)
    assert rel.boundary_r(witness).is_zero and value != 0
    return ContextualityVerdict(
        True, witness=witness, witness_value=value,
        certificate=sorted(coeffs.items()), relative=True,
    )


def verify_witness(cx: ObservableComplex, F: Chain, state: StateData | None = None) -> bool:
    """Re-check a claimed witness from raw cell data, independent of the solver."""
    if F.degree != 2:
        return False
    if state is None:
        return boundary(F).is_zero and cx.beta_of_chain(F) != 0
    rel = relative_complex(cx, state.labels)
    beta_rel = relative_beta(cx, rel, state)
    reduced = rel.reduce_chain(F)
    if not rel.boundary_r(reduced).is_zero:
        return False
    value = sum(int(beta_rel[k]) * c for k, c in reduced.coeffs.items()) % cx.d
    return value != 0


def homologous(cx: ObservableComplex, F1: Chain, F2: Chain) -> Chain | None:
    """3-chain V with F1 - F2 = boundary(V), or None if the classes differ."""
    for F in (F1, F2):
        if F.degree != 2 or not boundary(F).is_zero:
            raise NotACycle("homologous() expects closed 2-chains")
    delta = F1 - F2
    if delta.is_zero:
        return Chain(cx, 3, {})
    # Columns are volumes; rows are faces; entries from the volume boundary.
    vf, signs = cx.volume_faces()
    rows_data: list[dict[int, int]] = [{} for _ in range(cx.face_count)]
    for v in range(cx.volume_count):
        for pos in range(4):
            f = int(vf[v, pos])
            rows_data[f][v] = (rows_data[f].get(v, 0) + int(signs[pos])) % cx.d
    A = ModMatrix(cx.face_count, cx.volume_count, cx.d, rows_data)
    rhs = np.zeros(cx.face_count, dtype=np.int64)
    for k, c in delta.coeffs.items():
        rhs[k] = c % cx.d
    res = modlinalg.solve(A, rhs, minimize_certificate=False)
    if not res.feasible:
        return None
    coeffs = {v: int(res.solution[v]) for v in np.nonzero(res.solution)[0]}
    V = Chain(cx, 3, coeffs)
    assert boundary(V) == delta
    return V


def enumerate_assignments(cx: ObservableComplex, state: StateData | None = None,
                          node_limit: int = 50_000_000):
    """Independent brute-force oracle: exhaustive search over assignments.

    Returns (exists, assignment-or-None).  Free edges are ordered so faces
    close early, and the search backtracks on the first violated face, so
    the full consistent-prefix tree is explored; the result is exact.
    """
    d = cx.d
    if state is not None:
        state.validate(cx)
        rel = relative_complex(cx, state.labels)
        face_pool = list(rel.surviving_faces)
        fixed = {cx.label_index[a]: v for a, v in state.values.items()}
        free_edges = list(rel.surviving_edges)
    else:
        face_pool = list(range(cx.face_count))
        fixed = {}
        free_edges = list(range(cx.edge_count))

    # Static edge order: repeatedly pick the edge completing the most faces.
    face_edge_sets = {}
    for k in face_pool:
        i, j, s = cx.face_edges(k)
        face_edge_sets[k] = {e for e in (i, j, s) if e not in fixed}
    order: list[int] = []
    chosen: set[int] = set()
    remaining = set(free_edges)
    while remaining:
        def gain(e):
            return sum(1 for k in face_pool if face_edge_sets[k] and
                       face_edge_sets[k] <= chosen | {e})
        best = max(sorted(remaining), key=gain)
        order.append(best)
        chosen.add(best)
        remaining.discard(best)

    # Faces checkable once their last edge appears at position p.
    pos = {e: p for p, e in enumerate(order)}
    checks_at: list[list[int]] = [[] for _ in range(len(order) + 1)]
    for k in face_pool:
        es = face_edge_sets[k]
        last = max((pos[e] for e in es), default=-1)
        checks_at[last + 1].append(k)

    values = dict(fixed)

    def face_ok(k) -> bool:
        i, j, s = cx.face_edges(k)
        return (values[i] + values[j] - values[s] + int(cx.beta[k])) % d == 0

    for k in checks_at[0]:
        if not face_ok(k):
            return False, None

    nodes = 0

    def descend(p: int):
        nonlocal nodes
        if p == len(order):
            return dict(values)
        e = order[p]
        for v in range(d):
            nodes += 1
            if nodes > node_limit:
                raise InvalidInput("brute-force oracle exceeded its node limit")
            values[e] = v
            if all(face_ok(k) for k in checks_at[p + 1]):
                hit = descend(p + 1)
                if hit is not None:
                    return hit
        del values[e]
        return None

    hit = descend(0)
    if hit is None:
        return False, None
    full = np.zeros(cx.edge_count, dtype=np.int64)
    for e, v in hit.items():
        full[e] = v
    return True, ValueAssignment(cx, full)
