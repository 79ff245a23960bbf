"""Symmetries of an observable set and symmetry-based contextuality tests.

A symmetry g permutes the labels and rephases the operators,
g(T_a) = omega^(phi_g(a)) T_(g a); `phi` is the phase function.  Validated
elements satisfy the two structural identities: composition compatibility
phi_(gh)(a) = phi_h(a) + phi_g(h a), and on every face (a, b)
phi_g(a) + phi_g(b) - phi_g(a+b) = beta(ga, gb) - beta(a, b).

Witnesses come in two forms: an explicit pair (g, f) with g-invariant
(relative) boundary and nonzero phase sum on it, and vanishing decisions
for the induced classes in first and second group cohomology of the
quotient Q = G / N, where N is the subgroup fixing every edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import modlinalg
from .complexes import Chain, ObservableComplex, boundary, relative_complex
from .errors import (
    BudgetExceeded,
    ClosureTooLarge,
    InvalidInput,
    NoSuchN,
    NotACochainSolution,
    NotASymmetry,
    QTooLarge,
)
from .modlinalg import ModMatrix
from .parity import StateData, ValueAssignment
from .pauli import PauliLabel, PauliOperator, format_label, multiply, phase_order, power


@dataclass(frozen=True)
class SymmetryElement:
    """Label permutation plus phase function, both indexed like the complex."""

    perm: tuple[int, ...]
    phi: tuple[int, ...]
    name: str = field(default="", compare=False)

    @property
    def is_edge_fixing(self) -> bool:
        return all(p == i for i, p in enumerate(self.perm))

    def key(self) -> tuple:
        return (self.perm, self.phi)

    def perm_array(self) -> np.ndarray:
        return np.asarray(self.perm, dtype=np.int64)

    def phi_array(self) -> np.ndarray:
        return np.asarray(self.phi, dtype=np.int64)

    def phi_of_chain(self, chain: Chain) -> int:
        d = chain.complex.d
        return sum(self.phi[e] * c for e, c in chain.coeffs.items()) % d

    def act_on_chain(self, chain: Chain) -> Chain:
        """Push a 1-chain forward along the label permutation."""
        coeffs = {}
        for e, c in chain.coeffs.items():
            t = self.perm[e]
            coeffs[t] = coeffs.get(t, 0) + c
        return Chain(chain.complex, 1, coeffs)


def identity_element(cx: ObservableComplex) -> SymmetryElement:
    m = cx.edge_count
    return SymmetryElement(tuple(range(m)), (0,) * m, "id")


def compose(g: SymmetryElement, h: SymmetryElement, d: int,
            name: str | None = None) -> SymmetryElement:
    """(g h)(T_a) = g(h(T_a)): apply h first, then g."""
    perm = tuple(g.perm[p] for p in h.perm)
    phi = tuple((h.phi[a] + g.phi[h.perm[a]]) % d for a in range(len(h.perm)))
    if name is None:
        name = f"{g.name}*{h.name}"
        if len(name) > 64:
            name = name[:61] + "..."
    return SymmetryElement(perm, phi, name)


def validate_element(cx: ObservableComplex, el: SymmetryElement):
    """Structural checks: bijection on E, chain map, and the face identity."""
    m = cx.edge_count
    if len(el.perm) != m or len(el.phi) != m:
        raise NotASymmetry("element tables do not match the complex size")
    if sorted(el.perm) != list(range(m)):
        raise NotASymmetry("label map is not a bijection on E")
    if el.perm[0] != 0 or el.phi[0] % cx.d != 0:
        raise NotASymmetry("identity label must map to itself with phase 0")
    perm = el.perm_array()
    phi = el.phi_array()
    for k in range(cx.face_count):
        i, j, s = cx.face_edges(k)
        gi, gj = int(perm[i]), int(perm[j])
        if not cx.commute[gi, gj]:
            raise NotASymmetry("image of a commuting pair fails to commute")
        if int(cx.add_index[gi, gj]) != int(perm[s]):
            raise NotASymmetry("label map does not respect sums of commuting labels")
        lhs = (phi[i] + phi[j] - phi[s]) % cx.d
        rhs = (int(cx.beta[cx.face_index[(gi, gj)]]) - int(cx.beta[k])) % cx.d
        if lhs != rhs:
            raise NotASymmetry("phase function violates the face identity")


def element_from_tables(cx: ObservableComplex, perm_map: dict, phi_map: dict,
                        name: str = "raw") -> SymmetryElement:
    """Build and validate an element from label-keyed permutation/phase tables."""
    from .pauli import parse_label

    def to_label(key):
        return key if isinstance(key, PauliLabel) else parse_label(str(key), cx.d, cx.n)

    perm = list(range(cx.edge_count))
    for src, dst in perm_map.items():
        perm[cx.label_index[to_label(src)]] = cx.label_index[to_label(dst)]
    phi = [0] * cx.edge_count
    for src, val in phi_map.items():
        phi[cx.label_index[to_label(src)]] = int(val) % cx.d
    el = SymmetryElement(tuple(perm), tuple(phi), name)
    validate_element(cx, el)
    return el


# ---------------------------------------------------------------------------
# Clifford-gate constructor (d = 2).

def _pauli_op(cx_n: int, qubit: int, kind: str, sign: int = 0) -> PauliOperator:
    x = [0] * cx_n
    z = [0] * cx_n
    if kind in ("X", "Y"):
        x[qubit] = 1
    if kind in ("Z", "Y"):
        z[qubit] = 1
    return PauliOperator(PauliLabel(tuple(x), tuple(z), 2), 2 * sign)


_ONE_WIRE_GATES = {
    # name: ((X image kind, sign), (Z image kind, sign)); sign counts -1 factors
    "H": (("Z", 0), ("X", 0)),
    "S": (("Y", 0), ("Z", 0)),
    "X": (("X", 0), ("Z", 1)),
    "Y": (("X", 1), ("Z", 1)),
    "Z": (("X", 1), ("Z", 0)),
    "A": (("Y", 0), ("Z", 1)),  # A = (X+Y)/sqrt(2): X<->Y, Z -> -Z
    "I": (("X", 0), ("Z", 0)),
}


def _gate_generator_images(name: str, wires: list[int], n: int):
    imgX = [_pauli_op(n, i, "X") for i in range(n)]
    imgZ = [_pauli_op(n, i, "Z") for i in range(n)]
    if name in _ONE_WIRE_GATES:
        if len(wires) != 1:
            raise InvalidInput(f"gate {name} takes one wire")
        (kx, sx), (kz, sz) = _ONE_WIRE_GATES[name]
        w = wires[0]
        imgX[w] = _pauli_op(n, w, kx, sx)
        imgZ[w] = _pauli_op(n, w, kz, sz)
    elif name == "SWAP":
        if len(wires) != 2:
            raise InvalidInput("SWAP takes two wires")
        a, b = wires
        imgX[a], imgX[b] = _pauli_op(n, b, "X"), _pauli_op(n, a, "X")
        imgZ[a], imgZ[b] = _pauli_op(n, b, "Z"), _pauli_op(n, a, "Z")
    elif name == "CNOT":
        if len(wires) != 2:
            raise InvalidInput("CNOT takes two wires: control, target")
        c, t = wires
        imgX[c] = multiply(_pauli_op(n, c, "X"), _pauli_op(n, t, "X"))
        imgZ[t] = multiply(_pauli_op(n, c, "Z"), _pauli_op(n, t, "Z"))
    else:
        raise InvalidInput(f"unknown gate {name!r}")
    return imgX, imgZ


def _push_through(op: PauliOperator, imgX, imgZ) -> PauliOperator:
    """Image of op under the algebra map sending X_i, Z_i to the given operators."""
    from .pauli import eta_exponent

    n = op.n
    out = PauliOperator.identity(n, op.d)
    for i in range(n):
        if op.label.x[i]:
            out = multiply(out, power(imgX[i], op.label.x[i]))
        if op.label.z[i]:
            out = multiply(out, power(imgZ[i], op.label.z[i]))
    return PauliOperator(out.label, out.phase + op.phase + eta_exponent(op.label))


def from_clifford(cx: ObservableComplex, gates, name: str | None = None) -> SymmetryElement:
    """Conjugation action of a Clifford gate list on the complex (d = 2 only).

    Gates apply in list order; each entry is ("H", [0])-style or a
    {"gate": ..., "wires": [...]} mapping.  Raises NotASymmetry if some
    label maps outside the complex.
    """
    if cx.d != 2:
        raise InvalidInput("gate constructor is defined for qubits (d = 2)")
    n = cx.n
    curX = [_pauli_op(n, i, "X") for i in range(n)]
    curZ = [_pauli_op(n, i, "Z") for i in range(n)]
    parts = []
    for gate in gates:
        if isinstance(gate, dict):
            gname, wires = gate["gate"], list(gate["wires"])
        else:
            gname, wires = gate[0], list(gate[1])
        parts.append(f"{gname}@{','.join(map(str, wires))}")
        gX, gZ = _gate_generator_images(gname, wires, n)
        curX = [_push_through(p, gX, gZ) for p in curX]
        curZ = [_push_through(p, gX, gZ) for p in curZ]

    lift = phase_order(cx.d) // cx.d
    perm, phi = [], []
    for a in cx.labels:
        img = _push_through(PauliOperator(a, 0), curX, curZ)
        target = cx.label_index.get(img.label)
        if target is None:
            raise NotASymmetry(
                f"{format_label(a)} maps to {format_label(img.label)}, "
                "which is outside the observable set"
            )
        if img.phase % lift:
            raise NotASymmetry("conjugation produced a phase outside Z_d")
        perm.append(target)
        phi.append((img.phase // lift) % cx.d)
    el = SymmetryElement(tuple(perm), tuple(phi), name or ";".join(parts))
    validate_element(cx, el)
    return el


# ---------------------------------------------------------------------------
# Finite symmetry groups.

class SymmetryGroup:
    """Explicit finite group of validated symmetries of one complex."""

    def __init__(self, cx: ObservableComplex, elements: list[SymmetryElement]):
        self.complex = cx
        self.elements = tuple(sorted(elements, key=SymmetryElement.key))
        self.index = {el.key(): i for i, el in enumerate(self.elements)}
        if identity_element(cx).key() not in self.index:
            raise InvalidInput("group does not contain the identity")
        # N = edge-fixing subgroup; cosets of N share the permutation part.
        self.n_indices = tuple(i for i, el in enumerate(self.elements) if el.is_edge_fixing)
        perms = sorted({el.perm for el in self.elements})
        self.coset_perms = perms
        self.coset_index = {p: q for q, p in enumerate(perms)}
        self.coset_of = tuple(self.coset_index[el.perm] for el in self.elements)
        self.cosets = [[] for _ in perms]
        for i, el in enumerate(self.elements):
            self.cosets[self.coset_of[i]].append(i)
        # Lexicographically smallest element of each coset is its section rep.
        self.section = tuple(min(members) for members in self.cosets)
        self._phi_by_key = {self.elements[i].phi: i for i in self.n_indices}

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def quotient_size(self) -> int:
        return len(self.cosets)

    def element_index(self, el: SymmetryElement) -> int:
        i = self.index.get(el.key())
        if i is None:
            raise InvalidInput("element does not belong to this group")
        return i

    def compose_indices(self, i: int, j: int) -> int:
        prod = compose(self.elements[i], self.elements[j], self.complex.d)
        k = self.index.get(prod.key())
        if k is None:
            raise InvalidInput("group is not closed under composition")
        return k

    def q_mult(self, p: int, q: int) -> int:
        k = self.compose_indices(self.section[p], self.section[q])
        return self.coset_of[k]

    def edge_fixer_with_phi(self, phi_vector) -> int | None:
        return self._phi_by_key.get(tuple(int(v) % self.complex.d for v in phi_vector))


def generate_group(cx: ObservableComplex, generators, cap: int = 4096,
                   validate: bool = True) -> SymmetryGroup:
    """Close a generator list under composition (cap-guarded)."""
    gens = list(generators)
    if validate:
        for g in gens:
            validate_element(cx, g)
    ident = identity_element(cx)
    seen = {ident.key(): ident}
    for g in gens:
        seen.setdefault(g.key(), g)
    frontier = list(seen.values())
    while frontier:
        fresh = []
        for g in frontier:
            for h in gens:
                for prod in (compose(g, h, cx.d), compose(h, g, cx.d)):
                    if prod.key() not in seen:
                        seen[prod.key()] = prod
                        fresh.append(prod)
                        if len(seen) > cap:
                            raise ClosureTooLargeError(cap)
        frontier = fresh
    return SymmetryGroup(cx, list(seen.values()))


def ClosureTooLargeError(cap):
    from .errors import ClosureTooLarge
    return ClosureTooLarge(f"symmetry group exceeded cap of {cap} elements")


def group_from_elements(cx: ObservableComplex, elements) -> SymmetryGroup:
    """Wrap a complete element list; validates every element and closure."""
    els = list(elements)
    for el in els:
        validate_element(cx, el)
    group = SymmetryGroup(cx, els)
    for i in range(group.order):
        for j in range(group.order):
            group.compose_indices(i, j)  # raises if not closed
    return group


def validate_state_symmetry(group: SymmetryGroup, cx: ObservableComplex,
                            state: StateData):
    """Elements must preserve the state labels and their exponents."""
    sub = [cx.label_index[a] for a in state.labels]
    sub_set = set(sub)
    vals = {cx.label_index[a]: v for a, v in state.values.items()}
    for el in group.elements:
        for e in sub:
            t = el.perm[e]
            if t not in sub_set:
                raise NotASymmetry("element does not preserve the state labels")
            if (vals[t] + el.phi[e] - vals[e]) % cx.d:
                raise NotASymmetry("element does not preserve the state exponents")


def transform_assignment(s: ValueAssignment, g: SymmetryElement) -> ValueAssignment:
    """s'(a) = s(g a) + phi_g(a); maps consistent assignments to consistent ones."""
    cx = s.complex
    perm = g.perm_array()
    values = (s.values[perm] + g.phi_array()) % cx.d
    return ValueAssignment(cx, values)


# ---------------------------------------------------------------------------
# Witness search (explicit pairs).

def _boundary_struct(cx: ObservableComplex, state: StateData | None):
    """Faces, their boundary rows over kept edges, and the kept-edge list."""
    if state is None:
        faces = list(range(cx.face_count))
        kept = None
    else:
        rel = relative_complex(cx, state.labels)
        faces = list(rel.surviving_faces)
        kept = set(rel.surviving_edges)
    rows = []
    for k in faces:
        i, j, s = cx.face_edges(k)
        row: dict[int, int] = {}
        for e, c in ((i, 1), (j, 1), (s, -1)):
            if kept is None or e in kept:
                row[e] = (row.get(e, 0) + c) % cx.d
        rows.append({e: c for e, c in row.items() if c})
    return faces, rows, kept


def verify_symmetry_pair(cx: ObservableComplex, g: SymmetryElement, f: Chain,
                         state: StateData | None = None) -> bool:
    """Check g.(boundary f) = boundary f and phi_g(boundary f) != 0.

    With state data, the relative boundary is used (state edges deleted).
    """
    if f.degree != 2:
        return False
    bd = boundary(f)
    if state is not None:
        rel = relative_complex(cx, state.labels)
        bd = rel.reduce_chain(bd)
    moved = g.act_on_chain(bd)
    return moved == bd and g.phi_of_chain(bd) != 0


def find_symmetry_witness(group: SymmetryGroup, cx: ObservableComplex,
                          state: StateData | None = None,
                          extra_chains=(),
                          candidate=None,
                          max_pair_steps: int = 2_000_000):
    """Search for (g, f) with g-invariant (relative) boundary and phase != 0.

    The pool holds the scenario's named composite faces first, then every
    elementary face; combinations of one, two and three pool entries are
    tried in deterministic order.  Only one representative per coset of the
    edge-fixing subgroup needs checking.  Returns the first hit, or None
    when provably no witness exists (trivial quotient); an exhausted budget
    raises BudgetExceeded because bigger chains might still succeed.
    """
    if candidate is not None:
        g, f = candidate
        return (g, f) if verify_symmetry_pair(cx, g, f, state) else None

    if state is not None:
        validate_state_symmetry(group, cx, state)
    faces, rows, kept = _boundary_struct(cx, state)

    pool: list[tuple[str, Chain]] = [(nm, ch) for nm, ch in extra_chains]
    for pos, k in enumerate(faces):
        i, j = cx.faces[k]
        nm = f"[{format_label(cx.labels[i])}|{format_label(cx.labels[j])}]"
        pool.append((nm, Chain(cx, 2, {k: 1})))

    d = cx.d

    def boundary_dict(ch: Chain) -> dict[int, int]:
        bd = boundary(ch)
        out = bd.coeffs
        if kept is not None:
            out = {e: c for e, c in out.items() if e in kept}
        return out

    bds = [boundary_dict(ch) for _, ch in pool]

    nontrivial = [q for q in range(group.quotient_size)
                  if group.coset_perms[q] != identity_element(cx).perm]
    if not nontrivial:
        return None

    steps = 0
    for q in nontrivial:
        g = group.elements[group.section[q]]
        perm, phi = g.perm, g.phi
        deltas, phis = [], []
        for bd in bds:
            moved: dict[int, int] = {}
            for e, c in bd.items():
                t = perm[e]
                moved[t] = (moved.get(t, 0) + c) % d
            delta: dict[int, int] = dict(moved)
            for e, c in bd.items():
                delta[e] = (delta.get(e, 0) - c) % d
            deltas.append(tuple(sorted((e, c) for e, c in delta.items() if c)))
            phis.append(sum(phi[e] * c for e, c in bd.items()) % d)

        def neg(key):
            return tuple(sorted((e, (-c) % d) for e, c in key))

        buckets: dict[tuple, list[int]] = {}
        for idx, key in enumerate(deltas):
            buckets.setdefault(key, []).append(idx)

        def result(indices):
            chain = Chain(cx, 2, {})
            for t in indices:
                chain = chain + pool[t][1]
            assert verify_symmetry_pair(cx, g, chain, state)
            return g, chain

        for i, key in enumerate(deltas):
            if not key and phis[i] % d:
                return result([i])
        for i in range(len(pool)):
            for j in buckets.get(neg(deltas[i]), ()):
                if j > i and (phis[i] + phis[j]) % d:
                    return result([i, j])
        for i in range(len(pool)):
            di = dict(deltas[i])
            for j in range(i + 1, len(pool)):
                steps += 1
                if steps > max_pair_steps:
                    raise BudgetExceeded(
                        "witness search budget exhausted before covering all triples"
                    )
                dj = dict(di)
                for e, c in deltas[j]:
                    dj[e] = (dj.get(e, 0) + c) % d
                need = tuple(sorted((e, (-c) % d) for e, c in dj.items() if c))
                for k in buckets.get(need, ()):
                    if k > j and (phis[i] + phis[j] + phis[k]) % d:
                        return result([i, j, k])
    raise BudgetExceeded(
        "no witness among chains of up to three pool faces; larger chains untested"
    )


# ---------------------------------------------------------------------------
# Cohomology-class decisions.

@dataclass
class CocycleClassReport:
    """Vanishing decisions for the induced quotient-group cocycle."""

    quotient_size: int
    phi_per_coset: dict[int, np.ndarray]
    is_coboundary_h1: bool | None = None
    h1_witness: np.ndarray | None = None
    sigma_vanishes: bool | None = None
    sigma_witness_chi: dict[int, np.ndarray] | None = None
    chi_realized_in_edge_fixers: bool | None = None


def _quotient_view(group: SymmetryGroup, cx: ObservableComplex,
                   state: StateData | None, section, q_cap: int):
    if group.quotient_size > q_cap:
        raise QTooLarge(f"quotient has {group.quotient_size} cosets (cap {q_cap})")
    if state is not None:
        validate_state_symmetry(group, cx, state)
    faces, rows, kept = _boundary_struct(cx, state)
    edges = sorted(kept) if kept is not None else list(range(cx.edge_count))
    col_of = {e: c for c, e in enumerate(edges)}
    B = np.zeros((len(faces), len(edges)), dtype=np.int64)
    for r, row in enumerate(rows):
        for e, c in row.items():
            B[r, col_of[e]] = c % cx.d
    if isinstance(section, dict):
        sec = [section.get(q, group.section[q]) for q in range(group.quotient_size)]
    elif section is None:
        sec = list(group.section)
    else:
        sec = list(section)
    for q, i in enumerate(sec):
        if group.coset_of[i] != q:
            raise InvalidInput("section entry lies in the wrong coset")
    perms = []
    phis = []
    for q in range(group.quotient_size):
        el = group.elements[sec[q]]
        perms.append(np.array([col_of[el.perm[e]] for e in edges], dtype=np.int64))
        phis.append(np.array([el.phi[e] for e in edges], dtype=np.int64))
    return edges, col_of, B, sec, perms, phis


def _assert_quotient_cocycle(group, B, perms, phis, d):
    """phi_theta(pq) and phi_theta(q) + phi_theta(p) o q agree on boundaries."""
    nq = group.quotient_size
    for p in range(nq):
        for q in range(nq):
            pq = group.q_mult(p, q)
            vec = (phis[q] + phis[p][perms[q]] - phis[pq]) % d
            assert not ((B @ vec) % d).any(), "quotient phase data is not a cocycle"


def h1_class(group: SymmetryGroup, cx: ObservableComplex,
             state: StateData | None = None, section=None,
             q_cap: int = 64) -> CocycleClassReport:
    """Decide whether the quotient cocycle is trivial in first cohomology.

    Triviality means some potential s with phi_theta(q) evaluated on any
    boundary equals s(q . boundary) - s(boundary); the solver works over
    the full edge cochain group, which surjects onto the boundary dual.
    """
    d = cx.d
    edges, col_of, B, sec, perms, phis = _quotient_view(group, cx, state, section, q_cap)
    _assert_quotient_cocycle(group, B, perms, phis, d)

    blocks = []
    rhs_parts = []
    for q in range(group.quotient_size):
        if group.coset_perms[q] == identity_element(cx).perm:
            continue
        Bq = np.zeros_like(B)
        Bq[:, perms[q]] = B
        blocks.append((Bq - B) % d)
        rhs_parts.append((B @ phis[q]) % d)
    report = CocycleClassReport(group.quotient_size,
                                {q: phis[q].copy() for q in range(group.quotient_size)})
    if not blocks:
        report.is_coboundary_h1 = True
        report.h1_witness = np.zeros(len(edges), dtype=np.int64)
        return report
    A = ModMatrix.from_dense(np.vstack(blocks), d)
    res = modlinalg.solve(A, np.concatenate(rhs_parts), minimize_certificate=False)
    report.is_coboundary_h1 = res.feasible
    if res.feasible:
        report.h1_witness = res.solution
    return report


def _v_generators(B: np.ndarray, d: int) -> list[np.ndarray]:
    """Generators of the cochains vanishing on all boundaries."""
    return modlinalg.kernel(ModMatrix.from_dense(B, d))


def sigma_class(group: SymmetryGroup, cx: ObservableComplex,
                state: StateData | None = None, section=None,
                q_cap: int = 64) -> CocycleClassReport:
    """Decide whether the connecting-map image of the class vanishes.

    The lifted cocycle's group coboundary lands in the module V of
    cochains vanishing on boundaries; sigma vanishes iff that 2-cocycle is
    the coboundary of some chi : Q -> V.  Generators realized by
    edge-fixing group elements are tried first so that a vanishing witness
    can feed the section-splitting construction whenever possible.
    """
    d = cx.d
    edges, col_of, B, sec, perms, phis = _quotient_view(group, cx, state, section, q_cap)
    _assert_quotient_cocycle(group, B, perms, phis, d)
    report = h1_class(group, cx, state, section, q_cap)

    nq = group.quotient_size
    ident_q = next(q for q in range(nq)
                   if group.coset_perms[q] == identity_element(cx).perm)
    # Group-coboundary of the lift, evaluated per coset pair.
    psi = {}
    for p in range(nq):
        for q in range(nq):
            pq = group.q_mult(p, q)
            vec = (phis[q] + phis[p][perms[q]] - phis[pq]) % d
            assert not ((B @ vec) % d).any(), "lift coboundary escaped V"
            psi[(p, q)] = vec

    others = [q for q in range(nq) if q != ident_q]
    if not others:
        report.sigma_vanishes = True
        report.sigma_witness_chi = {}
        report.chi_realized_in_edge_fixers = True
        return report

    fixer_gens = []
    seen = set()
    for i in group.n_indices:
        v = np.array([group.elements[i].phi[e] for e in edges], dtype=np.int64)
        t = tuple(v.tolist())
        if any(v) and t not in seen:
            seen.add(t)
            fixer_gens.append(v)

    def try_solve(gens: list[np.ndarray]):
        if not gens:
            gens = [np.zeros(len(edges), dtype=np.int64)]
        G = np.stack(gens)  # (#gens, |edges|)
        ncols = len(others) * len(gens)
        col_base = {q: t * len(gens) for t, q in enumerate(others)}
        rows = []
        rhs = []
        for p in others:
            for q in others:
                pq = group.q_mult(p, q)
                block = np.zeros((len(edges), ncols), dtype=np.int64)
                block[:, col_base[q]:col_base[q] + len(gens)] += G.T
                block[:, col_base[p]:col_base[p] + len(gens)] += G.T[perms[q]]
                if pq != ident_q:
                    block[:, col_base[pq]:col_base[pq] + len(gens)] -= G.T
                rows.append(block % d)
                rhs.append((-psi[(p, q)]) % d)
        A = ModMatrix.from_dense(np.vstack(rows), d)
        res = modlinalg.solve(A, np.concatenate(rhs), minimize_certificate=False)
        if not res.feasible:
            return None
        chi = {}
        for q in others:
            c = res.solution[col_base[q]:col_base[q] + len(gens)]
            chi[q] = (c @ G) % d
        chi[ident_q] = np.zeros(len(edges), dtype=np.int64)
        return chi

    chi = try_solve(fixer_gens)
    if chi is not None:
        report.sigma_vanishes = True
        report.sigma_witness_chi = chi
        report.chi_realized_in_edge_fixers = True
    else:
        chi = try_solve(_v_generators(B, d))
        report.sigma_vanishes = chi is not None
        report.sigma_witness_chi = chi
        report.chi_realized_in_edge_fixers = False if chi is not None else None
    if report.is_coboundary_h1:
        assert report.sigma_vanishes, "exactness violated: trivial class with nonzero image"
    return report


def split_section(group: SymmetryGroup, chi: dict[int, np.ndarray],
                  cx: ObservableComplex | None = None,
                  state: StateData | None = None) -> dict[int, SymmetryElement]:
    """Turn a vanishing witness chi into a homomorphic section of G -> Q.

    chi maps each coset to an edge cochain; the element-wise corrected
    section theta(q) * n_q with phi(n_q) = chi(q) multiplies exactly like
    Q when chi satisfies the defining coboundary equation.
    """
    cx = cx or group.complex
    d = cx.d
    edges, col_of, B, sec, perms, phis = _quotient_view(group, cx, state, None, 10**9)
    nq = group.quotient_size
    ident_q = next(q for q in range(nq)
                   if group.coset_perms[q] == identity_element(cx).perm)

    def chi_vec(q):
        if q == ident_q:
            return np.zeros(len(edges), dtype=np.int64)
        v = chi.get(q)
        if v is None:
            raise NotACochainSolution(f"chi is missing coset {q}")
        return np.asarray(v, dtype=np.int64) % d

    for p in range(nq):
        for q in range(nq):
            pq = group.q_mult(p, q)
            lift_cob = (phis[q] + phis[p][perms[q]] - phis[pq]) % d
            chi_cob = (chi_vec(q) + chi_vec(p)[perms[q]] - chi_vec(pq)) % d
            if ((lift_cob + chi_cob) % d).any():
                raise NotACochainSolution(
                    "chi does not cancel the lift's group coboundary"
                )

    full = np.zeros(cx.edge_count, dtype=np.int64)
    hat: dict[int, SymmetryElement] = {}
    for q in range(nq):
        vec = chi_vec(q)
        full[:] = 0
        for c, e in enumerate(edges):
            full[e] = vec[c]
        n_idx = group.edge_fixer_with_phi(full)
        if n_idx is None:
            raise NoSuchN(f"no edge-fixing element realizes chi for coset {q}")
        hat[q] = compose(group.elements[sec[q]], group.elements[n_idx], d,
                         name=f"theta-hat({q})")

    for p in range(nq):
        for q in range(nq):
            prod = compose(hat[p], hat[q], d)
            if prod.key() != hat[group.q_mult(p, q)].key():
                raise NotACochainSolution("corrected section fails to multiply like Q")
    return hat


def random_section(group: SymmetryGroup, rng: np.random.Generator) -> list[int]:
    """Random coset representatives (for section-independence tests)."""
    return [int(rng.choice(members)) for members in group.cosets]
