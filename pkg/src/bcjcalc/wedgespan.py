"""Wedge square of the degree-<=2 piece and the abelian-cycle image search.

A commuting pair of twists f, g maps to sigma(f) ^ sigma(g) in the wedge
square; commutation is certified either by machine-checked handle-support
disjointness or by an "asserted:" provenance string from the catalog of
known families.  The search folds the images of all enumerated cycles into a
GF(2) span and reports which non-index-matched basis elements (the subspace
W) are still missing.  Asserted families are kept out of that check by
default so machine-verified and asserted conclusions never mix.

Support-disjoint cycles alone cannot span W: each of their image slots pairs
two monomials on disjoint handle sets, so the slots whose monomials share a
handle (orbit classes IV and VI) are unreachable by construction.  The image
of the induced map is however closed under the symplectic action - acting on
a cycle's curves by a mapping class yields another commuting pair whose
image is the matrix translate of the original - so the search saturates its
span under substitution by a fixed set of transvections.  Every vector added
this way is the image of a conjugated cycle; soundness rests on the
equivariance of the twist formulas, which its own test suite verifies.

Wedge coordinates use the triangular flattening of unordered pairs (i < j)
of basis indices: slot(i, j) = i(2d - i - 1)/2 + (j - i - 1), with d the
basis size.  All persisted reports reference these slot numbers, so the
flattening is frozen.

Only genus-1 spines feed the enumeration; that the saturated span covers W
is an empirical finding re-established per genus by the searches themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from time import perf_counter
from typing import Iterator, NamedTuple, Optional, Sequence

from .bcjmap import BPMap, Descriptor, SeparatingTwist, is_index_matched, sigma
from .boolring import BoolMonomial, BoolPoly, b2_basis, require_degree
from .errors import DisjointnessError, FiltrationError, GenusMismatchError
from .gf2core import BitVec, SpanBasis
from .surface import HClass, SubsurfaceBasis, check_genus


ROMAN = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI")


def wedge_dim(d: int) -> int:
    return d * (d - 1) // 2


def pair_index(d: int, i: int, j: int) -> int:
    """Slot of the unordered pair (i < j) in the triangular flattening."""
    if not 0 <= i < j < d:
        raise ValueError(f"bad pair ({i},{j}) for basis size {d}")
    return i * (2 * d - i - 1) // 2 + (j - i - 1)


@lru_cache(maxsize=None)
def _row_offsets(d: int) -> tuple[int, ...]:
    return tuple(i * (2 * d - i - 1) // 2 for i in range(d))


@lru_cache(maxsize=None)
def _slot_pairs(d: int) -> tuple[tuple[int, int], ...]:
    out = []
    for i in range(d):
        for j in range(i + 1, d):
            out.append((i, j))
    return tuple(out)


def slot_pair(d: int, slot: int) -> tuple[int, int]:
    return _slot_pairs(d)[slot]


@dataclass(frozen=True, slots=True)
class WedgeElem:
    """Element of the wedge square, indexed by unordered basis pairs."""

    genus: int
    coords: BitVec

    def __post_init__(self):
        d = b2_basis(self.genus).size
        if self.coords.length != wedge_dim(d):
            raise GenusMismatchError(
                f"wedge vector has length {self.coords.length}, "
                f"expected {wedge_dim(d)} for genus {self.genus}"
            )

    @classmethod
    def zero(cls, genus: int) -> "WedgeElem":
        d = b2_basis(genus).size
        return cls(genus, BitVec(wedge_dim(d)))

    @classmethod
    def from_slots(cls, genus: int, slots: Sequence[int]) -> "WedgeElem":
        d = b2_basis(genus).size
        return cls(genus, BitVec.from_indices(wedge_dim(d), slots))

    def __add__(self, other: "WedgeElem") -> "WedgeElem":
        if self.genus != other.genus:
            raise GenusMismatchError("cannot add wedge elements across genera")
        return WedgeElem(self.genus, self.coords ^ other.coords)

    def __bool__(self) -> bool:
        return bool(self.coords)

    def slots(self) -> tuple[int, ...]:
        return self.coords.support()

    def __str__(self) -> str:
        if not self.coords:
            return "0"
        return " + ".join(
            render_slot(self.genus, s) for s in self.slots()
        )


def render_slot(genus: int, slot: int) -> str:
    basis = b2_basis(genus)
    i, j = slot_pair(basis.size, slot)
    return f"{basis.monomial(i)} ^ {basis.monomial(j)}"


def wedge(p: BoolPoly, q: BoolPoly) -> WedgeElem:
    """Bilinear alternating product of two degree-<=2 polynomials."""
    if p.genus != q.genus:
        raise GenusMismatchError("wedge factors have different genus")
    require_degree(p, 2)
    require_degree(q, 2)
    basis = b2_basis(p.genus)
    d = basis.size
    index = basis.index_of_mask
    offs = _row_offsets(d)
    bits = 0
    for mp in p.masks:
        ip = index[mp]
        for mq in q.masks:
            iq = index[mq]
            if ip == iq:
                continue
            i, j = (ip, iq) if ip < iq else (iq, ip)
            bits ^= 1 << (offs[i] + j - i - 1)
    return WedgeElem(p.genus, BitVec(wedge_dim(d), bits))


# -- abelian cycles -----------------------------------------------------------


SUPPORT_DISJOINT = "support-disjoint"


@dataclass(frozen=True, slots=True)
class AbelianCycle:
    """Two curve descriptors plus a certificate that the twists commute."""

    first: Descriptor
    second: Descriptor
    certificate: str = SUPPORT_DISJOINT
    label: str = ""

    @property
    def genus(self) -> int:
        return self.first.genus

    def validate_certificate(self) -> None:
        if self.first.genus != self.second.genus:
            raise GenusMismatchError("cycle descriptors have different genus")
        if self.certificate == SUPPORT_DISJOINT:
            overlap = self.first.support() & self.second.support()
            if overlap:
                raise DisjointnessError(
                    f"descriptors share handles {sorted(overlap)}"
                )
        elif not self.certificate.startswith("asserted:"):
            raise ValueError(f"unknown certificate {self.certificate!r}")

    def swapped(self) -> "AbelianCycle":
        return AbelianCycle(self.second, self.first, self.certificate, self.label)


def cycle_image(c: AbelianCycle) -> WedgeElem:
    """sigma(first) ^ sigma(second); both factors must have degree <= 2."""
    c.validate_certificate()
    p, q = sigma(c.first), sigma(c.second)
    if p.degree() > 2 or q.degree() > 2:
        raise FiltrationError(
            "a degree-3 sigma value (bounding-pair factor) has no wedge image"
        )
    return wedge(p, q)


# -- spine and cycle enumeration ---------------------------------------------


@lru_cache(maxsize=None)
def _local_spines(s: int) -> tuple[tuple[int, int], ...]:
    """Ordered pairs (x, y) on s handles, x.y = 1, using all s handles.

    Local packing: bits 0..s-1 are a-coordinates, bits s..2s-1 are
    b-coordinates.
    """
    full = (1 << s) - 1
    out = []
    for x in range(1 << (2 * s)):
        xa, xb = x & full, x >> s
        for y in range(1 << (2 * s)):
            ya, yb = y & full, y >> s
            if ((xa & yb).bit_count() + (xb & ya).bit_count()) & 1 == 0:
                continue
            u = x | y
            if ((u & full) | (u >> s)) == full:
                out.append((x, y))
    return tuple(out)


def _to_global(genus: int, handles: tuple[int, ...], local: int) -> int:
    s = len(handles)
    bits = 0
    for k, h in enumerate(handles):
        if (local >> k) & 1:
            bits |= 1 << (h - 1)
        if (local >> (s + k)) & 1:
            bits |= 1 << (genus + h - 1)
    return bits


class _Desc(NamedTuple):
    descriptor: Descriptor
    sigma: BoolPoly
    sigkey: tuple[int, ...]       # sorted monomial masks of sigma
    sigslots: tuple[int, ...]     # sorted basis indices of sigma
    label: str


@lru_cache(maxsize=None)
def _descriptors_for_set(
    genus: int, handles: tuple[int, ...], include_bp: bool
) -> tuple[_Desc, ...]:
    """Deterministic descriptor list whose support is exactly `handles`."""
    basis = b2_basis(genus)
    out = []

    def pack(descriptor, sig, label):
        key = tuple(sorted(sig.masks))
        slots = tuple(sorted(basis.index_of_mask[m] for m in sig.masks))
        out.append(_Desc(descriptor, sig, key, slots, label))

    s = len(handles)
    for x_local, y_local in _local_spines(s):
        x = HClass(genus, _to_global(genus, handles, x_local))
        y = HClass(genus, _to_global(genus, handles, y_local))
        twist = SeparatingTwist(
            SubsurfaceBasis(genus, ((x, y),)), label=f"sep({x},{y})"
        )
        pack(twist, sigma(twist), twist.label)

    if include_bp:
        full = (1 << s) - 1
        for x_local in range(1 << (2 * s)):
            for y_local in range(1 << (2 * s)):
                xa, xb = x_local & full, x_local >> s
                ya, yb = y_local & full, y_local >> s
                if ((xa & yb).bit_count() + (xb & ya).bit_count()) & 1 == 0:
                    continue
                for c_local in range(1, 1 << (2 * s)):
                    u = x_local | y_local | c_local
                    if ((u & full) | (u >> s)) != full:
                        continue
                    ca, cb = c_local & full, c_local >> s
                    if ((ca & yb).bit_count() + (cb & ya).bit_count()) & 1:
                        continue
                    if ((ca & xb).bit_count() + (cb & xa).bit_count()) & 1:
                        continue
                    x = HClass(genus, _to_global(genus, handles, x_local))
                    y = HClass(genus, _to_global(genus, handles, y_local))
                    C = HClass(genus, _to_global(genus, handles, c_local))
                    bp = BPMap(
                        SubsurfaceBasis(genus, ((x, y),)),
                        C,
                        label=f"bp({x},{y};C={C})",
                    )
                    sig = sigma(bp)
                    if sig.degree() > 2:
                        continue
                    pack(bp, sig, bp.label)

    return tuple(out)


def _support_sets(genus: int, max_support: int) -> list[tuple[int, ...]]:
    sets = []
    for size in range(1, min(max_support, genus) + 1):
        sets.extend(combinations(range(1, genus + 1), size))
    sets.sort(key=lambda S: (len(S), S))
    return sets


def _descriptor_pairs(
    genus: int, max_support: int, include_bp: bool
) -> Iterator[tuple[_Desc, _Desc]]:
    """Deterministic stream of support-disjoint descriptor pairs.

    Each unordered pair is emitted exactly once: support sets are scanned in
    (size, lex) order and only pairs of distinct sets are combined, so the
    swap-symmetric duplicate never appears.
    """
    sets = _support_sets(genus, max_support)
    lists = [_descriptors_for_set(genus, S, include_bp) for S in sets]
    for k1, S1 in enumerate(sets):
        for k2 in range(k1 + 1, len(sets)):
            S2 = sets[k2]
            if set(S1) & set(S2):
                continue
            for d1 in lists[k1]:
                for d2 in lists[k2]:
                    yield d1, d2


def enumerate_spine_cycles(
    genus: int, max_support_per_spine: int, include_bp: bool = False
) -> Iterator[AbelianCycle]:
    """Deterministic stream of support-disjoint abelian cycles.

    Separating descriptors are genus-1 spines (x, y) with x.y = 1 using at
    most `max_support_per_spine` handles; optional bounding-pair descriptors
    are kept only when their sigma value has degree <= 2.  Two runs with
    equal parameters emit identical sequences.

    A spine's sigma always has a nonzero quadratic part (a mod-2 class is
    determined by its variable support, so the two factors never share one),
    and in practice the bounding-pair factor never cancels it: no bp
    descriptor survives the degree filter at the support sizes enumerated
    here, making include_bp a no-op for the stream.  The flag is kept for
    the contract and for any future descriptor shapes that do pass.
    """
    check_genus(genus)
    if max_support_per_spine < 1:
        raise ValueError("max_support_per_spine must be >= 1")
    for d1, d2 in _descriptor_pairs(genus, max_support_per_spine, include_bp):
        yield AbelianCycle(
            d1.descriptor,
            d2.descriptor,
            SUPPORT_DISJOINT,
            label=f"{d1.label} & {d2.label}",
        )


# -- dimension bookkeeping ----------------------------------------------------


def cubic_type_count(genus: int) -> int:
    """Count of matched pairs {a_i x, b_i y} with x, y quadratic partners of
    pairwise distinct index; the only source of cubic growth in dim IM."""
    return genus * (2 * genus - 2) * (2 * genus - 3)


def dims(genus: int) -> dict:
    """Exact dimension table at one genus; dim IM by exhaustive pair scan."""
    g = check_genus(genus)
    basis = b2_basis(g)
    d = basis.size
    total = wedge_dim(d)
    matched = 0
    mons = basis.monomials
    for i in range(d):
        for j in range(i + 1, d):
            if is_index_matched(mons[i], mons[j]):
                matched += 1
    return {
        "g": g,
        "d": d,
        "dim_wedge": total,
        "dim_im": matched,
        "dim_w": total - matched,
        "cubic_type": cubic_type_count(g),
        "cubic_residual": matched - cubic_type_count(g),
    }


# -- orbit classification -----------------------------------------------------


def classify_pair(m1: BoolMonomial, m2: BoolMonomial) -> Optional[str]:
    """Structural class I..XI of a wedge basis pair; None if index-matched.

    The classes are the equivalence classes of non-matched basis pairs under
    handle swaps (a_i <-> b_i) and handle transpositions, distinguished by
    the index pattern of the two monomials.
    """
    if is_index_matched(m1, m2):
        return None
    g = m1.genus
    amask = (1 << g) - 1

    def handles(m: BoolMonomial) -> int:
        return (m.mask & amask) | (m.mask >> g)

    def is_diagonal(m: BoolMonomial) -> bool:
        return m.degree == 2 and handles(m).bit_count() == 1

    x, y = sorted((m1, m2), key=lambda m: -m.degree)
    dx, dy = x.degree, y.degree
    if (dx, dy) == (2, 2):
        diag_x, diag_y = is_diagonal(x), is_diagonal(y)
        if diag_x and diag_y:
            return "I"
        if diag_x or diag_y:
            return "II"
        shared = handles(x) & handles(y)
        return "III" if shared == 0 else "IV"
    if (dx, dy) == (2, 1):
        if is_diagonal(x):
            return "V"
        return "VI" if handles(x) & handles(y) else "VII"
    if (dx, dy) == (2, 0):
        return "VIII" if is_diagonal(x) else "IX"
    if (dx, dy) == (1, 1):
        return "X"
    if (dx, dy) == (1, 0):
        return "XI"
    raise AssertionError(f"unclassifiable degrees {(dx, dy)}")


@lru_cache(maxsize=None)
def _slot_labels(genus: int) -> tuple[Optional[str], ...]:
    """Class label per wedge slot; None marks index-matched slots."""
    basis = b2_basis(genus)
    d = basis.size
    labels: list[Optional[str]] = []
    for i in range(d):
        for j in range(i + 1, d):
            labels.append(classify_pair(basis.monomial(i), basis.monomial(j)))
    return tuple(labels)


def _variable_permutations(genus: int) -> list[list[int]]:
    """The generator maps as permutations of variable indices: one swap per
    handle and one transposition per handle pair."""
    g = genus
    perms = []
    for i in range(g):
        p = list(range(2 * g))
        p[i], p[g + i] = p[g + i], p[i]
        perms.append(p)
    for i in range(g):
        for j in range(i + 1, g):
            p = list(range(2 * g))
            p[i], p[j] = p[j], p[i]
            p[g + i], p[g + j] = p[g + j], p[g + i]
            perms.append(p)
    return perms


def _permute_mask(mask: int, perm: list[int]) -> int:
    out = 0
    m = mask
    while m:
        low = m & -m
        out |= 1 << perm[low.bit_length() - 1]
        m ^= low
    return out


@dataclass
class OrbitReport:
    """Partition of the non-index-matched wedge basis under the generator
    maps, with structural labels."""

    genus: int
    classes: dict[str, list[int]]
    representatives: dict[str, str]
    errors: list[str]

    @property
    def n_classes(self) -> int:
        return len(self.classes)


def orbit_classes(genus: int) -> OrbitReport:
    """Connected components of the non-matched wedge basis under handle
    swaps and transpositions, labelled by their index pattern."""
    g = check_genus(genus)
    basis = b2_basis(g)
    d = basis.size
    labels = _slot_labels(g)
    nslots = wedge_dim(d)

    parent = list(range(nslots))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    offs = _row_offsets(d)
    index = basis.index_of_mask
    for perm in _variable_permutations(g):
        mon_image = [index[_permute_mask(basis.monomial(k).mask, perm)] for k in range(d)]
        for slot in range(nslots):
            if labels[slot] is None:
                continue
            i, j = slot_pair(d, slot)
            pi, pj = mon_image[i], mon_image[j]
            if pi > pj:
                pi, pj = pj, pi
            union(slot, offs[pi] + pj - pi - 1)

    components: dict[int, list[int]] = {}
    for slot in range(nslots):
        if labels[slot] is None:
            continue
        components.setdefault(find(slot), []).append(slot)

    classes: dict[str, list[int]] = {}
    representatives: dict[str, str] = {}
    errors: list[str] = []
    for slots in components.values():
        slots.sort()
        seen = {labels[s] for s in slots}
        if len(seen) != 1:
            errors.append(
                f"component of {render_slot(g, slots[0])} mixes patterns {sorted(seen)}"
            )
            continue
        lab = next(iter(seen))
        if lab in classes:
            errors.append(f"pattern {lab} splits into several components")
            continue
        classes[lab] = slots
        representatives[lab] = render_slot(g, slots[0])
    return OrbitReport(g, classes, representatives, errors)


# -- asserted families --------------------------------------------------------


FAMILY_TWO_INDEX = "asserted:matched-pair-family-2idx"
FAMILY_FOUR_INDEX = "asserted:matched-pair-family-4idx"


@dataclass(frozen=True, slots=True)
class FamilyElem:
    elem: WedgeElem
    provenance: str
    indices: tuple[int, ...]


@dataclass
class FamilyCatalog:
    genus: int
    elements: list[FamilyElem]
    warnings: list[str]

    def __iter__(self):
        return iter(self.elements)


def asserted_families(genus: int) -> FamilyCatalog:
    """Catalogued sums of two index-matched basis slots known to lie in the
    cycle image; carried with "asserted:" provenance and excluded from
    machine-verified coverage claims.

    Two-index family (i != j):  a_i*b_i ^ a_i*b_j  +  a_j*b_j ^ a_i*b_j.
    Four-index family (i, j, k, l distinct, needs genus >= 4):
    a_i*b_j ^ a_k*b_i  +  a_l*b_j ^ a_k*b_l.
    """
    g = check_genus(genus)
    basis = b2_basis(g)
    d = basis.size
    index = basis.index_of_mask
    offs = _row_offsets(d)

    def slot_of(maskA: int, maskB: int) -> int:
        i, j = index[maskA], index[maskB]
        if i > j:
            i, j = j, i
        return offs[i] + j - i - 1

    def av(i: int) -> int:
        return 1 << (i - 1)

    def bv(i: int) -> int:
        return 1 << (g + i - 1)

    elements: list[FamilyElem] = []
    warnings: list[str] = []
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            if i == j:
                continue
            s1 = slot_of(av(i) | bv(i), av(i) | bv(j))
            s2 = slot_of(av(j) | bv(j), av(i) | bv(j))
            elements.append(
                FamilyElem(
                    WedgeElem.from_slots(g, (s1, s2)), FAMILY_TWO_INDEX, (i, j)
                )
            )
    if g < 4:
        warnings.append(
            f"four-index family needs four distinct handles; empty at genus {g}"
        )
    else:
        for i in range(1, g + 1):
            for j in range(1, g + 1):
                for k in range(1, g + 1):
                    for l in range(1, g + 1):
                        if len({i, j, k, l}) != 4:
                            continue
                        s1 = slot_of(av(i) | bv(j), av(k) | bv(i))
                        s2 = slot_of(av(l) | bv(j), av(k) | bv(l))
                        elements.append(
                            FamilyElem(
                                WedgeElem.from_slots(g, (s1, s2)),
                                FAMILY_FOUR_INDEX,
                                (i, j, k, l),
                            )
                        )
    return FamilyCatalog(g, elements, warnings)


def four_index_family_span_claim(genus: int) -> int:
    """Dimension asserted for the span of the four-index family's orbit."""
    return (genus - 1) * (2 * genus - 2) * (2 * genus - 3)


# -- the symplectic action on the wedge square ---------------------------------


@lru_cache(maxsize=None)
def closure_generators(genus: int) -> tuple:
    """Transvections by every class with at most two nonzero coordinates.

    Any subset of symplectic matrices gives a sound saturation (translates of
    images are images of conjugated cycles); this set is small and rich
    enough in practice to reach every coverable slot.
    """
    from .surface import transvection

    g = check_genus(genus)
    vs = [1 << k for k in range(2 * g)]
    vs += [
        (1 << i) | (1 << j) for i, j in combinations(range(2 * g), 2)
    ]
    return tuple(transvection(HClass(g, v)) for v in vs)


@lru_cache(maxsize=None)
def _wedge_action_table(genus: int, M) -> tuple[int, ...]:
    """Per-slot image bits of the linear action p ^ q -> Mp ^ Mq."""
    from .boolring import substitute_sp

    basis = b2_basis(genus)
    d = basis.size
    offs = _row_offsets(d)
    mon_images = []
    for k in range(d):
        poly = substitute_sp(M, BoolPoly(genus, (basis.monomial(k).mask,)))
        mon_images.append(
            tuple(sorted(basis.index_of_mask[m] for m in poly.masks))
        )
    table = []
    for i in range(d):
        for j in range(i + 1, d):
            bits = 0
            for ip in mon_images[i]:
                for iq in mon_images[j]:
                    if ip == iq:
                        continue
                    x, y = (ip, iq) if ip < iq else (iq, ip)
                    bits ^= 1 << (offs[x] + y - x - 1)
            table.append(bits)
    return tuple(table)


def _apply_table(table: Sequence[int], bits: int) -> int:
    out = 0
    b = bits
    while b:
        low = b & -b
        out ^= table[low.bit_length() - 1]
        b ^= low
    return out


def wedge_translate(M, w: WedgeElem) -> WedgeElem:
    """Image of a wedge vector under the symplectic substitution action."""
    table = _wedge_action_table(w.genus, M)
    d = b2_basis(w.genus).size
    return WedgeElem(w.genus, BitVec(wedge_dim(d), _apply_table(table, w.coords.bits)))


def saturate_span(genus: int, span: SpanBasis) -> int:
    """Close a span under the transvection action; returns added rank."""
    tables = [_wedge_action_table(genus, M) for M in closure_generators(genus)]
    before = span.rank
    work = list(span.row_bits())
    while work:
        v = work.pop()
        for table in tables:
            img = _apply_table(table, v)
            if span.insert_bits(img):
                work.append(img)
    return span.rank - before


# -- the image search ---------------------------------------------------------


def _search_shard(
    genus: int,
    max_support: int,
    include_bp: bool,
    shard: int,
    n_shards: int,
) -> tuple[list[int], dict[str, tuple[int, str]], int, int]:
    """Process every n_shards-th descriptor pair; returns independent rows,
    per-class first hits keyed by global stream index, and counters."""
    basis = b2_basis(genus)
    d = basis.size
    offs = _row_offsets(d)
    labels = _slot_labels(genus)
    span = SpanBasis(wedge_dim(d))
    seen: set[tuple] = set()
    hits: dict[str, tuple[int, str]] = {}
    n_pairs = 0
    n_distinct = 0
    for idx, (d1, d2) in enumerate(
        _descriptor_pairs(genus, max_support, include_bp)
    ):
        if idx % n_shards != shard:
            continue
        n_pairs += 1
        key = (d1.sigkey, d2.sigkey) if d1.sigkey <= d2.sigkey else (d2.sigkey, d1.sigkey)
        if key in seen:
            continue
        seen.add(key)
        n_distinct += 1
        bits = 0
        for ip in d1.sigslots:
            for iq in d2.sigslots:
                if ip == iq:
                    continue
                i, j = (ip, iq) if ip < iq else (iq, ip)
                bits ^= 1 << (offs[i] + j - i - 1)
        if bits == 0:
            continue
        label = f"{d1.label} & {d2.label}"
        b = bits
        while b:
            low = b & -b
            slot = low.bit_length() - 1
            b ^= low
            lab = labels[slot]
            if lab is not None and (lab not in hits or idx < hits[lab][0]):
                hits[lab] = (idx, label)
        span.insert_bits(bits)
    return list(span.row_bits()), hits, n_pairs, n_distinct


def merge_shard_rows(length: int, shards: Sequence[Sequence[int]]) -> SpanBasis:
    """Merge worker spans by re-insertion; the span is order-independent."""
    span = SpanBasis(length)
    for rows in shards:
        for row in rows:
            span.insert_bits(row)
    return span


def image_rank_report(
    genus: int,
    max_support: int,
    include_families: bool = False,
    include_bp: bool = False,
    workers: int = 1,
    sp_closure: bool = True,
) -> dict:
    """Fold all enumerated cycle images into a span and report coverage.

    With `sp_closure` (the default) the span is saturated under the
    transvection action before coverage is judged; the raw pre-closure rank
    stays visible in the counts.  The report's `missing` list holds the
    non-index-matched basis elements outside the achieved span; an empty
    list certifies that the span covers the whole subspace W at this genus.
    With `include_families` the span additionally absorbs the asserted
    catalog (for cokernel studies) and the report is flagged as not purely
    machine-verified.
    """
    g = check_genus(genus)
    if max_support < 1:
        raise ValueError("max_support must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    t0 = perf_counter()
    basis = b2_basis(g)
    d = basis.size
    dm = dims(g)
    labels = _slot_labels(g)

    if workers == 1:
        rows, hits, n_pairs, n_distinct = _search_shard(
            g, max_support, include_bp, 0, 1
        )
        shard_rows = [rows]
    else:
        from concurrent.futures import ProcessPoolExecutor

        futures = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for shard in range(workers):
                futures.append(
                    pool.submit(
                        _search_shard, g, max_support, include_bp, shard, workers
                    )
                )
            results = [f.result() for f in futures]
        shard_rows = [r[0] for r in results]
        hits = {}
        for _, shard_hits, _, _ in results:
            for lab, (idx, lbl) in shard_hits.items():
                if lab not in hits or idx < hits[lab][0]:
                    hits[lab] = (idx, lbl)
        n_pairs = sum(r[2] for r in results)
        n_distinct = sum(r[3] for r in results)

    span = merge_shard_rows(wedge_dim(d), shard_rows)
    cycle_rank = span.rank

    closure_added = 0
    if sp_closure:
        closure_added = saturate_span(g, span)

    n_family = 0
    family_added = 0
    family_warnings: list[str] = []
    if include_families:
        catalog = asserted_families(g)
        family_warnings = catalog.warnings
        for fam in catalog:
            n_family += 1
            if span.insert_bits(fam.elem.coords.bits):
                family_added += 1
        if sp_closure:
            closure_added += saturate_span(g, span)

    missing = [
        {"slot": slot, "element": render_slot(g, slot), "class": labels[slot]}
        for slot in range(wedge_dim(d))
        if labels[slot] is not None and not span.contains_bits(1 << slot)
    ]
    incomplete = {m["class"] for m in missing}
    class_coverage = {}
    for lab in ROMAN:
        if not any(l == lab for l in labels):
            continue
        if lab in incomplete:
            class_coverage[lab] = "incomplete"
        elif lab in hits:
            class_coverage[lab] = "stream"
        else:
            class_coverage[lab] = "sp-closure"

    return {
        "genus": g,
        "parameters": {
            "max_support": max_support,
            "include_bp": include_bp,
            "include_families": include_families,
            "workers": workers,
            "sp_closure": sp_closure,
        },
        "rank": span.rank,
        "dims": dm,
        "codim": dm["dim_wedge"] - span.rank,
        "missing": missing,
        "coverage_complete": not missing,
        "orbit_hits": {
            lab: {"index": idx, "cycle": lbl}
            for lab, (idx, lbl) in sorted(hits.items())
        },
        "class_coverage": class_coverage,
        "counts": {
            "cycles": n_pairs,
            "distinct_images": n_distinct,
            "cycle_rank": cycle_rank,
            "closure_added_rank": closure_added,
            "family_elements": n_family,
            "family_added_rank": family_added,
        },
        "family_warnings": family_warnings,
        "machine_verified_only": not include_families,
        "elapsed": perf_counter() - t0,
    }
