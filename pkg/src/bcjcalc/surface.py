"""Fixed homology model of the genus-g surface with one boundary component.

Coordinates follow one convention everywhere: positions 0..g-1 hold the
a_1..a_g coefficients and positions g..2g-1 hold b_1..b_g.  Handles are
numbered 1..g.  ``HClass`` carries a mod-2 class, ``ZHClass`` an integral
one; the intersection form is the standard symplectic pairing a_i.b_i = 1
(antisymmetric over Z, symmetric mod 2).

Two modeling axioms are assumed, not checked: any mod-2 pair (x, y) with
x.y = 1 is realizable by a genus-1 spine on the standard surface, and spines
with disjoint handle supports admit disjoint representatives.  Handle-support
disjointness is therefore a sufficient, conservative criterion for disjoint
realization; cycles that would need overlapping supports must enter through
the asserted-family catalog instead.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import BasisError, DimensionError, GenusMismatchError, SpineError
from .gf2core import BitVec, F2Matrix, SpanBasis


def check_genus(g: int) -> int:
    if not isinstance(g, int) or g < 1:
        raise ValueError(f"genus must be a positive integer, got {g!r}")
    return g


def _check_same_genus(u, v) -> None:
    if u.genus != v.genus:
        raise GenusMismatchError(f"genus mismatch: {u.genus} vs {v.genus}")


@dataclass(frozen=True, slots=True)
class HClass:
    """Mod-2 first-homology class, packed into a length-2g bit vector."""

    genus: int
    bits: int = 0

    def __post_init__(self):
        check_genus(self.genus)
        if self.bits < 0 or self.bits >> (2 * self.genus):
            raise DimensionError("coordinates do not fit length 2g")

    @classmethod
    def from_coords(cls, genus: int, coords: Sequence[int]) -> "HClass":
        if len(coords) != 2 * genus:
            raise DimensionError(f"expected {2 * genus} coordinates")
        bits = 0
        for i, c in enumerate(coords):
            if c & 1:
                bits |= 1 << i
        return cls(genus, bits)

    def coords(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(2 * self.genus)]

    def vec(self) -> BitVec:
        return BitVec(2 * self.genus, self.bits)

    def __add__(self, other: "HClass") -> "HClass":
        _check_same_genus(self, other)
        return HClass(self.genus, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __str__(self) -> str:
        g = self.genus
        names = [f"a{i + 1}" for i in range(g)] + [f"b{i + 1}" for i in range(g)]
        terms = [names[i] for i in range(2 * g) if (self.bits >> i) & 1]
        return "+".join(terms) if terms else "0"


@dataclass(frozen=True, slots=True)
class ZHClass:
    """Integral first-homology class (same position convention)."""

    genus: int
    coords: tuple[int, ...] = ()

    def __post_init__(self):
        check_genus(self.genus)
        if len(self.coords) != 2 * self.genus:
            raise DimensionError(f"expected {2 * self.genus} coordinates")

    @classmethod
    def zero(cls, genus: int) -> "ZHClass":
        return cls(genus, (0,) * (2 * genus))

    @classmethod
    def from_coords(cls, genus: int, coords: Sequence[int]) -> "ZHClass":
        return cls(genus, tuple(int(c) for c in coords))

    def __add__(self, other: "ZHClass") -> "ZHClass":
        _check_same_genus(self, other)
        return ZHClass(self.genus, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "ZHClass":
        return ZHClass(self.genus, tuple(-c for c in self.coords))

    def scale(self, n: int) -> "ZHClass":
        return ZHClass(self.genus, tuple(n * c for c in self.coords))

    def mod2(self) -> HClass:
        bits = 0
        for i, c in enumerate(self.coords):
            if c & 1:
                bits |= 1 << i
        return HClass(self.genus, bits)

    def __bool__(self) -> bool:
        return any(self.coords)


def a(genus: int, i: int) -> HClass:
    """The basis class a_i (1-based handle index)."""
    check_genus(genus)
    if not 1 <= i <= genus:
        raise ValueError(f"handle index {i} out of range 1..{genus}")
    return HClass(genus, 1 << (i - 1))


def b(genus: int, i: int) -> HClass:
    """The basis class b_i (1-based handle index)."""
    check_genus(genus)
    if not 1 <= i <= genus:
        raise ValueError(f"handle index {i} out of range 1..{genus}")
    return HClass(genus, 1 << (genus + i - 1))


def za(genus: int, i: int) -> ZHClass:
    return ZHClass(genus, tuple(1 if k == i - 1 else 0 for k in range(2 * genus)))


def zb(genus: int, i: int) -> ZHClass:
    return ZHClass(genus, tuple(1 if k == genus + i - 1 else 0 for k in range(2 * genus)))


def intersect(u: Union[HClass, ZHClass], v: Union[HClass, ZHClass]) -> int:
    """Symplectic intersection u.v; mod 2 for HClass, signed for ZHClass.

    The pairing is a_i.b_i = 1 for every handle, all other basis products 0;
    over Z it is antisymmetric (b_i.a_i = -1).
    """
    if isinstance(u, HClass) and isinstance(v, HClass):
        _check_same_genus(u, v)
        g = u.genus
        mask = (1 << g) - 1
        ua, ub = u.bits & mask, u.bits >> g
        va, vb = v.bits & mask, v.bits >> g
        return ((ua & vb).bit_count() + (ub & va).bit_count()) & 1
    if isinstance(u, ZHClass) and isinstance(v, ZHClass):
        _check_same_genus(u, v)
        g = u.genus
        total = 0
        for i in range(g):
            total += u.coords[i] * v.coords[g + i] - u.coords[g + i] * v.coords[i]
        return total
    raise TypeError("intersect needs two HClass or two ZHClass arguments")


def support(u: Union[HClass, ZHClass]) -> frozenset[int]:
    """Handles (1-based) on which u has a nonzero a- or b-coordinate."""
    g = u.genus
    if isinstance(u, HClass):
        mask = (1 << g) - 1
        used = (u.bits & mask) | (u.bits >> g)
        return frozenset(i + 1 for i in range(g) if (used >> i) & 1)
    return frozenset(
        i + 1 for i in range(g) if u.coords[i] != 0 or u.coords[g + i] != 0
    )


@dataclass(frozen=True, slots=True)
class Spine:
    """A pair of classes meeting once; models a genus-1 separating curve."""

    x: HClass
    y: HClass

    def __post_init__(self):
        _check_same_genus(self.x, self.y)
        if intersect(self.x, self.y) != 1:
            raise SpineError(f"not a spine: ({self.x}).({self.y}) != 1")

    @property
    def genus(self) -> int:
        return self.x.genus

    def support(self) -> frozenset[int]:
        return support(self.x) | support(self.y)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True, slots=True)
class SpinePair:
    """Two spines declared as the data of a degree-2 abelian cycle."""

    spine1: Spine
    spine2: Spine
    label: str = ""

    def __post_init__(self):
        _check_same_genus(self.spine1.x, self.spine2.x)

    @property
    def genus(self) -> int:
        return self.spine1.genus

    @classmethod
    def disjointly_realized(cls, s1: Spine, s2: Spine, label: str = "") -> "SpinePair":
        """Construct only if the conservative disjointness criterion holds."""
        if not spines_disjointly_realizable(s1, s2):
            raise SpineError(
                f"spines {s1} and {s2} share handle support "
                f"{sorted(s1.support() & s2.support())}"
            )
        return cls(s1, s2, label)


def spines_disjointly_realizable(s1: Spine, s2: Spine) -> bool:
    """Sufficient criterion: the handle supports of the spines are disjoint."""
    _check_same_genus(s1.x, s2.x)
    return not (s1.support() & s2.support())


@dataclass(frozen=True, slots=True)
class SubsurfaceBasis:
    """Mod-2 symplectic basis (A_i, B_i) of a bounded subsurface."""

    genus: int
    pairs: tuple[tuple[HClass, HClass], ...] = ()

    def __post_init__(self):
        for A, B in self.pairs:
            if A.genus != self.genus or B.genus != self.genus:
                raise GenusMismatchError("basis entry has wrong genus")

    @property
    def h(self) -> int:
        """Genus of the subsurface the basis spans."""
        return len(self.pairs)

    def support(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for A, B in self.pairs:
            out |= support(A) | support(B)
        return out

    def rows(self) -> list[HClass]:
        return [c for pair in self.pairs for c in pair]

    def validate(self) -> None:
        msg = symplectic_violation(self)
        if msg is not None:
            raise BasisError(msg)

    @classmethod
    def standard(cls, genus: int, handles: Sequence[int]) -> "SubsurfaceBasis":
        return cls(genus, tuple((a(genus, i), b(genus, i)) for i in handles))


@dataclass(frozen=True, slots=True)
class ZSubsurfaceBasis:
    """Integral symplectic basis of a bounded subsurface."""

    genus: int
    pairs: tuple[tuple[ZHClass, ZHClass], ...] = ()

    def __post_init__(self):
        for A, B in self.pairs:
            if A.genus != self.genus or B.genus != self.genus:
                raise GenusMismatchError("basis entry has wrong genus")

    @property
    def h(self) -> int:
        return len(self.pairs)

    def mod2(self) -> SubsurfaceBasis:
        return SubsurfaceBasis(
            self.genus, tuple((A.mod2(), B.mod2()) for A, B in self.pairs)
        )

    def validate(self) -> None:
        msg = symplectic_violation(self)
        if msg is not None:
            raise BasisError(msg)

    @classmethod
    def standard(cls, genus: int, handles: Sequence[int]) -> "ZSubsurfaceBasis":
        return cls(genus, tuple((za(genus, i), zb(genus, i)) for i in handles))


def symplectic_violation(
    basis: Union[SubsurfaceBasis, ZSubsurfaceBasis],
) -> Optional[str]:
    """First violated intersection condition, or None if the basis is valid."""
    pairs = basis.pairs
    for i, (Ai, Bi) in enumerate(pairs):
        for j, (Aj, Bj) in enumerate(pairs):
            want = 1 if i == j else 0
            if intersect(Ai, Bj) != want:
                return f"A{i + 1}.B{j + 1} = {intersect(Ai, Bj)}, expected {want}"
            if j > i:
                if intersect(Ai, Aj) != 0:
                    return f"A{i + 1}.A{j + 1} = {intersect(Ai, Aj)}, expected 0"
                if intersect(Bi, Bj) != 0:
                    return f"B{i + 1}.B{j + 1} = {intersect(Bi, Bj)}, expected 0"
    return None


def is_symplectic_basis(basis: Union[SubsurfaceBasis, ZSubsurfaceBasis]) -> bool:
    return symplectic_violation(basis) is None


def random_symplectic_rebase(basis: SubsurfaceBasis, seed: int) -> SubsurfaceBasis:
    """New symplectic basis of the same mod-2 subspace, deterministic per seed.

    Applies a random sequence of elementary moves: swap A_i <-> B_i (sign-free
    mod 2), shear A_i <- A_i + B_i, the cross-pair move A_i <- A_i + A_j with
    its dual correction B_j <- B_j + B_i, and pair permutation.  Each move
    preserves both the symplectic conditions and the row span.
    """
    basis.validate()
    rng = random.Random(seed)
    pairs = [list(p) for p in basis.pairs]
    h = len(pairs)
    if h == 0:
        return basis
    n_moves = rng.randint(3 * h, 6 * h)
    for _ in range(n_moves):
        kind = rng.choice(("swap", "shear", "mix", "permute") if h > 1 else ("swap", "shear"))
        if kind == "swap":
            i = rng.randrange(h)
            pairs[i][0], pairs[i][1] = pairs[i][1], pairs[i][0]
        elif kind == "shear":
            i = rng.randrange(h)
            pairs[i][0] = pairs[i][0] + pairs[i][1]
        elif kind == "mix":
            i, j = rng.sample(range(h), 2)
            pairs[i][0] = pairs[i][0] + pairs[j][0]
            pairs[j][1] = pairs[j][1] + pairs[i][1]
        else:
            rng.shuffle(pairs)
    out = SubsurfaceBasis(basis.genus, tuple((p[0], p[1]) for p in pairs))
    out.validate()
    return out


def span_rank(classes: Iterable[HClass]) -> int:
    classes = list(classes)
    if not classes:
        return 0
    sb = SpanBasis(2 * classes[0].genus)
    for c in classes:
        sb.insert_bits(c.bits)
    return sb.rank


# -- the symplectic group mod 2 --------------------------------------------


def j_matrix(genus: int) -> F2Matrix:
    """Gram matrix of the mod-2 intersection form in the fixed basis."""
    g = check_genus(genus)
    cols = [0] * (2 * g)
    for i in range(g):
        cols[g + i] |= 1 << i      # e_{a_i} . e_{b_i} = 1
        cols[i] |= 1 << (g + i)    # symmetric mod 2
    return F2Matrix(2 * g, tuple(cols))


def is_symplectic(M: F2Matrix, genus: int) -> bool:
    """Check M^T J M = J over GF(2)."""
    if M.n != 2 * genus:
        return False
    J = j_matrix(genus)
    return M.transpose() @ J @ M == J


def transvection(v: HClass) -> F2Matrix:
    """The symplectic transvection x -> x + (x.v) v."""
    g = v.genus
    n = 2 * g
    cols = []
    for k in range(n):
        e = HClass(g, 1 << k)
        img = e.bits ^ (v.bits if intersect(e, v) else 0)
        cols.append(img)
    return F2Matrix(n, tuple(cols))


def handle_swap(genus: int, i: int) -> F2Matrix:
    """Exchange a_i and b_i, fixing everything else."""
    g = check_genus(genus)
    if not 1 <= i <= g:
        raise ValueError(f"handle index {i} out of range")
    cols = list(F2Matrix.identity(2 * g).cols)
    cols[i - 1], cols[g + i - 1] = cols[g + i - 1], cols[i - 1]
    return F2Matrix(2 * g, tuple(cols))


def handle_transposition(genus: int, i: int, j: int) -> F2Matrix:
    """Exchange handles i and j: a_i <-> a_j and b_i <-> b_j."""
    g = check_genus(genus)
    if i == j or not (1 <= i <= g and 1 <= j <= g):
        raise ValueError(f"bad handle pair ({i},{j})")
    cols = list(F2Matrix.identity(2 * g).cols)
    cols[i - 1], cols[j - 1] = cols[j - 1], cols[i - 1]
    cols[g + i - 1], cols[g + j - 1] = cols[g + j - 1], cols[g + i - 1]
    return F2Matrix(2 * g, tuple(cols))


def sp_transvection_generators(genus: int) -> list[F2Matrix]:
    """All transvections T_v, v != 0; they generate Sp(2g, 2)."""
    g = check_genus(genus)
    return [transvection(HClass(g, bits)) for bits in range(1, 1 << (2 * g))]


def random_sp_word(genus: int, rng: random.Random, length: int = 8) -> F2Matrix:
    """Product of `length` random nonzero transvections."""
    g = check_genus(genus)
    M = F2Matrix.identity(2 * g)
    for _ in range(length):
        v = HClass(g, rng.randrange(1, 1 << (2 * g)))
        M = transvection(v) @ M
    return M


def apply_matrix(M: F2Matrix, u: HClass) -> HClass:
    if M.n != 2 * u.genus:
        raise DimensionError("matrix size does not match class genus")
    return HClass(u.genus, M.mul_vec(u.bits))


def transform_basis(M: F2Matrix, basis: SubsurfaceBasis) -> SubsurfaceBasis:
    return SubsurfaceBasis(
        basis.genus,
        tuple((apply_matrix(M, A), apply_matrix(M, B)) for A, B in basis.pairs),
    )


# -- integral symplectic data ------------------------------------------------


def z_transvection_apply(v: ZHClass, x: ZHClass) -> ZHClass:
    """Integral symplectic transvection x -> x + (x.v) v."""
    return x + v.scale(intersect(x, v))


def random_z_symplectic_basis(
    genus: int,
    h: int,
    rng: random.Random,
    handles: Optional[Sequence[int]] = None,
    n_moves: int = 6,
    coeff_bound: int = 1,
) -> ZSubsurfaceBasis:
    """Random integrally symplectic basis of subsurface genus h.

    Built by applying random integral transvections to the standard basis on
    the chosen handles; transvection directions are supported on those same
    handles, so the result's handle support stays inside them.
    """
    g = check_genus(genus)
    if handles is None:
        handles = list(range(1, h + 1))
    if len(handles) != h:
        raise ValueError("need exactly h handles")
    rows = [
        [za(g, i) for i in handles],
        [zb(g, i) for i in handles],
    ]
    positions = [k - 1 for k in handles] + [g + k - 1 for k in handles]
    for _ in range(n_moves):
        coords = [0] * (2 * g)
        for p in positions:
            coords[p] = rng.randint(-coeff_bound, coeff_bound)
        v = ZHClass(g, tuple(coords))
        if not v:
            continue
        rows = [[z_transvection_apply(v, x) for x in r] for r in rows]
    out = ZSubsurfaceBasis(g, tuple(zip(rows[0], rows[1])))
    out.validate()
    return out


# -- JSON encoding -----------------------------------------------------------


def hclass_to_json(u: HClass) -> list[int]:
    return u.coords()


def hclass_from_json(genus: int, data: Sequence[int]) -> HClass:
    return HClass.from_coords(genus, data)


def zhclass_to_json(u: ZHClass) -> list[int]:
    return list(u.coords)


def zhclass_from_json(genus: int, data: Sequence[int]) -> ZHClass:
    return ZHClass.from_coords(genus, data)


def spinepair_to_json(sp: SpinePair) -> dict:
    return {
        "genus": sp.genus,
        "spine1": [sp.spine1.x.coords(), sp.spine1.y.coords()],
        "spine2": [sp.spine2.x.coords(), sp.spine2.y.coords()],
        "label": sp.label,
    }


def spinepair_from_json(data: dict) -> SpinePair:
    g = check_genus(data["genus"])
    s1 = Spine(
        HClass.from_coords(g, data["spine1"][0]),
        HClass.from_coords(g, data["spine1"][1]),
    )
    s2 = Spine(
        HClass.from_coords(g, data["spine2"][0]),
        HClass.from_coords(g, data["spine2"][1]),
    )
    return SpinePair(s1, s2, data.get("label", ""))


def basis_to_json(basis: Union[SubsurfaceBasis, ZSubsurfaceBasis]) -> dict:
    if isinstance(basis, SubsurfaceBasis):
        pairs = [[A.coords(), B.coords()] for A, B in basis.pairs]
    else:
        pairs = [[list(A.coords), list(B.coords)] for A, B in basis.pairs]
    return {"genus": basis.genus, "pairs": pairs}


def basis_from_json(data: dict) -> SubsurfaceBasis:
    g = check_genus(data["genus"])
    return SubsurfaceBasis(
        g,
        tuple(
            (HClass.from_coords(g, A), HClass.from_coords(g, B))
            for A, B in data["pairs"]
        ),
    )


def zbasis_from_json(data: dict) -> ZSubsurfaceBasis:
    g = check_genus(data["genus"])
    return ZSubsurfaceBasis(
        g,
        tuple(
            (ZHClass.from_coords(g, A), ZHClass.from_coords(g, B))
            for A, B in data["pairs"]
        ),
    )
