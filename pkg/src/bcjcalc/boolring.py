"""Square-free polynomial algebra over GF(2) on the 2g bar-variables.

The variables abar_1..abar_g, bbar_1..bbar_g are indexed 0..2g-1 with the
same position convention as the surface coordinates.  A monomial is a subset
of variables (bit mask; the empty mask is the constant 1), so squares never
arise by representation.  A polynomial is a set of monomials, presence
meaning coefficient 1.

The bar map sends a homology class c to the function "evaluate a self-linking
form at c".  It is not additive; its defect is exactly the intersection form:

    bar(u + v) = bar(u) + bar(v) + (u.v) * 1

Iterating that relation over a support S gives the closed form used here:
bar(sum_{k in S} e_k) = sum_{k in S} ebar_k + #{k < l in S : e_k.e_l = 1},
and in the fixed basis the pair count is just the number of handles whose
a- and b-variable both occur in S.  The closed form has no ordering
ambiguity and costs O(|S|) with bit tricks.

Substitution by a symplectic matrix M is the algebra endomorphism with
ebar_k -> bar(M e_k).  Under this pinned convention the composition law is

    substitute_sp(M2, substitute_sp(M1, p)) == substitute_sp(M2 @ M1, p)

i.e. variables travel through matrices in product order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import (
    DimensionError,
    FiltrationError,
    GenusMismatchError,
    MatrixError,
)
from .gf2core import F2Matrix
from .surface import HClass, check_genus, is_symplectic


def var_name(genus: int, v: int) -> str:
    return f"a{v + 1}" if v < genus else f"b{v - genus + 1}"


@dataclass(frozen=True, slots=True)
class BoolMonomial:
    """Square-free monomial: a subset of the 2g variables."""

    genus: int
    mask: int

    def __post_init__(self):
        check_genus(self.genus)
        if self.mask < 0 or self.mask >> (2 * self.genus):
            raise DimensionError("monomial mask uses variables beyond 2g")

    @property
    def degree(self) -> int:
        return self.mask.bit_count()

    def variables(self) -> tuple[int, ...]:
        out = []
        m = self.mask
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return tuple(out)

    def has_variable(self, v: int) -> bool:
        return bool((self.mask >> v) & 1)

    def sort_key(self) -> tuple:
        return (self.degree, self.variables())

    def __str__(self) -> str:
        if self.mask == 0:
            return "1"
        return "*".join(var_name(self.genus, v) for v in self.variables())


class BoolPoly:
    """Element of the square-free algebra; immutable set of monomial masks."""

    __slots__ = ("genus", "masks")

    def __init__(self, genus: int, masks: Iterable[int] = ()):
        check_genus(genus)
        fs = frozenset(masks)
        top = 1 << (2 * genus)
        for m in fs:
            if m < 0 or m >= top:
                raise DimensionError("monomial mask uses variables beyond 2g")
        object.__setattr__(self, "genus", genus)
        object.__setattr__(self, "masks", fs)

    def __setattr__(self, *args):
        raise AttributeError("BoolPoly is immutable")

    @classmethod
    def zero(cls, genus: int) -> "BoolPoly":
        return cls(genus)

    @classmethod
    def one(cls, genus: int) -> "BoolPoly":
        return cls(genus, (0,))

    @classmethod
    def variable(cls, genus: int, v: int) -> "BoolPoly":
        if not 0 <= v < 2 * genus:
            raise DimensionError(f"variable index {v} out of range")
        return cls(genus, (1 << v,))

    @classmethod
    def from_monomials(cls, monomials: Sequence[BoolMonomial]) -> "BoolPoly":
        if not monomials:
            raise ValueError("need at least one monomial; use zero(g) instead")
        g = monomials[0].genus
        acc: set[int] = set()
        for m in monomials:
            if m.genus != g:
                raise GenusMismatchError("mixed-genus monomials")
            acc ^= {m.mask}
        return cls(g, acc)

    def monomials(self) -> tuple[BoolMonomial, ...]:
        mons = [BoolMonomial(self.genus, m) for m in self.masks]
        mons.sort(key=BoolMonomial.sort_key)
        return tuple(mons)

    def degree(self) -> int:
        """Largest monomial degree; -1 for the zero polynomial."""
        if not self.masks:
            return -1
        return max(m.bit_count() for m in self.masks)

    def __bool__(self) -> bool:
        return bool(self.masks)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoolPoly)
            and self.genus == other.genus
            and self.masks == other.masks
        )

    def __hash__(self) -> int:
        return hash((self.genus, self.masks))

    def __add__(self, other: "BoolPoly") -> "BoolPoly":
        if self.genus != other.genus:
            raise GenusMismatchError("cannot add across genera")
        return BoolPoly(self.genus, self.masks ^ other.masks)

    def __mul__(self, other: "BoolPoly") -> "BoolPoly":
        if self.genus != other.genus:
            raise GenusMismatchError("cannot multiply across genera")
        acc: set[int] = set()
        for m1 in self.masks:
            for m2 in other.masks:
                acc ^= {m1 | m2}
        return BoolPoly(self.genus, acc)

    def __str__(self) -> str:
        if not self.masks:
            return "0"
        return " + ".join(str(m) for m in self.monomials())

    def __repr__(self) -> str:
        return f"BoolPoly({self.genus}, {self})"


def require_degree(p: BoolPoly, cap: int) -> BoolPoly:
    """Pass p through unchanged, raising if its degree exceeds the cap."""
    if p.degree() > cap:
        raise FiltrationError(f"degree {p.degree()} exceeds cap {cap}")
    return p


def bar(c: HClass) -> BoolPoly:
    """The class-to-function map; linear part plus the pair-count constant."""
    g = c.genus
    masks = []
    m = c.bits
    while m:
        low = m & -m
        masks.append(low)
        m ^= low
    pairs = (c.bits & (c.bits >> g) & ((1 << g) - 1)).bit_count()
    if pairs & 1:
        masks.append(0)
    return BoolPoly(g, masks)


@dataclass(frozen=True, slots=True)
class SelfLinkingForm:
    """Quadratic refinement of the intersection form, determined by its
    values on the 2g basis classes (bit k holds omega(e_k))."""

    genus: int
    values: int = 0

    def __post_init__(self):
        check_genus(self.genus)
        if self.values < 0 or self.values >> (2 * self.genus):
            raise DimensionError("form values do not fit 2g bits")

    def omega(self, u: HClass) -> int:
        """Extend to all of H by omega(u+v) = omega(u) + omega(v) + u.v."""
        if u.genus != self.genus:
            raise GenusMismatchError("form and class have different genus")
        g = self.genus
        linear = (u.bits & self.values).bit_count()
        pairs = (u.bits & (u.bits >> g) & ((1 << g) - 1)).bit_count()
        return (linear + pairs) & 1

    def basis_value(self, v: int) -> int:
        return (self.values >> v) & 1


def all_forms(genus: int) -> Iterator[SelfLinkingForm]:
    """All 2^(2g) self-linking forms."""
    g = check_genus(genus)
    for values in range(1 << (2 * g)):
        yield SelfLinkingForm(g, values)


def evaluate(p: BoolPoly, form: SelfLinkingForm) -> int:
    """Evaluate p at a form: ebar_k -> omega(e_k), an algebra map to GF(2)."""
    if p.genus != form.genus:
        raise GenusMismatchError("polynomial and form have different genus")
    acc = 0
    vals = form.values
    for m in p.masks:
        # monomial value is 1 iff every variable in it evaluates to 1
        if m & ~vals == 0:
            acc ^= 1
    return acc


def substitute_sp(M: F2Matrix, p: BoolPoly) -> BoolPoly:
    """Algebra endomorphism ebar_k -> bar(M e_k), M symplectic (checked)."""
    g = p.genus
    if M.n != 2 * g:
        raise MatrixError(f"matrix size {M.n} does not match 2g = {2 * g}")
    if not is_symplectic(M, g):
        raise MatrixError("substitution matrix does not preserve the pairing")
    images = [bar(HClass(g, M.cols[v])) for v in range(2 * g)]
    acc = BoolPoly.zero(g)
    one = BoolPoly.one(g)
    for m in p.masks:
        term = one
        mm = m
        while mm:
            low = mm & -mm
            term = term * images[low.bit_length() - 1]
            mm ^= low
        acc = acc + term
    return acc


# -- the canonical degree-<=2 basis -----------------------------------------


@dataclass(frozen=True)
class B2Basis:
    """Ordered basis of the degree-<=2 filtration piece.

    Order: the constant 1 first, then the 2g variables in index order
    (abar_1..abar_g, bbar_1..bbar_g), then all two-variable monomials in
    lexicographic order of their sorted variable-index pairs.  Size is
    2g^2 + g + 1.
    """

    genus: int
    monomials: tuple[BoolMonomial, ...]
    index_of_mask: dict

    @property
    def size(self) -> int:
        return len(self.monomials)

    def index(self, m: BoolMonomial) -> int:
        if m.genus != self.genus:
            raise GenusMismatchError("monomial genus does not match basis")
        if m.degree > 2:
            raise FiltrationError(f"degree {m.degree} monomial is outside B2")
        return self.index_of_mask[m.mask]

    def monomial(self, i: int) -> BoolMonomial:
        return self.monomials[i]


@lru_cache(maxsize=None)
def b2_basis(genus: int) -> B2Basis:
    g = check_genus(genus)
    n = 2 * g
    mons = [BoolMonomial(g, 0)]
    mons += [BoolMonomial(g, 1 << v) for v in range(n)]
    mons += [
        BoolMonomial(g, (1 << v1) | (1 << v2)) for v1, v2 in combinations(range(n), 2)
    ]
    index = {m.mask: i for i, m in enumerate(mons)}
    basis = B2Basis(g, tuple(mons), index)
    assert basis.size == 2 * g * g + g + 1
    return basis


def b2_index(m: BoolMonomial) -> int:
    return b2_basis(m.genus).index(m)


# -- text / JSON codecs ------------------------------------------------------


def poly_to_json(p: BoolPoly) -> list[list[int]]:
    """Sorted list of monomials, each a sorted list of variable indices."""
    return [list(m.variables()) for m in p.monomials()]


def poly_from_json(genus: int, data: Sequence[Sequence[int]]) -> BoolPoly:
    masks = set()
    for mono in data:
        mask = 0
        for v in mono:
            if not 0 <= v < 2 * genus:
                raise DimensionError(f"variable index {v} out of range")
            mask |= 1 << v
        if mask in masks:
            raise ValueError("duplicate monomial in JSON polynomial")
        masks.add(mask)
    return BoolPoly(genus, masks)


def parse_poly(genus: int, text: str) -> BoolPoly:
    """Inverse of str(): 'a1*b1 + a2 + 1' -> BoolPoly."""
    text = text.strip()
    if text == "0":
        return BoolPoly.zero(genus)
    masks = set()
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if chunk == "1":
            mask = 0
        else:
            mask = 0
            for name in chunk.split("*"):
                name = name.strip()
                if len(name) < 2 or name[0] not in "ab":
                    raise ValueError(f"bad variable {name!r}")
                idx = int(name[1:]) - 1
                if not 0 <= idx < genus:
                    raise ValueError(f"variable {name!r} out of range for genus {genus}")
                mask |= 1 << (idx if name[0] == "a" else genus + idx)
        if mask in masks:
            raise ValueError(f"duplicate monomial {chunk!r}")
        masks.add(mask)
    return BoolPoly(genus, masks)
