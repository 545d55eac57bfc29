"""Johnson's explicit formulas for the Birman-Craggs-Johnson homomorphism.

Everything here is computed from curve data, never from group elements: a
separating twist is presented by a symplectic basis of the subsurface it
bounds, a bounding-pair map by such a basis together with the class C of one
of its curves.  On that data

    sigma(separating twist)  = sum_i bar(A_i) bar(B_i)
    sigma(bounding-pair map) = (sum_i bar(A_i) bar(B_i)) (bar(C) + 1)

The first value has degree <= 2 and is independent of the choice of
symplectic basis for the subsurface; the second has degree <= 3.

A wedge-basis pair {m1, m2} is "index-matched" when some handle i has its
a-variable dividing one monomial and its b-variable dividing the other; the
span of the non-matched pairs is the target subspace of the image search.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Union

from .boolring import BoolMonomial, BoolPoly, bar, substitute_sp
from .errors import CatalogError, FiltrationError, GeometryError, GenusMismatchError
from .gf2core import F2Matrix
from .surface import (
    HClass,
    SubsurfaceBasis,
    intersect,
    random_symplectic_rebase,
    random_sp_word,
    support,
    transform_basis,
)


@dataclass(frozen=True, slots=True)
class SeparatingTwist:
    """Twist about a separating curve, presented by a subsurface basis."""

    basis: SubsurfaceBasis
    label: str = ""

    def __post_init__(self):
        self.basis.validate()

    @property
    def genus(self) -> int:
        return self.basis.genus

    def support(self) -> frozenset[int]:
        return self.basis.support()


@dataclass(frozen=True, slots=True)
class BPMap:
    """Bounding-pair map: subsurface basis plus the class C of one curve.

    C must be orthogonal to the basis span; that is what disjointness of the
    pair from the subsurface interior forces on homology.
    """

    basis: SubsurfaceBasis
    C: HClass
    label: str = ""

    def __post_init__(self):
        self.basis.validate()
        if self.C.genus != self.basis.genus:
            raise GenusMismatchError("C has wrong genus")
        for k, (A, B) in enumerate(self.basis.pairs):
            if intersect(self.C, A) or intersect(self.C, B):
                raise GeometryError(
                    f"C is not orthogonal to basis pair {k + 1}"
                )

    @property
    def genus(self) -> int:
        return self.basis.genus

    def support(self) -> frozenset[int]:
        return self.basis.support() | support(self.C)


Descriptor = Union[SeparatingTwist, BPMap]


def sigma_separating(t: Union[SeparatingTwist, SubsurfaceBasis]) -> BoolPoly:
    """sum_i bar(A_i) bar(B_i); degree <= 2, basis-choice independent."""
    basis = t.basis if isinstance(t, SeparatingTwist) else t
    basis.validate()
    acc = BoolPoly.zero(basis.genus)
    for A, B in basis.pairs:
        acc = acc + bar(A) * bar(B)
    return acc


def sigma_bp(m: BPMap) -> BoolPoly:
    """(sum_i bar(A_i) bar(B_i)) * (bar(C) + 1); degree <= 3."""
    core = sigma_separating(m.basis)
    return core * (bar(m.C) + BoolPoly.one(m.genus))


def sigma(d: Descriptor) -> BoolPoly:
    if isinstance(d, SeparatingTwist):
        return sigma_separating(d)
    if isinstance(d, BPMap):
        return sigma_bp(d)
    raise TypeError(f"not a curve descriptor: {d!r}")


def is_index_matched(m1: BoolMonomial, m2: BoolMonomial) -> bool:
    """True iff some handle's a-variable divides one monomial and its
    b-variable the other.  Arguments must be distinct monomials of degree
    <= 2; the constant divides nothing and is never matched."""
    if m1.genus != m2.genus:
        raise GenusMismatchError("monomials have different genus")
    if m1.mask == m2.mask:
        raise ValueError("index-matching is defined on distinct monomials")
    if m1.degree > 2 or m2.degree > 2:
        raise FiltrationError("index-matching is defined on the degree-<=2 basis")
    g = m1.genus
    amask = (1 << g) - 1
    a1, b1 = m1.mask & amask, m1.mask >> g
    a2, b2 = m2.mask & amask, m2.mask >> g
    return bool((a1 & b2) | (a2 & b1))


# -- randomized property suites (shared by tests and the verify command) ----


def basis_independence_failures(
    genus: int, trials: int, seed: int, max_h: int = 3
) -> list[str]:
    """Random symplectic rebases must not change sigma; returns witnesses."""
    rng = random.Random(seed)
    failures = []
    for h in range(1, min(max_h, genus) + 1):
        base = SubsurfaceBasis.standard(genus, range(1, h + 1))
        # also exercise a non-standard starting basis
        starts = [base, random_symplectic_rebase(base, seed ^ 0x5EED ^ h)]
        per_start = max(1, trials // len(starts))
        for start in starts:
            reference = sigma_separating(start)
            for t in range(per_start):
                rebased = random_symplectic_rebase(start, rng.randrange(1 << 30))
                if sigma_separating(rebased) != reference:
                    failures.append(
                        f"h={h} rebase changed sigma: {rebased.pairs}"
                    )
    return failures


def equivariance_failures(
    genus: int,
    matrices: list[F2Matrix],
    h: int = 2,
    seed: int = 0,
) -> list[str]:
    """Check substitute_sp(M, sigma(basis)) == sigma(M . basis) per matrix."""
    rng = random.Random(seed)
    failures = []
    base = SubsurfaceBasis.standard(genus, range(1, min(h, genus) + 1))
    variants = [base, random_symplectic_rebase(base, seed ^ 0xE9)]
    for M in matrices:
        basis = variants[rng.randrange(len(variants))]
        lhs = substitute_sp(M, sigma_separating(basis))
        rhs = sigma_separating(transform_basis(M, basis))
        if lhs != rhs:
            failures.append(f"matrix cols {M.cols} on h={basis.h}")
    return failures


def random_sp_matrices(genus: int, count: int, seed: int, length: int = 8):
    rng = random.Random(seed)
    return [random_sp_word(genus, rng, length) for _ in range(count)]


# -- curve-catalog JSON -------------------------------------------------------


def descriptor_to_json(d: Descriptor) -> dict:
    from .surface import basis_to_json

    out = {"type": "separating" if isinstance(d, SeparatingTwist) else "bp"}
    out["basis"] = basis_to_json(d.basis)["pairs"]
    if isinstance(d, BPMap):
        out["C"] = d.C.coords()
    out["label"] = d.label
    return out


def descriptor_from_json(genus: int, data: dict, where: str = "entry") -> Descriptor:
    if not isinstance(data, dict):
        raise CatalogError(f"{where}: entry must be an object")
    kind = data.get("type")
    if kind not in ("separating", "bp"):
        raise CatalogError(f"{where}: unknown type {kind!r}")
    label = data.get("label", "")
    try:
        pairs = tuple(
            (HClass.from_coords(genus, A), HClass.from_coords(genus, B))
            for A, B in data.get("basis", [])
        )
        basis = SubsurfaceBasis(genus, pairs)
        if kind == "separating":
            return SeparatingTwist(basis, label)
        if "C" not in data:
            raise CatalogError(f"{where}: bp entry is missing C")
        C = HClass.from_coords(genus, data["C"])
        return BPMap(basis, C, label)
    except CatalogError:
        raise
    except (TypeError, ValueError) as exc:
        raise CatalogError(f"{where}: {exc}") from exc
