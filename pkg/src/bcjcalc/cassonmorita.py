"""The integral algebra of linking symbols and its reduction to the
square-free algebra.

The algebra is the commutative Z-algebra on symbols l(u, v), u and v
integral homology classes, subject to

    l(v, u) = l(u, v) + u.v          (swap relation, Z-intersection form)
    l(n1 u1 + n2 u2, v) = n1 l(u1, v) + n2 l(u2, v)   (bilinearity)

Elements are kept in normal form: every generator symbol l(e_p, e_q) has
p <= q in the coordinate order a_1..a_g, b_1..b_g, swaps being rewritten
through the first relation, and no zero coefficients are stored.  There are
2g^2 + g distinct ordered symbols.  Coefficients are plain Python integers,
so products of linking numbers can grow without overflow.

Morita's value on a separating twist presented by an integrally symplectic
basis (A_i, B_i) is the quadratic expression

    rho(T_c) = - sum_i [ l(A_i,A_i) l(B_i,B_i) - l(A_i,B_i) l(B_i,A_i) ]
               - 2 sum_{i<j} [ l(A_i,A_j) l(B_i,B_j) - l(A_i,B_j) l(A_j,B_i) ]

The reduction mu to the square-free algebra sends the diagonal symbol
l(e_k, e_k) to the variable ebar_k and every other ordered symbol to 0;
the classical table value mu(l(b_i, a_i)) = 1 is realized by normalization,
since l(b_i, a_i) = l(a_i, b_i) + 1 and mu(l(a_i, b_i)) = 0.  Coefficients
reduce mod 2.  On these conventions mu . rho = sigma holds exactly.

An evaluation homomorphism substitutes a linking matrix L (constraint
L^T - L = J over Z) for the symbols; its mod-2 diagonal is a self-linking
form, giving the evaluation on the square-free side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .bcjmap import SeparatingTwist, sigma_separating
from .boolring import BoolPoly, SelfLinkingForm, bar, evaluate
from .errors import ConsistencyError, GenusMismatchError
from .surface import (
    ZHClass,
    ZSubsurfaceBasis,
    check_genus,
    random_z_symplectic_basis,
)


def coordinate_name(genus: int, p: int) -> str:
    return f"a{p + 1}" if p < genus else f"b{p - genus + 1}"


def n_symbols(genus: int) -> int:
    """Distinct ordered symbols: all pairs p <= q over 2g coordinates."""
    return 2 * genus * genus + genus


@dataclass(frozen=True, slots=True)
class CMSymbol:
    """Ordered generator symbol l(e_p, e_q), p <= q."""

    genus: int
    p: int
    q: int

    def __post_init__(self):
        check_genus(self.genus)
        if not 0 <= self.p <= self.q < 2 * self.genus:
            raise ValueError(f"bad symbol indices ({self.p},{self.q})")

    def __str__(self) -> str:
        g = self.genus
        return f"l({coordinate_name(g, self.p)},{coordinate_name(g, self.q)})"


Monomial = tuple[tuple[int, int], ...]  # sorted tuple of (p, q) index pairs


class CMPoly:
    """Integer polynomial in ordered linking symbols, in normal form."""

    __slots__ = ("genus", "terms")

    def __init__(self, genus: int, terms: Optional[Mapping[Monomial, int]] = None):
        check_genus(genus)
        clean: dict[Monomial, int] = {}
        if terms:
            for mon, coeff in terms.items():
                if coeff == 0:
                    continue
                mon = tuple(sorted(tuple(sym) for sym in mon))
                for p, q in mon:
                    if not 0 <= p <= q < 2 * genus:
                        raise ValueError(f"symbol ({p},{q}) is not in normal form")
                clean[mon] = clean.get(mon, 0) + coeff
                if clean[mon] == 0:
                    del clean[mon]
        object.__setattr__(self, "genus", genus)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *args):
        raise AttributeError("CMPoly is immutable")

    @classmethod
    def zero(cls, genus: int) -> "CMPoly":
        return cls(genus)

    @classmethod
    def const(cls, genus: int, n: int) -> "CMPoly":
        return cls(genus, {(): n})

    @classmethod
    def one(cls, genus: int) -> "CMPoly":
        return cls.const(genus, 1)

    @classmethod
    def symbol(cls, genus: int, p: int, q: int, coeff: int = 1) -> "CMPoly":
        if not 0 <= p <= q < 2 * genus:
            raise ValueError(f"symbol ({p},{q}) is not in normal form")
        return cls(genus, {((p, q),): coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CMPoly)
            and self.genus == other.genus
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.genus, frozenset(self.terms.items())))

    def _check(self, other: "CMPoly") -> None:
        if self.genus != other.genus:
            raise GenusMismatchError("cannot combine across genera")

    def __add__(self, other: "CMPoly") -> "CMPoly":
        self._check(other)
        acc = dict(self.terms)
        for mon, c in other.terms.items():
            acc[mon] = acc.get(mon, 0) + c
        return CMPoly(self.genus, acc)

    def __neg__(self) -> "CMPoly":
        return CMPoly(self.genus, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "CMPoly") -> "CMPoly":
        return self + (-other)

    def __mul__(self, other: "CMPoly") -> "CMPoly":
        self._check(other)
        acc: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mon = tuple(sorted(m1 + m2))
                acc[mon] = acc.get(mon, 0) + c1 * c2
        return CMPoly(self.genus, acc)

    def scale(self, n: int) -> "CMPoly":
        return CMPoly(self.genus, {m: n * c for m, c in self.terms.items()})

    def constant_term(self) -> int:
        return self.terms.get((), 0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for mon in sorted(self.terms, key=lambda m: (len(m), m)):
            coeff = self.terms[mon]
            factors = []
            k = 0
            while k < len(mon):
                run = 1
                while k + run < len(mon) and mon[k + run] == mon[k]:
                    run += 1
                name = str(CMSymbol(self.genus, *mon[k]))
                factors.append(name if run == 1 else f"{name}^{run}")
                k += run
            body = "*".join(factors) if factors else ""
            if not body:
                chunk = str(coeff)
            elif coeff == 1:
                chunk = body
            elif coeff == -1:
                chunk = f"-{body}"
            else:
                chunk = f"{coeff}*{body}"
            chunks.append(chunk)
        out = chunks[0]
        for c in chunks[1:]:
            out += f" - {c[1:]}" if c.startswith("-") else f" + {c}"
        return out

    def __repr__(self) -> str:
        return f"CMPoly({self.genus}, {self})"


def cm_generator(u: ZHClass, v: ZHClass) -> CMPoly:
    """l(u, v) expanded bilinearly over the fixed basis and normalized.

    Each raw l(e_q, e_p) with q > p is rewritten through the swap relation
    as l(e_p, e_q) + e_p.e_q, so the constant picks up +1 exactly when a
    (b_i, a_i) pair is swapped into order.
    """
    if u.genus != v.genus:
        raise GenusMismatchError("classes have different genus")
    g = u.genus
    acc: dict[Monomial, int] = {}
    const = 0
    for p in range(2 * g):
        cu = u.coords[p]
        if cu == 0:
            continue
        for q in range(2 * g):
            cv = v.coords[q]
            if cv == 0:
                continue
            coeff = cu * cv
            if p <= q:
                key: Monomial = ((p, q),)
            else:
                key = ((q, p),)
                # e_q.e_p with q < p equals +1 only for an (a_i, b_i) pair
                if p == q + g:
                    const += coeff
            acc[key] = acc.get(key, 0) + coeff
    if const:
        acc[()] = acc.get((), 0) + const
    return CMPoly(g, acc)


def rho_separating(basis: Union[ZSubsurfaceBasis, SeparatingTwist]) -> CMPoly:
    """Morita's value on a separating twist, from an integral basis."""
    if isinstance(basis, SeparatingTwist):
        raise TypeError("rho needs the integral basis, not the mod-2 twist")
    basis.validate()
    g = basis.genus

    def l(x: ZHClass, y: ZHClass) -> CMPoly:
        return cm_generator(x, y)

    acc = CMPoly.zero(g)
    pairs = basis.pairs
    for A, B in pairs:
        acc = acc - (l(A, A) * l(B, B) - l(A, B) * l(B, A))
    for i in range(len(pairs)):
        Ai, Bi = pairs[i]
        for j in range(i + 1, len(pairs)):
            Aj, Bj = pairs[j]
            acc = acc - (l(Ai, Aj) * l(Bi, Bj) - l(Ai, Bj) * l(Aj, Bi)).scale(2)
    return acc


def mu(x: CMPoly) -> BoolPoly:
    """Reduction to the square-free algebra.

    Diagonal symbols become variables, all other ordered symbols die, and
    coefficients reduce mod 2.  This respects both defining relations and
    satisfies mu(l(u, u)) = bar(u mod 2) for every integral class u.
    """
    g = x.genus
    acc = BoolPoly.zero(g)
    for mon, coeff in x.terms.items():
        if coeff % 2 == 0:
            continue
        mask = 0
        dead = False
        for p, q in mon:
            if p == q:
                mask |= 1 << p
            else:
                dead = True
                break
        if dead:
            continue
        acc = acc + BoolPoly(g, (mask,))
    return acc


# -- evaluation ---------------------------------------------------------------


def _z_pairing(genus: int, p: int, q: int) -> int:
    """e_p.e_q over Z: +1 for (a_i, b_i), -1 for (b_i, a_i), else 0."""
    if q == p + genus:
        return 1
    if p == q + genus:
        return -1
    return 0


@dataclass(frozen=True)
class LinkingMatrix:
    """Integer matrix of linking numbers L[p][q] = lk(e_p, e_q^+).

    The swap relation forces L^T - L = J, where J is the antisymmetric
    intersection matrix; validated on construction, naming the first
    violated entry.
    """

    genus: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = check_genus(self.genus)
        n = 2 * g
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ConsistencyError(f"linking matrix must be {n}x{n}")
        for p in range(n):
            for q in range(n):
                got = self.entries[q][p] - self.entries[p][q]
                want = _z_pairing(g, p, q)
                if got != want:
                    raise ConsistencyError(
                        f"L[{q}][{p}] - L[{p}][{q}] = {got}, expected {want} "
                        f"(pair {coordinate_name(g, p)},{coordinate_name(g, q)})"
                    )

    @classmethod
    def from_rows(cls, genus: int, rows: Sequence[Sequence[int]]) -> "LinkingMatrix":
        return cls(genus, tuple(tuple(int(e) for e in row) for row in rows))

    @classmethod
    def standard_model(cls, genus: int) -> "LinkingMatrix":
        """Zero diagonal, L[b_i][a_i] = 1, all else 0."""
        g = check_genus(genus)
        n = 2 * g
        rows = [[0] * n for _ in range(n)]
        for i in range(g):
            rows[g + i][i] = 1
        return cls.from_rows(g, rows)

    @classmethod
    def random_valid(cls, genus: int, rng: random.Random, bound: int = 3) -> "LinkingMatrix":
        """Random matrix satisfying the constraint: free diagonal and upper
        triangle, lower triangle forced."""
        g = check_genus(genus)
        n = 2 * g
        rows = [[0] * n for _ in range(n)]
        for p in range(n):
            rows[p][p] = rng.randint(-bound, bound)
            for q in range(p + 1, n):
                rows[p][q] = rng.randint(-bound, bound)
                rows[q][p] = rows[p][q] + _z_pairing(g, p, q)
        return cls.from_rows(g, rows)

    def entry(self, p: int, q: int) -> int:
        return self.entries[p][q]

    def omega(self) -> SelfLinkingForm:
        """Mod-2 diagonal; the self-linking form u -> u^T L u mod 2."""
        values = 0
        for k in range(2 * self.genus):
            if self.entries[k][k] & 1:
                values |= 1 << k
        return SelfLinkingForm(self.genus, values)

    def to_json(self) -> dict:
        return {"genus": self.genus, "matrix": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "LinkingMatrix":
        return cls.from_rows(check_genus(data["genus"]), data["matrix"])


def epsilon(L: LinkingMatrix, x: CMPoly) -> int:
    """Evaluation homomorphism: substitute L for the symbols, over Z."""
    if L.genus != x.genus:
        raise GenusMismatchError("matrix and polynomial have different genus")
    total = 0
    for mon, coeff in x.terms.items():
        val = coeff
        for p, q in mon:
            val *= L.entries[p][q]
        total += val
    return total


def selflink_eval(L: LinkingMatrix, p: BoolPoly) -> int:
    """Evaluate a square-free polynomial at the form induced by L."""
    if L.genus != p.genus:
        raise GenusMismatchError("matrix and polynomial have different genus")
    return evaluate(p, L.omega())


# -- diagram verification -----------------------------------------------------


def _random_integral_class(
    genus: int, rng: random.Random, bound: int = 2
) -> ZHClass:
    return ZHClass(genus, tuple(rng.randint(-bound, bound) for _ in range(2 * genus)))


def verify_diagrams(genus: int, num_trials: int, seed: int) -> dict:
    """Randomized verification of the commuting-diagram identities.

    (a) triangle: mu(rho(T_c)) == sigma(T_c) on random integral bases;
    (b) mu(l(u, u)) == bar(u mod 2) on random integral classes;
    (c) right square on the image of rho: epsilon(L, rho(T_c)) mod 2 ==
        selflink_eval(L, sigma(T_c)) for random valid L;
    (d) wedge lift: mu(rho(f)) ^ mu(rho(g)) == sigma(f) ^ sigma(g) for
        support-disjoint pairs.

    Failures are report content, not exceptions.
    """
    from .wedgespan import wedge

    g = check_genus(genus)
    rng = random.Random(seed)
    report: dict = {"genus": g, "trials": num_trials, "seed": seed, "checks": {}}

    def record(name: str, failures: list[str], trials: int) -> None:
        report["checks"][name] = {
            "trials": trials,
            "failures": len(failures),
            "witnesses": failures[:5],
            "passed": not failures,
        }

    failures = []
    for t in range(num_trials):
        h = rng.randint(0, min(g, 3))
        if h == 0:
            zbasis = ZSubsurfaceBasis(g, ())
        else:
            handles = sorted(rng.sample(range(1, g + 1), h))
            zbasis = random_z_symplectic_basis(g, h, rng, handles)
        lhs = mu(rho_separating(zbasis))
        rhs = sigma_separating(zbasis.mod2())
        if lhs != rhs:
            failures.append(f"trial {t}: basis {zbasis.pairs}")
    record("triangle", failures, num_trials)

    failures = []
    for t in range(num_trials):
        u = _random_integral_class(g, rng)
        if mu(cm_generator(u, u)) != bar(u.mod2()):
            failures.append(f"trial {t}: u = {u.coords}")
    record("mu_quadratic", failures, num_trials)

    failures = []
    for t in range(num_trials):
        h = rng.randint(1, min(g, 3))
        handles = sorted(rng.sample(range(1, g + 1), h))
        zbasis = random_z_symplectic_basis(g, h, rng, handles)
        L = LinkingMatrix.random_valid(g, rng)
        lhs = epsilon(L, rho_separating(zbasis)) & 1
        rhs = selflink_eval(L, sigma_separating(zbasis.mod2()))
        if lhs != rhs:
            failures.append(f"trial {t}: basis {zbasis.pairs}")
    record("right_square", failures, num_trials)

    failures = []
    n_lift = max(1, num_trials // 4)
    for t in range(n_lift):
        if g < 2:
            break
        handles = list(range(1, g + 1))
        rng.shuffle(handles)
        h1 = rng.randint(1, min(g - 1, 2))
        h2 = rng.randint(1, min(g - h1, 2))
        set1, set2 = sorted(handles[:h1]), sorted(handles[h1 : h1 + h2])
        zb1 = random_z_symplectic_basis(g, h1, rng, set1)
        zb2 = random_z_symplectic_basis(g, h2, rng, set2)
        lhs = wedge(mu(rho_separating(zb1)), mu(rho_separating(zb2)))
        rhs = wedge(sigma_separating(zb1.mod2()), sigma_separating(zb2.mod2()))
        if lhs != rhs:
            failures.append(f"trial {t}: handles {set1} / {set2}")
    record("wedge_lift", failures, n_lift if g >= 2 else 0)

    report["all_passed"] = all(c["passed"] for c in report["checks"].values())
    return report


def mu_quadratic_exhaustive(genus: int) -> list[str]:
    """mu(l(u, u)) == bar(u) for every 0/1 lift of a mod-2 class."""
    g = check_genus(genus)
    failures = []
    for bits in range(1 << (2 * g)):
        u = ZHClass(g, tuple((bits >> k) & 1 for k in range(2 * g)))
        if mu(cm_generator(u, u)) != bar(u.mod2()):
            failures.append(f"u bits {bits:0{2 * g}b}")
    return failures


# -- JSON ----------------------------------------------------------------------


def cmpoly_to_json(x: CMPoly) -> list[dict]:
    out = []
    for mon in sorted(x.terms, key=lambda m: (len(m), m)):
        out.append({"coeff": x.terms[mon], "monomial": [list(s) for s in mon]})
    return out


def cmpoly_from_json(genus: int, data: Iterable[dict]) -> CMPoly:
    terms: dict[Monomial, int] = {}
    for item in data:
        mon = tuple(sorted((int(p), int(q)) for p, q in item["monomial"]))
        terms[mon] = terms.get(mon, 0) + int(item["coeff"])
    return CMPoly(genus, terms)
