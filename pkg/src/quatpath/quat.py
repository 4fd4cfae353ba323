"""The rational quaternion algebra ramified exactly at {p, infinity}.

Elements are exact rational 4-vectors over the basis (1, i, j, ij) with
i^2 = -q, j^2 = -p, ji = -ij.  Lattices carry a canonical integer HNF
basis over one denominator, so equal lattices compare equal bitwise.
On top of that sit orders, ideals, and the prime-norm equivalent-ideal
constructions used by the path algorithms.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import arith, lattice, linalg, qform
from .errors import BudgetError, ValidationError


@dataclass(frozen=True)
class QuatAlgebra:
    p: int
    q: int

    def element(self, c1, c2, c3, c4) -> "QuatElement":
        return QuatElement(
            self, (Fraction(c1), Fraction(c2), Fraction(c3), Fraction(c4))
        )

    @property
    def one(self) -> "QuatElement":
        return self.element(1, 0, 0, 0)

    @property
    def i(self) -> "QuatElement":
        return self.element(0, 1, 0, 0)

    @property
    def j(self) -> "QuatElement":
        return self.element(0, 0, 1, 0)

    @property
    def ij(self) -> "QuatElement":
        return self.element(0, 0, 0, 1)


def construct_algebra(p: int) -> QuatAlgebra:
    """Algebra ramified at p and infinity, with the standard minimal q."""
    if p <= 2 or not arith.is_prime(p):
        raise ValidationError("p must be an odd prime")
    if p % 4 == 3:
        q = 1
    elif p % 8 == 5:
        q = 2
    else:
        q = 3
        while not (q % 4 == 3 and arith.kronecker(p, q) == -1):
            q = arith.next_prime(q)
    return QuatAlgebra(p, q)


@dataclass(frozen=True)
class QuatElement:
    alg: QuatAlgebra
    coords: tuple

    def _like(self, coords) -> "QuatElement":
        return QuatElement(self.alg, tuple(Fraction(c) for c in coords))

    def __add__(self, other):
        self._check(other)
        return self._like(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return self._like(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return self._like(tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._like(tuple(a * other for a in self.coords))
        self._check(other)
        q = Fraction(self.alg.q)
        p = Fraction(self.alg.p)
        a1, a2, a3, a4 = self.coords
        b1, b2, b3, b4 = other.coords
        return self._like(
            (
                a1 * b1 - q * a2 * b2 - p * a3 * b3 - q * p * a4 * b4,
                a1 * b2 + a2 * b1 + p * a3 * b4 - p * a4 * b3,
                a1 * b3 + a3 * b1 - q * a2 * b4 + q * a4 * b2,
                a1 * b4 + a4 * b1 + a2 * b3 - a3 * b2,
            )
        )

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._like(tuple(other * a for a in self.coords))
        return NotImplemented

    def _check(self, other):
        if not isinstance(other, QuatElement) or other.alg != self.alg:
            raise ValidationError("algebra mismatch")

    def conj(self) -> "QuatElement":
        c = self.coords
        return self._like((c[0], -c[1], -c[2], -c[3]))

    def trd(self) -> Fraction:
        return 2 * self.coords[0]

    def nrd(self) -> Fraction:
        q, p = self.alg.q, self.alg.p
        c = self.coords
        return c[0] ** 2 + q * c[1] ** 2 + p * c[2] ** 2 + q * p * c[3] ** 2

    def pairing(self, other) -> Fraction:
        """(a*conj(b) + b*conj(a)) / 2, the bilinear form of nrd."""
        self._check(other)
        q, p = self.alg.q, self.alg.p
        a, b = self.coords, other.coords
        return a[0] * b[0] + q * a[1] * b[1] + p * a[2] * b[2] + q * p * a[3] * b[3]

    def inverse(self) -> "QuatElement":
        n = self.nrd()
        if n == 0:
            raise ValidationError("zero is not invertible")
        return self._like(tuple(c / n for c in self.conj().coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


def _nrd_weights(alg: QuatAlgebra):
    return (1, alg.q, alg.p, alg.q * alg.p)


class QuatLattice:
    """Full-rank lattice in the algebra, in canonical form.

    The basis is a positive-pivot upper-triangular integer HNF divided by
    one global denominator, with the gcd of everything pulled out, so the
    representation is unique per lattice.
    """

    __slots__ = ("alg", "den", "mat", "gram_scaled", "nrd")

    def __init__(self, alg: QuatAlgebra, den: int, mat: tuple):
        self.alg = alg
        self.den = den
        self.mat = mat
        w = _nrd_weights(alg)
        gram = tuple(
            tuple(sum(w[k] * mat[a][k] * mat[b][k] for k in range(4)) for b in range(4))
            for a in range(4)
        )
        self.gram_scaled = gram  # pairing Gram times den^2
        g = 0
        for a in range(4):
            g = math.gcd(g, gram[a][a])
            for b in range(a + 1, 4):
                g = math.gcd(g, 2 * gram[a][b])
        self.nrd = Fraction(g, den * den)

    @staticmethod
    def from_rows(alg: QuatAlgebra, rows) -> "QuatLattice":
        coords = []
        for r in rows:
            if isinstance(r, QuatElement):
                coords.append(r.coords)
            else:
                coords.append(tuple(Fraction(c) for c in r))
        den = 1
        for row in coords:
            for c in row:
                den = den * c.denominator // math.gcd(den, c.denominator)
        scaled = tuple(tuple(int(c * den) for c in row) for row in coords)
        h = linalg.hnf(scaled)
        if len(h) != 4:
            raise ValidationError("lattice must have full rank 4")
        g = den
        for row in h:
            for c in row:
                g = math.gcd(g, c)
        return QuatLattice(
            alg, den // g, tuple(tuple(c // g for c in row) for row in h)
        )

    def basis_elements(self) -> tuple:
        d = self.den
        return tuple(
            QuatElement(self.alg, tuple(Fraction(c, d) for c in row))
            for row in self.mat
        )

    def contains(self, el: QuatElement) -> bool:
        if el.alg != self.alg:
            return False
        v = tuple(c * self.den for c in el.coords)
        x = linalg.vec_mat(v, linalg.inverse_fraction(self.mat))
        return all(c.denominator == 1 for c in x)

    def coordinates_of(self, el: QuatElement) -> tuple:
        """Integer coordinates of el over the lattice basis."""
        v = tuple(c * self.den for c in el.coords)
        x = linalg.vec_mat(v, linalg.inverse_fraction(self.mat))
        if not all(c.denominator == 1 for c in x):
            raise ValidationError("element is not in the lattice")
        return tuple(int(c) for c in x)

    def element_from(self, coords) -> QuatElement:
        basis = self.basis_elements()
        out = self.alg.element(0, 0, 0, 0)
        for c, b in zip(coords, basis):
            out = out + b * c
        return out

    def q_gram(self) -> lattice.GramForm:
        """Gram of the normalised form nrd/nrd(lattice) over the basis."""
        g0 = self.nrd * self.den * self.den
        return lattice.GramForm(
            tuple(tuple(Fraction(x, 1) / g0 for x in row) for row in self.gram_scaled)
        )

    def norm(self) -> int:
        """Integer reduced norm; raises for non-integral lattices."""
        if self.nrd.denominator != 1:
            raise ValidationError("lattice norm is not an integer")
        return self.nrd.numerator

    def __eq__(self, other):
        return (
            isinstance(other, QuatLattice)
            and self.alg == other.alg
            and self.den == other.den
            and self.mat == other.mat
        )

    def __hash__(self):
        return hash((self.alg, self.den, self.mat))

    def __repr__(self):
        return f"QuatLattice(p={self.alg.p}, den={self.den}, mat={self.mat})"

    # --- arithmetic ---

    def add(self, other: "QuatLattice") -> "QuatLattice":
        self._compat(other)
        rows = list(self.basis_elements()) + list(other.basis_elements())
        return QuatLattice.from_rows(self.alg, rows)

    def mul(self, other: "QuatLattice") -> "QuatLattice":
        self._compat(other)
        rows = [a * b for a in self.basis_elements() for b in other.basis_elements()]
        return QuatLattice.from_rows(self.alg, rows)

    def intersect(self, other: "QuatLattice") -> "QuatLattice":
        self._compat(other)
        d = self.den * other.den // math.gcd(self.den, other.den)
        ma = tuple(
            tuple(c * (d // self.den) for c in row) for row in self.mat
        )
        mb = tuple(
            tuple(c * (d // other.den) for c in row) for row in other.mat
        )
        k = linalg.lattice_intersection(ma, mb)
        return QuatLattice.from_rows(
            self.alg, [tuple(Fraction(c, d) for c in row) for row in k]
        )

    def scale(self, r) -> "QuatLattice":
        return QuatLattice.from_rows(
            self.alg, [tuple(Fraction(r) * c for c in row) for row in self._frac_rows()]
        )

    def mul_left(self, el: QuatElement) -> "QuatLattice":
        return QuatLattice.from_rows(self.alg, [el * b for b in self.basis_elements()])

    def mul_right(self, el: QuatElement) -> "QuatLattice":
        return QuatLattice.from_rows(self.alg, [b * el for b in self.basis_elements()])

    def conj_lattice(self) -> "QuatLattice":
        return QuatLattice.from_rows(self.alg, [b.conj() for b in self.basis_elements()])

    def _frac_rows(self):
        return [tuple(Fraction(c, self.den) for c in row) for row in self.mat]

    def _compat(self, other):
        if not isinstance(other, QuatLattice) or other.alg != self.alg:
            raise ValidationError("algebra mismatch")

    def index_in(self, other: "QuatLattice") -> int:
        """[other : self] for self a sublattice of other."""
        da = abs(linalg.det_bareiss(self.mat))
        db = abs(linalg.det_bareiss(other.mat))
        r = Fraction(da * other.den**4, db * self.den**4)
        if r.denominator != 1:
            raise ValidationError("not a sublattice")
        return r.numerator

    def is_sublattice_of(self, other: "QuatLattice") -> bool:
        return all(other.contains(b) for b in self.basis_elements())

    # --- order structure ---

    def is_order(self) -> bool:
        if not self.contains(self.alg.one):
            return False
        basis = self.basis_elements()
        return all(self.contains(a * b) for a in basis for b in basis)

    def is_maximal_order(self) -> bool:
        if not self.is_order():
            return False
        twog = tuple(
            tuple(2 * Fraction(x, self.den**2) for x in row) for row in self.gram_scaled
        )
        return linalg.det_fraction(twog) == self.alg.p ** 2

    # --- serialization ---

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.alg.p,
                "q": self.alg.q,
                "den": self.den,
                "basis": [list(row) for row in self.mat],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(s: str) -> "QuatLattice":
        d = json.loads(s)
        alg = QuatAlgebra(d["p"], d["q"])
        rows = [tuple(Fraction(c, d["den"]) for c in row) for row in d["basis"]]
        return QuatLattice.from_rows(alg, rows)


def left_order(lat: QuatLattice) -> QuatLattice:
    """{x : x * lat inside lat}, computed exactly."""
    return _multiplier_order(lat, right_side=False)


def right_order(lat: QuatLattice) -> QuatLattice:
    """{x : lat * x inside lat}."""
    return _multiplier_order(lat, right_side=True)


def _mul_matrix(b: QuatElement, right_side: bool):
    """Matrix M with coords(x*b) = coords(x) * M (or b*x when right_side)."""
    alg = b.alg
    rows = []
    for k in range(4):
        e = alg.element(*(1 if t == k else 0 for t in range(4)))
        prod = (b * e) if right_side else (e * b)
        rows.append(prod.coords)
    return tuple(rows)


def _multiplier_order(lat: QuatLattice, right_side: bool) -> QuatLattice:
    cur = None
    for b in lat.basis_elements():
        m = _mul_matrix(b, right_side)
        minv = linalg.inverse_fraction(m)
        rows = linalg.mat_mul(lat._frac_rows(), minv)
        cand = QuatLattice.from_rows(lat.alg, rows)
        cur = cand if cur is None else cur.intersect(cand)
    return cur


def connecting_ideal(o1: QuatLattice, o2: QuatLattice) -> QuatLattice:
    """The left o1, right o2 ideal joining two maximal orders."""
    if not (o1.is_maximal_order() and o2.is_maximal_order()):
        raise ValidationError("connecting ideal needs maximal orders")
    n = o1.intersect(o2).index_in(o2)
    ideal = o1.mul(o2).scale(n)
    assert left_order(ideal) == o1 and right_order(ideal) == o2
    return ideal


@dataclass(frozen=True)
class SpecialOrder:
    """The distinguished maximal order with its quadratic suborder.

    omega generates R = Z[omega] inside Q(i); f is the principal form of
    disc(R); every s + t*omega + (x + y*omega)*j has reduced norm
    f(s, t) + p * f(x, y).
    """

    alg: QuatAlgebra
    order: QuatLattice
    suborder: QuatLattice
    omega: QuatElement
    f: qform.BinaryQF

    def embed(self, s, t, x, y) -> QuatElement:
        one = self.alg.one
        om = self.omega
        jj = self.alg.j
        return (one * s + om * t) + (one * x + om * y) * jj

    def norm_pair(self, el: QuatElement):
        """(s, t, x, y) with el = (s + t om) + (x + y om) j, or None."""
        om = self.omega.coords
        c = el.coords
        # components 1, i give (s, t); j, ij give (x, y) through om
        t = c[1] / om[1]
        s = c[0] - t * om[0]
        y = c[3] / om[1]
        x = c[2] - y * om[0]
        if (
            s.denominator == 1
            and t.denominator == 1
            and x.denominator == 1
            and y.denominator == 1
            and self.embed(s, t, x, y) == el
        ):
            return int(s), int(t), int(x), int(y)
        return None


def special_order(alg: QuatAlgebra) -> SpecialOrder:
    p, q = alg.p, alg.q
    half = Fraction(1, 2)
    if p % 4 == 3:
        rows = [
            (1, 0, 0, 0),
            (0, 1, 0, 0),
            (0, half, 0, half),
            (half, 0, half, 0),
        ]
        omega = alg.i
        f = qform.BinaryQF(1, 0, 1)
    elif p % 8 == 5:
        rows = [
            (1, 0, 0, 0),
            (0, 1, 0, 0),
            (half, -Fraction(1, 4), 0, Fraction(1, 4)),
            (-half, half, half, 0),
        ]
        omega = alg.i
        f = qform.BinaryQF(1, 0, 2)
    else:
        c = arith.sqrt_mod_prime((-arith.inv_mod(p, q)) % q, q)
        rows = [
            (half, half, 0, 0),
            (0, 0, half, half),
            (0, Fraction(1, q), 0, Fraction(c, q)),
            (0, 0, 0, 1),
        ]
        omega = alg.element(half, half, 0, 0)
        f = qform.BinaryQF(1, 1, (1 + q) // 4)
    order = QuatLattice.from_rows(alg, rows)
    sub = QuatLattice.from_rows(
        alg,
        [
            alg.one,
            omega,
            alg.j,
            omega * alg.j,
        ],
    )
    assert order.is_maximal_order()
    assert sub.is_sublattice_of(order)
    return SpecialOrder(alg, order, sub, omega, f)


def equiv_from_element(ideal: QuatLattice, el: QuatElement) -> QuatLattice:
    """The equivalent ideal ideal * conj(el) / nrd(ideal)."""
    if el.is_zero():
        raise ValidationError("element must be nonzero")
    if not ideal.contains(el):
        raise ValidationError("element must lie in the ideal")
    scale = Fraction(1) / ideal.nrd
    cbar = el.conj()
    rows = [(b * cbar) * scale for b in ideal.basis_elements()]
    out = QuatLattice.from_rows(ideal.alg, rows)
    assert out.nrd == el.nrd() / ideal.nrd
    return out


def equiv_prime_ideal(ideal: QuatLattice, rng: random.Random):
    """An equivalent ideal of prime reduced norm, with its witness element."""
    coords, ell = qform.sample_prime_general(ideal.q_gram(), rng)
    el = ideal.element_from(coords)
    out = equiv_from_element(ideal, el)
    assert out.norm() == ell
    return out, el


def equiv_prime_large_nonresidue(
    ideal: QuatLattice, rho: int, ell: int, rng: random.Random,
    max_tries: int | None = None,
):
    """Equivalent ideal of prime norm N in [rho, rho^2] with (ell/N) = -1.

    Restricts the prime hunt to the sublattice Z x + 4*ell*I (8I when
    ell = 2) where x is chosen so every candidate norm is forced into
    the non-residue classes.  max_tries trims the rejection phase of the
    prime hunt; narrow desk windows fall through to exact enumeration
    quickly that way.
    """
    if not arith.is_prime(ell) or ell == ideal.alg.p:
        raise ValidationError("ell must be a prime different from p")
    if rho <= max(ell, 2):
        raise ValidationError("rho must exceed ell and 2")
    g = ideal.q_gram()
    mod = 8 if ell == 2 else 4 * ell
    x = None
    for _ in range(64 * mod * mod):
        cand = tuple(rng.randrange(mod) for _ in range(4))
        v = g.value_int(cand)
        if ell == 2:
            ok = v % 8 in (3, 5)
        else:
            ok = v % 4 == 1 and arith.kronecker(v, ell) == -1
        if ok:
            x = cand
            break
    if x is None:
        raise BudgetError("no admissible residue class found")
    rows = [x] + [
        tuple(mod if t == k else 0 for t in range(4)) for k in range(4)
    ]
    c = linalg.hnf(rows)
    sub = g.transform(c)
    y, n = qform.sample_prime_large(sub, rho, rng, max_tries)
    coords = linalg.vec_mat(y, c)
    el = ideal.element_from(coords)
    assert arith.kronecker(ell, n) == -1
    out = equiv_from_element(ideal, el)
    assert out.norm() == n
    return out, el


def ideal_equivalence_test(i1: QuatLattice, i2: QuatLattice):
    """Witness element a with i2 = i1 * conj(a) / nrd(i1), or None.

    Looks for a norm-one vector of the normalised form on conj(i1)*i2;
    one exists exactly when the classes agree.
    """
    if left_order(i1) != left_order(i2):
        raise ValidationError("ideals must share their left order")
    k = i1.conj_lattice().mul(i2)
    hits = list(lattice.enumerate_by_value(k.q_gram(), 1, lower=1))
    if not hits:
        return None
    gamma = k.element_from(hits[0][0])
    alpha = gamma.conj()
    scale = Fraction(1) / i1.nrd
    rows = [(b * gamma) * scale for b in i1.basis_elements()]
    assert QuatLattice.from_rows(i1.alg, rows) == i2
    return alpha
