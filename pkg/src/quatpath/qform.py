"""Binary quadratic forms over Z.

Reduction with explicit SL2(Z) transforms, Gauss composition carrying
representations, Cornacchia-style representation solving, class-group
enumeration with genus data, and samplers that hunt for prime values of
positive definite forms (binary directly, higher rank through a
two-dimensional sublattice with coprime corner values).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import arith, lattice
from .errors import BudgetError, ValidationError


@dataclass(frozen=True)
class BinaryQF:
    """f(x, y) = a x^2 + b xy + c y^2 with D = b^2 - 4ac < 0 and a > 0."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.b * self.b - 4 * self.a * self.c >= 0:
            raise ValidationError("discriminant must be negative")
        if self.a <= 0:
            raise ValidationError("leading coefficient must be positive")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    @property
    def is_primitive(self) -> bool:
        return self.content == 1

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def value(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def opposite(self) -> "BinaryQF":
        """Inverse class: (a, -b, c)."""
        return BinaryQF(self.a, -self.b, self.c)

    def transform(self, m) -> "BinaryQF":
        """f composed with the column action of a 2x2 integer matrix m."""
        a, b, c = self.a, self.b, self.c
        p, q = m[0]
        r, s = m[1]
        return BinaryQF(
            self.value(p, r),
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            self.value(q, s),
        )

    def gram(self) -> lattice.GramForm:
        return lattice.GramForm.binary(self.a, self.b, self.c)


def _mul2(m, n):
    return (
        (m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]),
        (m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]),
    )


def _inv2(m):
    d = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if d not in (1, -1):
        raise ValueError("matrix is not unimodular")
    return ((m[1][1] * d, -m[0][1] * d), (-m[1][0] * d, m[0][0] * d))


def _apply(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


_ID2 = ((1, 0), (0, 1))


def reduce_form(f: BinaryQF) -> tuple[BinaryQF, tuple]:
    """Reduced representative plus m in SL2(Z) with reduced = f o m."""
    a, b, c = f.a, f.b, f.c
    m = _ID2
    while True:
        if abs(b) > a:
            # shear x -> x + ky bringing b into (-a, a]
            k = (a - b) // (2 * a)
            b, c = b + 2 * a * k, a * k * k + b * k + c
            m = _mul2(m, ((1, k), (0, 1)))
            continue
        if a > c:
            a, b, c = c, -b, a
            m = _mul2(m, ((0, -1), (1, 0)))
            continue
        if a == c and b < 0:
            b = -b
            m = _mul2(m, ((0, -1), (1, 0)))
            continue
        if b == -a:
            b = a
            m = _mul2(m, ((1, 1), (0, 1)))
            continue
        break
    red = BinaryQF(a, b, c)
    assert f.transform(m) == red
    return red, m


def equivalent(f: BinaryQF, g: BinaryQF) -> bool:
    return reduce_form(f)[0] == reduce_form(g)[0]


def principal_form(D: int) -> BinaryQF:
    _check_disc(D)
    if D % 4 == 0:
        return BinaryQF(1, 0, -D // 4)
    return BinaryQF(1, 1, (1 - D) // 4)


def prime_form(D: int, p: int) -> BinaryQF | None:
    """A form (p, b, c) of discriminant D, or None when p does not split."""
    _check_disc(D)
    if arith.kronecker(D, p) != 1:
        return None
    if p == 2:
        b = 1  # split at 2 forces D = 1 mod 8
    else:
        b = arith.sqrt_mod_prime(D % p, p)
        if (b - D) % 2:
            b = p - b
    c4 = b * b - D
    assert c4 % (4 * p) == 0
    return BinaryQF(p, b, c4 // (4 * p))


def _check_disc(D: int):
    if D >= 0 or D % 4 not in (0, 1):
        raise ValidationError(f"{D} is not a negative discriminant")


def _coprime_part(t: int, a: int) -> int:
    """Largest divisor of t coprime to a."""
    while True:
        g = math.gcd(t, a)
        if g == 1:
            return t
        t //= g


def _coprime_leading_transform(f: BinaryQF, t: int):
    """m in SL2(Z) such that (f o m)(1, 0) is coprime to t.

    Chooses, prime by prime, one of (1,0), (0,1), (1,1) where f does not
    vanish; the split of t into the three cases only needs gcds, not a
    factorization of t.
    """
    if t == 1 or math.gcd(f.a, t) == 1:
        return _ID2
    ta = _coprime_part(t, f.a)
    rest = t // ta
    tc = _coprime_part(rest, f.c)
    tb = rest // tc
    x, _ = arith.crt([1, 0, 1], [ta, tc, tb])
    y, _ = arith.crt([0, 1, 1], [ta, tc, tb])
    g = math.gcd(x, y)
    if g > 1:
        x, y = x // g, y // g
    _, u, v = arith.xgcd(x, y)
    m = ((x, -v), (y, u))
    assert math.gcd(f.transform(m).a, t) == 1
    return m


def _concordant(f1: BinaryQF, f2: BinaryQF):
    """Equivalent pair (a1, B, a2*C), (a2, B, a1*C) with gcd(a1, a2) = 1.

    Returns (a1, a2, B, C, m1, m2) where fi o mi is the stated form.
    """
    D = f1.disc
    m1 = _coprime_leading_transform(f1, 2 * abs(D))
    g1 = f1.transform(m1)
    m2 = _coprime_leading_transform(f2, 2 * abs(D) * g1.a)
    g2 = f2.transform(m2)
    a1, a2 = g1.a, g2.a
    # align middle coefficients: B = b1 mod 2a1 and B = b2 mod 2a2
    k = (((g2.b - g1.b) // 2) * arith.inv_mod(a1, a2)) % a2
    B = g1.b + 2 * a1 * k
    m1 = _mul2(m1, ((1, k), (0, 1)))
    t2 = (B - g2.b) // (2 * a2)
    m2 = _mul2(m2, ((1, t2), (0, 1)))
    C4 = B * B - D
    assert C4 % (4 * a1 * a2) == 0
    C = C4 // (4 * a1 * a2)
    assert f1.transform(m1) == BinaryQF(a1, B, a2 * C)
    assert f2.transform(m2) == BinaryQF(a2, B, a1 * C)
    return a1, a2, B, C, m1, m2


def _require_composable(f1: BinaryQF, f2: BinaryQF):
    if f1.disc != f2.disc:
        raise ValidationError("discriminant mismatch")
    if not (f1.is_primitive and f2.is_primitive):
        raise ValidationError("composition needs primitive forms")


def compose_with_coords(f1: BinaryQF, v1, f2: BinaryQF, v2) -> tuple[BinaryQF, tuple]:
    """Gauss composition carrying representations.

    Returns (h, w) with h reduced, [h] = [f1][f2], and
    h(w) = f1(v1) * f2(v2).
    """
    _require_composable(f1, f2)
    a1, a2, B, C, m1, m2 = _concordant(f1, f2)
    w1 = _apply(_inv2(m1), v1)
    w2 = _apply(_inv2(m2), v2)
    # bilinear product identity for a concordant pair
    X = w1[0] * w2[0] - C * w1[1] * w2[1]
    Y = a1 * w1[0] * w2[1] + a2 * w2[0] * w1[1] + B * w1[1] * w2[1]
    comp = BinaryQF(a1 * a2, B, C)
    assert comp.value(X, Y) == f1.value(*v1) * f2.value(*v2)
    red, m3 = reduce_form(comp)
    return red, _apply(_inv2(m3), (X, Y))


def compose(f1: BinaryQF, f2: BinaryQF) -> BinaryQF:
    """Reduced representative of the composed class."""
    red, _ = compose_with_coords(f1, (1, 0), f2, (1, 0))
    return red


def cornacchia(f: BinaryQF, z: int, fz: arith.Factorization):
    """Solve f(s, t) = z given the factorization of z, or return None.

    Walks every square divisor e^2 | z and every square root B of
    disc(f) mod 4(z/e^2); a representation exists iff one of the forms
    (z/e^2, B, *) reduces to f.
    """
    if not f.is_primitive or not f.is_reduced:
        raise ValidationError("a primitive reduced form is required")
    if z == 0:
        return (0, 0)
    if z < 0:
        return None
    if not fz.complete:
        raise ValidationError("incomplete factorization rejected")
    if fz.value() != z:
        raise ValidationError("factorization does not match z")
    D = f.disc
    fdict = dict(fz.factors)
    for e in _square_divisor_roots(fdict):
        zp = z // (e * e)
        four_zp = dict(fdict)
        for p in _prime_powers_of(e):
            four_zp[p[0]] -= 2 * p[1]
        four_zp = {p: k for p, k in four_zp.items() if k > 0}
        four_zp[2] = four_zp.get(2, 0) + 2
        seen = set()
        for r in _sqrt_mod_from_dict(D, four_zp):
            B = r % (2 * zp)
            if B in seen:
                continue
            seen.add(B)
            g = BinaryQF(zp, B, (B * B - D) // (4 * zp))
            red, m = reduce_form(g)
            if red == f:
                s, t = _apply(_inv2(m), (1, 0))
                assert f.value(e * s, e * t) == z
                return (e * s, e * t)
    return None


def _square_divisor_roots(fdict: dict) -> list[int]:
    """All e with e^2 dividing the factored value."""
    out = [1]
    for p, k in fdict.items():
        out = [d * p**i for d in out for i in range(k // 2 + 1)]
    return sorted(out)


def _prime_powers_of(e: int):
    fac = arith.factor_completely(e)
    return list(fac.factors)


def _sqrt_mod_from_dict(n: int, fdict: dict) -> list[int]:
    """All square roots of n modulo prod p^k over the given prime powers."""
    combos = [(0, 1)]
    for p, k in fdict.items():
        roots = arith.sqrt_mod_prime_power(n, p, k)
        if not roots:
            return []
        pe = p**k
        combos = [
            (arith.crt([r0, r], [m0, pe])[0], m0 * pe) for r0, m0 in combos for r in roots
        ]
        if len(combos) > 10**5:
            raise BudgetError("square-root count over budget")
    return [r for r, _ in combos]


def fundamental_discriminant(D: int) -> tuple[int, int]:
    """Write D = d * m^2 with d fundamental; returns (d, m)."""
    _check_disc(D)
    fac = arith.factor_completely(abs(D))
    m = 1
    for p, e in fac.factors:
        m *= p ** (e // 2)
    s = D // (m * m)
    if s % 4 == 1:
        return s, m
    assert m % 2 == 0
    return 4 * s, m // 2


class ClassGroup:
    """Every reduced primitive form of one negative discriminant.

    Immutable after construction.  Composition of classes is computed on
    demand (it is cheap and stateless); the genus partition is stored as
    cosets of the subgroup of squares.
    """

    def __init__(self, disc: int, forms: tuple):
        self.disc = disc
        self.forms = forms
        self.h = len(forms)
        self._index = {f: i for i, f in enumerate(forms)}
        self.identity_index = self._index[reduce_form(principal_form(disc))[0]]
        squares = sorted({self.compose_indices(i, i) for i in range(self.h)})
        self.principal_genus = tuple(squares)
        genus_id = [-1] * self.h
        gid = 0
        for i in range(self.h):
            if genus_id[i] >= 0:
                continue
            for s in squares:
                genus_id[self.compose_indices(i, s)] = gid
            gid += 1
        self.genus_ids = tuple(genus_id)
        self.genus_count = gid

    def index_of(self, f: BinaryQF) -> int:
        red, _ = reduce_form(f)
        try:
            return self._index[red]
        except KeyError:
            raise ValidationError(
                "form is not a primitive form of this discriminant"
            ) from None

    def compose_indices(self, i: int, j: int) -> int:
        return self._index[compose(self.forms[i], self.forms[j])]

    def inverse_index(self, i: int) -> int:
        return self._index[reduce_form(self.forms[i].opposite())[0]]

    def order_of(self, i: int) -> int:
        k, cur = 1, i
        while cur != self.identity_index:
            cur = self.compose_indices(cur, i)
            k += 1
        return k

    def composition_table(self) -> tuple:
        return tuple(
            tuple(self.compose_indices(i, j) for j in range(self.h))
            for i in range(self.h)
        )

    def same_genus(self, i: int, j: int) -> bool:
        return self.genus_ids[i] == self.genus_ids[j]

    def genus_residues(self, i: int, budget: int = 10**6) -> frozenset:
        """Residues mod |D|, coprime to D, represented by class i's genus."""
        mod = abs(self.disc)
        if mod * mod > budget:
            raise BudgetError(f"residue scan {mod}^2 exceeds budget {budget}")
        f = self.forms[i]
        out = set()
        for x in range(mod):
            for y in range(mod):
                v = f.value(x, y) % mod
                if math.gcd(v, mod) == 1:
                    out.add(v)
        return frozenset(out)


def class_group(D: int, bound: int = 10**7) -> ClassGroup:
    """Enumerate all reduced primitive forms of discriminant D."""
    _check_disc(D)
    if abs(D) > bound:
        raise BudgetError(f"|D| = {abs(D)} over the enumeration bound {bound}")
    forms = []
    amax = math.isqrt(abs(D) // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append(BinaryQF(a, b, c))
    forms.sort(key=lambda f: (f.a, f.b, f.c))
    return ClassGroup(D, tuple(forms))


def representation_count(f: BinaryQF, N: int) -> int:
    """Exact #{(x, y) in Z^2 : f(x, y) = N}."""
    if N <= 0:
        raise ValidationError("N must be positive")
    g = f.gram()
    return lattice.count_ellipsoid_dim2(g, (0, 0), N) - lattice.count_ellipsoid_dim2(
        g, (0, 0), N - 1
    )


def genus_representation_count(D: int, N: int) -> int:
    """Representations of N summed over every primitive class of disc D."""
    cg = class_group(D)
    return sum(representation_count(f, N) for f in cg.forms)


def _form_content(form: lattice.GramForm) -> int:
    g = form.gram
    n = form.rank
    c = 0
    for i in range(n):
        c = math.gcd(c, int(g[i][i]))
        for j in range(i + 1, n):
            c = math.gcd(c, int(2 * g[i][j]))
    return c


def sample_prime_binary(
    f: BinaryQF, rng: random.Random, max_doublings: int = 48
) -> tuple[int, int, int]:
    """Random (s, t) with f(s, t) prime.

    Samples uniformly from growing ellipses, starting at radius |D| and
    doubling after a batch of failures, so accepted primes stay within a
    small power of |D|.
    """
    if not f.is_primitive:
        raise ValidationError("a primitive form is required")
    g = f.gram()
    d = abs(f.disc)
    rho = d
    tries = 64 * max(1, d.bit_length())
    for _ in range(max_doublings):
        for _ in range(tries):
            s, t = lattice.sample_ellipsoid_dim2(g, rho, rng)
            val = f.value(s, t)
            if val >= 2 and arith.is_prime(val, rng):
                return s, t, val
        rho *= 2
    raise BudgetError("prime search exhausted its retry budget")


def _coprime_support(values) -> list[int]:
    """Pairwise-coprime integers > 1 covering the primes of every input."""
    base: list[int] = []
    queue = [v for v in values if v > 1]
    while queue:
        v = queue.pop()
        if v <= 1:
            continue
        clashed = False
        for i, w in enumerate(base):
            g = math.gcd(v, w)
            if g > 1:
                del base[i]
                queue.extend((g, w // g, v // g))
                clashed = True
                break
        if not clashed:
            base.append(v)
    return sorted(base)


def _coprime_value_vector(red: lattice.GramForm) -> tuple:
    """Coordinates (in the reduced basis) of v with gcd(f(v), f(b1)) = 1.

    Works from a pairwise-coprime factor list of f(b1), refined whenever
    a gcd exposes a proper divisor, so no factorization is needed.
    """
    g = red.gram
    r = red.rank
    fu = int(g[0][0])
    if fu == 1:
        return tuple(1 if i == 1 else 0 for i in range(r))
    part = arith.factor_bounded(fu, bound=10**4)
    base = _coprime_support([p for p, _ in part.factors] + [part.cofactor])
    while True:
        refined = None
        picks = []
        for a in base:
            pick = None
            for j in range(1, r):
                d = math.gcd(int(g[j][j]), a)
                if d == 1:
                    pick = tuple(1 if i == j else 0 for i in range(r))
                    break
                if d < a:
                    refined = (a, d)
                    break
            if refined:
                break
            if pick is None:
                # every diagonal is 0 mod a; a unit off-diagonal entry
                # makes f(e_j + e_k) = 2 g_jk a unit mod a
                for j in range(r):
                    for k in range(j + 1, r):
                        d = math.gcd(int(2 * g[j][k]), a)
                        if d == 1:
                            pick = tuple(1 if i in (j, k) else 0 for i in range(r))
                            break
                        if 1 < d < a:
                            refined = (a, d)
                            break
                    if pick or refined:
                        break
            if refined:
                break
            if pick is None:
                # a would divide every Gram entry, contradicting content 1
                raise BudgetError("no unit combination found; form not primitive?")
            picks.append(pick)
        if refined is None:
            break
        a, d = refined
        base.remove(a)
        base = _coprime_support(base + [d, a // d])
    v = [0] * r
    for idx, a in enumerate(base):
        mult = 1
        for j, other in enumerate(base):
            if j != idx:
                mult *= other
        for i in range(r):
            v[i] += picks[idx][i] * mult
    return tuple(v)


def _prime_hunt_plane(f: lattice.GramForm):
    """LLL basis plus a rank-2 sublattice u, v with coprime corner values.

    Returns (U, u_coords, v_coords, binary) where binary is the form
    restricted to Z u + Z v and the coords are rows in f's basis.
    """
    if f.rank == 2:
        a, b, c = f.binary_coeffs()
        return None, (1, 0), (0, 1), BinaryQF(a, b, c)
    red, u_mat = lattice.lll_reduce(f)
    v = _coprime_value_vector(red)
    fu = int(red.gram[0][0])
    fv = red.value_int(v)
    cross = red.inner(tuple(1 if i == 0 else 0 for i in range(f.rank)), v)
    binary = BinaryQF(fu, int(2 * cross), fv)
    assert math.gcd(fu, fv) == 1
    u_coords = u_mat[0]
    v_coords = tuple(
        sum(v[i] * u_mat[i][j] for i in range(f.rank)) for j in range(f.rank)
    )
    return u_mat, u_coords, v_coords, binary


def sample_prime_general(
    f: lattice.GramForm, rng: random.Random, max_doublings: int = 48
) -> tuple[tuple, int]:
    """Random x with f(x) prime, for a primitive integral form of rank >= 2."""
    if _form_content(f) != 1:
        raise ValidationError("a primitive form is required")
    _, u_coords, v_coords, binary = _prime_hunt_plane(f)
    s, t, val = sample_prime_binary(binary, rng, max_doublings)
    x = tuple(s * a + t * b for a, b in zip(u_coords, v_coords))
    assert f.value_int(x) == val
    return x, val


def sample_prime_large(
    f: lattice.GramForm, rho: int, rng: random.Random, max_tries: int | None = None
) -> tuple[tuple, int]:
    """Random x with f(x) a prime in [rho, rho^2].

    Rank 2 uses ellipse rejection sampling.  Higher ranks reject from the
    full-rank ellipsoid; if the window is too sparse for rejection to hit
    anything, fall back to exact enumeration so a prime is found whenever
    one exists at all.
    """
    if _form_content(f) != 1:
        raise ValidationError("a primitive form is required")
    if rho < 2:
        raise ValidationError("rho must be at least 2")
    hi = rho * rho
    if f.rank > 2:
        tries = max_tries if max_tries is not None else 512 * max(8, hi.bit_length())
        try:
            for _ in range(tries):
                x = lattice.sample_ellipsoid(f, hi, rng, max_tries=4096)
                val = f.value_int(x)
                if rho <= val <= hi and arith.is_prime(val):
                    return x, val
        except BudgetError:
            pass
        pool = []
        seen = 0
        for x, val in lattice.enumerate_by_value(f, hi, lower=rho):
            seen += 1
            if seen > 2 * 10**6:
                raise BudgetError("prime window too large to enumerate")
            if arith.is_prime(val):
                pool.append((x, val))
        if not pool:
            raise BudgetError("no prime found in the requested window")
        return pool[rng.randrange(len(pool))]
    _, u_coords, v_coords, binary = _prime_hunt_plane(f)
    g = binary.gram()
    if max_tries is None:
        max_tries = 256 * max(8, hi.bit_length())
    for _ in range(max_tries):
        s, t = lattice.sample_ellipsoid_dim2(g, hi, rng)
        val = binary.value(s, t)
        if rho <= val <= hi and arith.is_prime(val):
            x = tuple(s * a + t * b for a, b in zip(u_coords, v_coords))
            assert f.value_int(x) == val
            return x, val
    raise BudgetError("no prime found in the requested window")


def class_walk(D: int, m: int, rng: random.Random, steps: int | None = None):
    """Random walk over split-prime steps in the class group of D.

    Returns (cls, divisor, rep) with cls reduced, divisor a product of
    split primes coprime to m, and cls(rep) = divisor.  Up to the
    enumeration bound the generating set is verified against the full
    group and the walk is long enough (with lazy steps for aperiodicity)
    that the endpoint bias sits far below desk-scale statistical
    resolution.  Past that bound the group is never materialized: the
    walk steps through the split primes below the usual log-cubed cap,
    which generate under standard heuristics, with the step count scaled
    to the sqrt(|D|) size of the group.
    """
    if m < 1:
        raise ValidationError("m must be >= 1")
    _check_disc(D)
    enumerable = abs(D) <= 10**7
    if enumerable:
        cg = class_group(D)
        principal = cg.forms[cg.identity_index]
        if cg.h == 1:
            return principal, 1, (1, 0)
        h_bits = cg.h.bit_length()
    else:
        cg = None
        principal = reduce_form(principal_form(D))[0]
        h_bits = max(8, abs(D).bit_length() // 2)
    c = int(math.log(abs(D)) ** 3) + 20
    while True:
        gens = []
        for p in arith.primes_up_to(c):
            if m % p == 0:
                continue
            fp = prime_form(D, p)
            if fp is not None:
                gens.append((p, fp))
            if not enumerable and len(gens) >= 16:
                break
        if gens and not enumerable:
            break
        if gens:
            # the shortest prefix that spans the group keeps the span
            # check cheap; one or two primes usually suffice
            take = None
            for k in range(1, len(gens) + 1):
                if _generates(cg, [f for _, f in gens[:k]]):
                    take = k
                    break
            if take is not None:
                gens = gens[:take]
                break
        if c > 6 * abs(D):
            raise BudgetError("no generating set of split primes below the cap")
        c *= 2
    if steps is None:
        steps = 16 + 4 * h_bits
    cls, rep, divisor = principal, (1, 0), 1
    for _ in range(steps):
        if rng.randrange(2):
            continue
        p, fp = gens[rng.randrange(len(gens))]
        step = fp if rng.randrange(2) else fp.opposite()
        cls, rep = compose_with_coords(cls, rep, step, (1, 0))
        divisor *= p
    assert cls.value(*rep) == divisor
    return cls, divisor, rep


def _generates(cg: ClassGroup, forms) -> bool:
    idxs = [cg.index_of(f) for f in forms]
    reached = {cg.identity_index}
    frontier = [cg.identity_index]
    while frontier:
        cur = frontier.pop()
        for gi in idxs:
            nxt = cg.compose_indices(cur, gi)
            if nxt not in reached:
                reached.add(nxt)
                frontier.append(nxt)
    return len(reached) == cg.h
