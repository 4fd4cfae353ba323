"""Binary quadratic forms: reduction, composition, representations.

The oracle style throughout: recompute the claim by exhaustive search
(triple loops over coefficients, box scans over (x, y)) and compare.
"""

import math
import random
from fractions import Fraction

import pytest

from quatpath import arith, qform
from quatpath.errors import BudgetError, ValidationError
from quatpath.qform import (
    BinaryQF,
    ClassGroup,
    class_group,
    class_walk,
    compose,
    compose_with_coords,
    cornacchia,
    equivalent,
    fundamental_discriminant,
    genus_representation_count,
    prime_form,
    principal_form,
    reduce_form,
    representation_count,
    sample_prime_binary,
    sample_prime_general,
    sample_prime_large,
)

FUND_DISCS = [-3, -4, -7, -8, -11, -15, -20, -23, -24, -31, -35, -39, -40, -47]


def brute_reduced_forms(D):
    """Primitive reduced forms of discriminant D by coefficient scan."""
    out = []
    amax = math.isqrt(abs(D) // 3)
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if (b == -a or a == c) and b < 0:
                continue
            if math.gcd(math.gcd(a, abs(b)), c) == 1:
                out.append(BinaryQF(a, b, c))
    return sorted(out, key=lambda f: (f.a, f.b, f.c))


def brute_representations(f, n):
    """All (x, y) with f(x, y) = n, n >= 1."""
    out = []
    bx = math.isqrt(4 * f.c * n // abs(f.disc)) + 2
    by = math.isqrt(4 * f.a * n // abs(f.disc)) + 2
    for x in range(-bx, bx + 1):
        for y in range(-by, by + 1):
            if f.value(x, y) == n:
                out.append((x, y))
    return out


def test_binaryqf_validation():
    BinaryQF(1, 1, 1)
    with pytest.raises(ValidationError):
        BinaryQF(1, 3, 1)  # positive discriminant
    with pytest.raises(ValidationError):
        BinaryQF(-1, 0, -1)  # negative definite
    f = BinaryQF(2, 2, 3)
    assert f.disc == -20 and f.content == 1 and f.is_primitive
    assert BinaryQF(2, 2, 2).content == 2


def test_reduce_form_properties():
    rng = random.Random(40)
    for _ in range(400):
        a = rng.randrange(1, 40)
        b = rng.randrange(-60, 61)
        cmin = (b * b) // (4 * a) + 1
        c = cmin + rng.randrange(0, 40)
        f = BinaryQF(a, b, c)
        red, m = reduce_form(f)
        assert red.is_reduced
        assert f.transform(m) == red
        assert abs(linalg_det2(m)) == 1
        assert red.disc == f.disc
        # idempotent
        red2, m2 = reduce_form(red)
        assert red2 == red


def linalg_det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def test_every_form_reduces_into_the_class_list():
    for D in FUND_DISCS:
        forms = set(brute_reduced_forms(D))
        rng = random.Random(D)
        for _ in range(60):
            # random SL2 scramble of a random reduced form
            f = random.Random(rng.random()).choice(sorted(forms, key=str))
            m = random_sl2(rng)
            red, _ = reduce_form(f.transform(m))
            assert red in forms


def random_sl2(rng, steps=6):
    m = ((1, 0), (0, 1))
    for _ in range(steps):
        k = rng.randrange(-3, 4)
        if rng.randrange(2):
            s = ((1, k), (0, 1))
        else:
            s = ((1, 0), (k, 1))
        m = tuple(
            tuple(sum(m[i][t] * s[t][j] for t in range(2)) for j in range(2))
            for i in range(2)
        )
    return m


def test_class_group_matches_brute_enumeration():
    for D in FUND_DISCS + [-84, -120, -163, -95]:
        cg = class_group(D)
        assert list(cg.forms) == brute_reduced_forms(D)


def test_known_class_numbers():
    # classical values, cross-checked against the coefficient scan above
    for D, h in [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1), (-15, 2),
                 (-20, 2), (-23, 3), (-47, 5), (-71, 7), (-95, 8), (-163, 1)]:
        assert class_group(D).h == h == len(brute_reduced_forms(D))


def test_principal_and_prime_forms():
    for D in FUND_DISCS:
        f = principal_form(D)
        assert f.disc == D and f.is_reduced
        assert f.value(1, 0) == 1
        for p in [2, 3, 5, 7, 11, 13]:
            g = prime_form(D, p)
            if arith.kronecker(D, p) != 1:
                assert g is None
                continue
            assert g.a == p and g.disc == D
            red, _ = reduce_form(g)
            assert red in set(class_group(D).forms)


def test_compose_with_coords_value_identity():
    rng = random.Random(41)
    for D in FUND_DISCS:
        cg = class_group(D)
        for _ in range(20):
            f1 = cg.forms[rng.randrange(cg.h)]
            f2 = cg.forms[rng.randrange(cg.h)]
            v1 = (rng.randrange(-5, 6), rng.randrange(-5, 6))
            v2 = (rng.randrange(-5, 6), rng.randrange(-5, 6))
            h, w = compose_with_coords(f1, v1, f2, v2)
            assert h.is_reduced and h.disc == D
            assert h.value(*w) == f1.value(*v1) * f2.value(*v2)


def test_class_group_axioms():
    for D in [-23, -47, -84, -95, -120]:
        cg = class_group(D)
        table = cg.composition_table()
        n = cg.h
        e = cg.identity_index
        for i in range(n):
            assert table[i][e] == table[e][i] == i
            inv = cg.inverse_index(i)
            assert table[i][inv] == e
            for j in range(n):
                assert table[i][j] == table[j][i]
                for k in range(n):
                    assert table[table[i][j]][k] == table[i][table[j][k]]


def test_order_of_elements_divides_h():
    for D in [-23, -47, -71, -95]:
        cg = class_group(D)
        for i in range(cg.h):
            assert cg.h % cg.order_of(i) == 0


def test_genus_structure():
    for D in [-84, -120, -95, -420]:
        cg = class_group(D)
        # principal genus is exactly the squares
        sq = sorted({cg.compose_indices(i, i) for i in range(cg.h)})
        assert list(cg.principal_genus) == sq
        # genus partition has equal cells, count a power of two
        cells = {}
        for i in range(cg.h):
            cells.setdefault(cg.genus_ids[i], []).append(i)
        sizes = {len(v) for v in cells.values()}
        assert len(sizes) == 1
        assert cg.genus_count == len(cells)
        assert cg.genus_count & (cg.genus_count - 1) == 0
        # classes in one genus represent the same residues
        for i in range(cg.h):
            for j in range(cg.h):
                same = cg.genus_ids[i] == cg.genus_ids[j]
                assert cg.same_genus(i, j) == same
                if same:
                    assert cg.genus_residues(i) == cg.genus_residues(j)


def test_cornacchia_against_brute():
    rng = random.Random(42)
    for D in FUND_DISCS:
        cg = class_group(D)
        for f in cg.forms:
            for n in range(1, 120):
                fz = arith.factor_completely(n)
                got = cornacchia(f, n, fz)
                want = brute_representations(f, n)
                if got is None:
                    assert not want, (D, f, n)
                else:
                    assert f.value(*got) == n
                    assert got in want


def test_cornacchia_input_validation():
    f = principal_form(-4)
    with pytest.raises(ValidationError):
        cornacchia(BinaryQF(2, 2, 2), 4, arith.factor_completely(4))  # imprimitive
    with pytest.raises(ValidationError):
        cornacchia(BinaryQF(5, 4, 1), 5, arith.factor_completely(5))  # not reduced
    with pytest.raises(ValidationError):
        # incomplete factorization is refused
        incomplete = arith.Factorization.from_dict({2: 2}, cofactor=10007)
        cornacchia(f, 10007 * 4, incomplete)
    with pytest.raises(ValidationError):
        # factorization of the wrong number is refused
        cornacchia(f, 10, arith.factor_completely(12))
    assert cornacchia(f, 0, arith.factor_completely(1)) == (0, 0)


def test_fundamental_discriminant():
    rng = random.Random(43)
    for _ in range(300):
        D = -rng.randrange(3, 4000)
        if D % 4 not in (0, 1):
            continue
        d, m = fundamental_discriminant(D)
        assert d * m * m == D
        assert d % 4 in (0, 1)
        # d squarefree odd part, and 4-part minimal
        if d % 4 == 1:
            assert squarefree(abs(d))
        else:
            assert d % 4 == 0 and squarefree(abs(d) // 4) and (d // 4) % 4 in (2, 3)


def squarefree(n):
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def test_representation_counts_match_brute():
    rng = random.Random(44)
    for D in [-4, -7, -20, -23, -24]:
        cg = class_group(D)
        for n in range(1, 80):
            total = 0
            for f in cg.forms:
                r = representation_count(f, n)
                assert r == len(brute_representations(f, n))
                total += r
            assert genus_representation_count(D, n) == total


def test_divisor_sum_identity():
    # sum over the full class list of r(f, N) equals w * sum of chi(d)
    # over divisors of N, for fundamental D coprime to N
    for D in [-4, -3, -7, -8, -20, -23, -40]:
        cg = class_group(D)
        d, _ = fundamental_discriminant(D)
        w = {(-3): 6, (-4): 4}.get(D, 2)
        for n in range(1, 60):
            if math.gcd(n, D) != 1:
                continue
            total = sum(representation_count(f, n) for f in cg.forms)
            chi_sum = sum(arith.kronecker(d, v) for v in arith.factor_completely(n).divisors())
            assert total == w * chi_sum, (D, n)


def test_sample_prime_binary():
    rng = random.Random(45)
    for f in [principal_form(-4), principal_form(-8), BinaryQF(2, 1, 3),
              BinaryQF(3, 1, 4)]:
        for _ in range(25):
            x, y, val = sample_prime_binary(f, rng)
            assert f.value(x, y) == val
            assert arith.is_prime(val)
    with pytest.raises(ValidationError):
        sample_prime_binary(BinaryQF(2, 2, 2), rng)


def test_sample_prime_general_rank4():
    from quatpath.lattice import GramForm

    rng = random.Random(46)
    # a primitive rank-4 Gram with nontrivial off-diagonal structure
    g = GramForm(
        (
            (2, Fraction(1, 2), 0, 0),
            (Fraction(1, 2), 3, Fraction(1, 2), 0),
            (0, Fraction(1, 2), 5, Fraction(1, 2)),
            (0, 0, Fraction(1, 2), 7),
        )
    )
    for _ in range(25):
        x, val = sample_prime_general(g, rng)
        assert g.value_int(x) == val
        assert arith.is_prime(val)


def test_sample_prime_large_window():
    from quatpath.lattice import GramForm

    rng = random.Random(47)
    f2 = principal_form(-4).gram()
    for rho in (10, 50, 211):
        x, val = sample_prime_large(f2, rho, rng)
        assert rho <= val <= rho * rho
        assert arith.is_prime(val)
    g4 = GramForm(
        ((4, 1, 0, 0), (1, 6, 1, 0), (0, 1, 8, 1), (0, 0, 1, 9))
    )
    for rho in (12, 40):
        x, val = sample_prime_large(g4, rho, rng)
        assert g4.value_int(x) == val
        assert rho <= val <= rho * rho and arith.is_prime(val)
    with pytest.raises(ValidationError):
        sample_prime_large(f2, 1, rng)


def test_class_walk_endpoint_and_witness():
    rng = random.Random(48)
    for D, m in [(-23, 1), (-47, 30), (-95, 7)]:
        cg = class_group(D)
        for _ in range(30):
            cls, divisor, rep = class_walk(D, m, rng)
            assert cls in set(cg.forms)
            assert cls.value(*rep) == divisor
            f = arith.factor_completely(divisor)
            for p, _e in f.factors:
                assert math.gcd(p, m) == 1
                assert arith.kronecker(D, p) == 1


def test_class_walk_mixes():
    # h(-23) = 3: all classes hit roughly equally
    rng = random.Random(49)
    cg = class_group(-23)
    counts = {f: 0 for f in cg.forms}
    n = 1200
    for _ in range(n):
        cls, _, _ = class_walk(-23, 1, rng)
        counts[cls] += 1
    for c in counts.values():
        assert 0.7 * n / 3 < c < 1.4 * n / 3


def test_class_walk_trivial_group():
    rng = random.Random(50)
    cls, divisor, rep = class_walk(-4, 10, rng)
    assert cls == principal_form(-4)
    assert divisor == 1 and cls.value(*rep) == 1
