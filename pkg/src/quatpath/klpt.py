"""Brandt-graph walks and equivalence search hitting prescribed norms.

Left ideals of the special maximal order fall into finitely many
classes; the ell-neighbor relation (index-ell^2 sublattices with norm
multiplied by ell) makes this set into the Brandt graph, whose walks
mix rapidly.  equiv_ideal chains a randomizing walk, a prime-norm
reduction with a controlled non-residue condition, and the master norm
equation into an equivalent ideal of norm exactly n1*n2, times one
stray factor of ell when local solvability forces it.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from . import arith, eqsolver, linalg, qform, quat
from .arith import Factorization
from .errors import BudgetError, ValidationError

# retry budgets for the equivalence search; rounds are cheap at desk
# scale so the caps are generous
ROUND_CAP = 48
PRIME_DRAWS_PER_ROUND = 12
PRIME_SAMPLE_TRIES = 96
STEP_TRIES = 4096


@dataclass(frozen=True)
class WalkSpec:
    """A walk plan: the total norm and the per-step prime sequence.

    steps must multiply out to exactly the factored norm; the primes may
    be interleaved in any order.
    """

    norm: Factorization
    steps: tuple

    def __post_init__(self):
        if not isinstance(self.norm, Factorization) or not self.norm.complete:
            raise ValidationError("walk norm needs a complete factorization")
        want = {p: e for p, e in self.norm.factors}
        if dict(Counter(self.steps)) != want:
            raise ValidationError("steps must realize the factored norm")
        for p in want:
            if not arith.is_prime(p):
                raise ValidationError("every walk step must be prime")

    @staticmethod
    def from_norm(fac: Factorization) -> "WalkSpec":
        steps = []
        for p, e in fac.factors:
            steps.extend([p] * e)
        return WalkSpec(fac, tuple(steps))


# ---------------------------------------------------------------------------
# neighbors in the Brandt graph


def _rank_one_in_quotient(ideal, ell, coeffs):
    """The element picked by coeffs when it spans a line mod ell, else None.

    ideal/ell*ideal is free of rank one over the mod-ell order, which is
    a full 2x2 matrix algebra for ell away from p; an element generates
    a proper nonzero left submodule exactly when its normalised norm
    vanishes mod ell without the element itself vanishing.
    """
    if all(c % ell == 0 for c in coeffs):
        return None
    w = ideal.element_from(coeffs)
    ratio = w.nrd() / ideal.nrd
    assert ratio.denominator == 1
    if int(ratio) % ell:
        return None
    return w


def _step_lattice(order, ideal, w, ell):
    """The neighbor order*w + ell*ideal for a rank-one w in ideal."""
    rows = [b * w for b in order.basis_elements()]
    rows += [b * ell for b in ideal.basis_elements()]
    return quat.QuatLattice.from_rows(ideal.alg, rows)


def _neighbor_lattices(order, ideal, ell):
    """All distinct neighbors, sorted canonically.  No preconditions."""
    out, seen = [], set()
    for coeffs in itertools.product(range(ell), repeat=4):
        w = _rank_one_in_quotient(ideal, ell, coeffs)
        if w is None:
            continue
        nb = _step_lattice(order, ideal, w, ell)
        key = (nb.den, nb.mat)
        if key not in seen:
            seen.add(key)
            out.append(nb)
    out.sort(key=lambda lat: (lat.den, lat.mat))
    return out


def ell_neighbors(ideal, ell):
    """The ell + 1 neighbors of a left ideal: sublattices with norm
    scaled by ell and index ell^2, each again a left ideal of the same
    left order.

    Enumerates rank-one classes of the quotient mod ell, so the cost
    grows like ell^4; fine for the walk primes this package targets.
    """
    if not arith.is_prime(ell):
        raise ValidationError("ell must be prime")
    if ell == ideal.alg.p:
        raise ValidationError("ell must differ from the base prime p")
    if ideal.nrd.denominator == 1 and ideal.nrd.numerator % ell == 0:
        raise ValidationError("ell must not divide the norm of the ideal")
    order = quat.left_order(ideal)
    out = _neighbor_lattices(order, ideal, ell)
    assert len(out) == ell + 1
    for nb in out:
        assert nb.nrd == ideal.nrd * ell
        assert nb.is_sublattice_of(ideal)
    return tuple(out)


def random_walk(ideal, spec, rng):
    """Walk endpoint: one uniformly chosen neighbor per step of spec.

    Steps draw random rank-one elements of ideal/ell*ideal instead of
    enumerating neighbors; the ell + 1 lines have equally many rank-one
    generators, so each step is uniform.  The endpoint sits inside the
    input with norm scaled by the walk norm, and keeps the left order.
    """
    if not isinstance(spec, WalkSpec):
        raise ValidationError("spec must be a WalkSpec")
    p = ideal.alg.p
    for ell in spec.steps:
        if ell == p:
            raise ValidationError("walk steps must avoid the base prime p")
    if not spec.steps:
        return ideal
    order = quat.left_order(ideal)
    cur = ideal
    for ell in spec.steps:
        w = None
        for _ in range(STEP_TRIES):
            coeffs = tuple(rng.randrange(ell) for _ in range(4))
            w = _rank_one_in_quotient(cur, ell, coeffs)
            if w is not None:
                break
        if w is None:
            raise BudgetError("no rank-one step generator found")
        cur = _step_lattice(order, cur, w, ell)
    assert cur.nrd == ideal.nrd * spec.norm.value()
    assert cur.is_sublattice_of(ideal)
    assert quat.left_order(cur) == order
    return cur


def ideal_class_representatives(order, ell: int = 2):
    """One ideal per left-ideal class of a maximal order, deterministic.

    Breadth-first search along ell-neighbors starting at the order
    itself, keeping the first ideal of each new class; the graph is
    connected, so this reaches everything.
    """
    if not order.is_maximal_order():
        raise ValidationError("class enumeration needs a maximal order")
    if not arith.is_prime(ell) or ell == order.alg.p:
        raise ValidationError("ell must be a prime different from p")
    reps = [order]
    queue = [order]
    while queue:
        cur = queue.pop(0)
        for nb in _neighbor_lattices(order, cur, ell):
            if any(quat.ideal_equivalence_test(r, nb) is not None for r in reps):
                continue
            reps.append(nb)
            queue.append(nb)
    return tuple(reps)


# ---------------------------------------------------------------------------
# the equivalence search


class _RoundRetry(Exception):
    """One search round failed for a transient reason; try a fresh one."""

    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


@dataclass
class KlptContext:
    """Transcript of one successful equivalence search.

    Every intermediate was checked against its defining relation when it
    was built; verify() re-runs the whole chain from the stored pieces.
    """

    ideal: quat.QuatLattice
    n1: Factorization
    n2: Factorization
    ell: int
    randomized: quat.QuatLattice  # walk endpoint inside the input ideal
    prime_ideal: quat.QuatLattice  # equivalent to it, prime norm
    to_prime_witness: quat.QuatElement  # element carrying randomized there
    prime_norm: int
    norm_rep: quat.QuatElement  # special-order element of that norm
    line_select: tuple  # (b0, b1) picking the line pairing the two
    coeff_lattice: tuple  # 2x2 columns spanning the paired coefficient set
    quadratic_sol: tuple  # (s, t, x, y) solving the master equation
    extra_exp: int  # 0 or 1, the stray ell exponent
    combined: quat.QuatElement
    connector: quat.QuatElement  # the equivalence witness, inside randomized
    output: quat.QuatLattice
    rounds: int
    failures: dict

    def verify(self):
        so = quat.special_order(self.ideal.alg)
        p = self.ideal.alg.p
        n1v, n2v = self.n1.value(), self.n2.value()
        n = self.prime_norm
        target = n2v * self.ell**self.extra_exp
        assert self.randomized.is_sublattice_of(self.ideal)
        assert self.randomized.nrd == self.ideal.nrd * n1v
        assert arith.is_prime(n)
        assert arith.kronecker(self.ell, n) == -1
        assert (
            quat.equiv_from_element(self.randomized, self.to_prime_witness)
            == self.prime_ideal
        )
        assert self.prime_ideal.norm() == n
        assert so.order.contains(self.norm_rep)
        assert self.norm_rep.nrd() == n
        b0, b1 = self.line_select
        g = self.coeff_lattice
        assert g[0][0] * g[1][1] - g[0][1] * g[1][0] in (n, -n)
        cols = linalg.hnf(((g[0][0], g[1][0]), (g[0][1], g[1][1])))
        want = linalg.hnf(((b0, b1), (n, 0), (0, n)))
        assert tuple(cols) == tuple(want)
        w = self.norm_rep * (so.alg.one * b0 + so.omega * b1) * so.alg.j
        assert so.order.scale(n).add(so.order.mul_right(w)) == self.prime_ideal
        s, t, x, y = self.quadratic_sol
        f = so.f
        assert n * n * f.value(s, t) + p * f.transform(g).value(x, y) == target
        xp = g[0][0] * x + g[0][1] * y
        yp = g[1][0] * x + g[1][1] * y
        assert self.combined == so.embed(n * s, n * t, xp, yp)
        assert self.combined.nrd() == target
        prod = self.norm_rep * self.combined
        assert self.prime_ideal.contains(prod)
        assert prod * self.to_prime_witness * Fraction(1, n) == self.connector
        assert self.randomized.contains(self.connector)
        assert quat.equiv_from_element(self.ideal, self.connector) == self.output
        assert self.output.norm() == n1v * target
        return True


def _window_base(p, ell, n2v):
    """Lower edge rho of the prime-norm window [rho, rho^2].

    A workable prime norm N has to leave room in n2 for both layers of
    the master equation (at least 2*N^2 + p), capping N at
    sqrt((n2 - p) / 2); hunting in [sqrt(cap), cap] keeps the window
    wide without breaching that.
    """
    room = (n2v - p) // 2
    if room < 9:
        raise BudgetError("n2 leaves no room for the prime-norm window at this p")
    n_hi = math.isqrt(room)
    rho = max(3, ell + 1, math.isqrt(n_hi))
    if rho * rho > n_hi:
        raise BudgetError("n2 too small for a usable prime-norm window with this ell")
    return rho


def _line_select(so, prime_ideal, n, norm_rep):
    """(b0, b1) with prime_ideal = O*n + O*norm_rep*(b0 + b1*omega)*j.

    The admissible pairs form a subgroup mod n: the integer kernel of
    the stacked relation matrix, projected to the first two coordinates.
    Testing the two projected generators decides existence, since any
    member outside the degenerate subgroup generates the right line.
    """
    order = so.order
    alg = so.alg
    c1 = order.coordinates_of(norm_rep * alg.j)
    c2 = order.coordinates_of(norm_rep * so.omega * alg.j)
    rows = [c1, c2]
    rows += [order.coordinates_of(b) for b in prime_ideal.basis_elements()]
    rows += [tuple(n if i == k else 0 for i in range(4)) for k in range(4)]
    kern = linalg.left_kernel(tuple(rows))
    proj = [(k[0] % n, k[1] % n) for k in kern] + [(n, 0), (0, n)]
    h = linalg.hnf(tuple(proj))
    for cand in h:
        b0, b1 = cand[0] % n, cand[1] % n
        if b0 == 0 and b1 == 0:
            continue
        w = norm_rep * (alg.one * b0 + so.omega * b1) * alg.j
        if order.scale(n).add(order.mul_right(w)) == prime_ideal:
            return (b0, b1)
    return None


def _coeff_columns(line, n):
    """Column matrix whose column lattice is Z*line + n*Z^2, det n."""
    h = linalg.hnf(((line[0], line[1]), (n, 0), (0, n)))
    g = ((h[0][0], h[1][0]), (h[0][1], h[1][1]))
    assert g[0][0] * g[1][1] - g[0][1] * g[1][0] in (n, -n)
    return g


def _extra_exponent(f, g, n, p, n2v, ell):
    """The e in {0, 1} making the master equation solvable mod n.

    Mod n the left layer vanishes and the right one is a square times
    p*f(image line of g), so exactly one choice of e works because ell
    is a non-residue mod n.  None when the image line is isotropic for
    f; that is the degenerate suborder-ideal case, retried upstream.
    """
    col = (g[0][0] % n, g[1][0] % n)
    if col == (0, 0):
        col = (g[0][1] % n, g[1][1] % n)
    lam = f.value(col[0], col[1]) % n
    if lam == 0:
        return None
    base = n2v * arith.inv_mod(p * lam % n, n) % n
    if arith.kronecker(base, n) == 1:
        return 0
    assert arith.kronecker(base * ell % n, n) == 1
    return 1


def _one_round(so, ideal, spec, n1, n2, ell, rho, rng, round_no, failures):
    alg = so.alg
    p = alg.p
    n2v = n2.value()
    walked = random_walk(ideal, spec, rng)
    pick = None
    for _ in range(PRIME_DRAWS_PER_ROUND):
        try:
            cand, wit = quat.equiv_prime_large_nonresidue(
                walked, rho, ell, rng, max_tries=PRIME_SAMPLE_TRIES
            )
        except BudgetError:
            raise _RoundRetry("prime window empty") from None
        n = cand.norm()
        if n == p or (n2v * ell) % n == 0 or so.f.disc % n == 0:
            continue
        if n < p and arith.kronecker(so.f.disc, n) != 1:
            # below p the norm form has no second layer to lean on, so
            # its binary part must represent the prime on its own
            continue
        pick = (cand, wit, n)
        break
    if pick is None:
        raise _RoundRetry("no admissible prime norm")
    prime_ideal, wit, n = pick
    try:
        norm_rep = eqsolver.represent_in_O0(alg, n, rng)
    except (ValidationError, BudgetError):
        raise _RoundRetry("prime norm not represented") from None
    line = _line_select(so, prime_ideal, n, norm_rep)
    if line is None:
        raise _RoundRetry("line pairing fixed point")
    g = _coeff_columns(line, n)
    e = _extra_exponent(so.f, g, n, p, n2v, ell)
    if e is None:
        raise _RoundRetry("isotropic coefficient line")
    target = n2v * ell**e
    try:
        inst = eqsolver.equation_instance(
            so.f, g, p, target, det_fac=Factorization(((n, 1),), 1)
        )
        s, t, x, y = eqsolver.solve_master(inst, rng)
    except ValidationError:
        raise _RoundRetry("local obstruction") from None
    except BudgetError:
        raise _RoundRetry("norm window empty") from None
    xp = g[0][0] * x + g[0][1] * y
    yp = g[1][0] * x + g[1][1] * y
    combined = so.embed(n * s, n * t, xp, yp)
    assert combined.nrd() == target
    prod = norm_rep * combined
    assert prime_ideal.contains(prod)
    connector = prod * wit * Fraction(1, n)
    assert walked.contains(connector)
    out = quat.equiv_from_element(ideal, connector)
    assert out.norm() == n1.value() * target
    ctx = KlptContext(
        ideal=ideal,
        n1=n1,
        n2=n2,
        ell=ell,
        randomized=walked,
        prime_ideal=prime_ideal,
        to_prime_witness=wit,
        prime_norm=n,
        norm_rep=norm_rep,
        line_select=line,
        coeff_lattice=g,
        quadratic_sol=(s, t, x, y),
        extra_exp=e,
        combined=combined,
        connector=connector,
        output=out,
        rounds=round_no,
        failures=dict(failures),
    )
    ctx.verify()
    return ctx


def equiv_ideal_context(ideal, n1, n2, ell, rng):
    """Run the equivalence search and keep the whole transcript.

    Each round walks afresh, reduces to a fresh prime norm with ell a
    non-residue, pairs the prime against a norm representative, and
    hands the resulting two-layer norm equation to the master solver.
    Transient failures retry up to ROUND_CAP times; the final error
    carries the failure tally.
    """
    alg = ideal.alg
    so = quat.special_order(alg)
    p = alg.p
    if not isinstance(n1, Factorization) or not n1.complete:
        raise ValidationError("n1 must be a complete factorization")
    if not isinstance(n2, Factorization) or not n2.complete:
        raise ValidationError("n2 must be a complete factorization")
    if not arith.is_prime(ell) or ell == p:
        raise ValidationError("ell must be a prime different from p")
    if any(q == p for q in n1.primes()):
        raise ValidationError("n1 must avoid the base prime p")
    n2v = n2.value()
    if n2v % p == 0:
        raise ValidationError("n2 must be coprime to p")
    if not ideal.is_sublattice_of(so.order) or so.order.mul(ideal) != ideal:
        raise ValidationError("input must be an integral left ideal of the special order")
    rho = _window_base(p, ell, n2v)
    spec = WalkSpec.from_norm(n1)
    failures = Counter()
    for round_no in range(1, ROUND_CAP + 1):
        try:
            return _one_round(
                so, ideal, spec, n1, n2, ell, rho, rng, round_no, failures
            )
        except _RoundRetry as r:
            failures[r.reason] += 1
    raise BudgetError(
        f"no equivalent ideal found in {ROUND_CAP} rounds; failures {dict(failures)}"
    )


def equiv_ideal(ideal, n1, n2, ell, rng):
    """An ideal equivalent to the input of norm n1*n2 or n1*n2*ell.

    n1 and n2 arrive factored; n1 shapes the randomizing walk, n2 the
    norm equation, and the extra factor of ell appears exactly when the
    equation is only solvable in the twisted class mod the chosen prime.
    """
    return equiv_ideal_context(ideal, n1, n2, ell, rng).output


def powersmooth_equiv(ideal, bound, rng):
    """An equivalent ideal whose norm is bound-powersmooth.

    Both walk norms take every prime whose square fits under the bound,
    exponents balanced so each prime power of the output norm stays at
    or below it; the stray factor (ell = 2 here) is budgeted up front,
    and the 2-exponent floor keeps the target clear of the bad 2-adic
    classes of the norm form.
    """
    p = ideal.alg.p
    need2 = 3 if p % 8 == 5 else 2
    e2 = 0
    while 2 ** (2 * (e2 + 1) + 1) <= bound:
        e2 += 1
    if e2 < need2:
        raise BudgetError("bound too small for the 2-part of the norm window")
    factors = [(2, e2)]
    q = 3
    while q * q <= bound:
        if q != p:
            e = 1
            while q ** (2 * (e + 1)) <= bound:
                e += 1
            factors.append((q, e))
        q = arith.next_prime(q)
    n = Factorization(tuple(factors), 1)
    ctx = equiv_ideal_context(ideal, n, n, 2, rng)
    out = ctx.output
    assert out.norm() == n.value() ** 2 * 2**ctx.extra_exp
    exps = {q: 2 * e for q, e in n.factors}
    exps[2] += ctx.extra_exp
    assert all(q**e <= bound for q, e in exps.items())
    return out
