"""Closed-form J-function coefficient evaluators.

Covered: projective spaces, products, Grassmannians (closed form in two
selectable shapes, plus the structured jumping-profile route through the
Weyl pushforward), type-A partial flags (three selectable shapes), and
the conjectural type B/C/D complete-flag evaluators.

Each coefficient is kept as a sum of factored terms, one per composition
of the degree, so that output can stay in product form and sums assemble
over the union denominator.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import (
    FactoredTerm,
    Permutation,
    Polynomial,
    RationalExpression,
    factored_sums_equal,
    poly_one,
    sum_factored,
)
from .localization import (
    check_level_invariant,
    coset_permutations,
    relative_tangent_euler_factors,
)
from .spaces import (
    JumpProfile,
    SpaceDescriptor,
    SpaceError,
    check_multidegree,
    compositions,
    multidegrees_up_to,
    profiles_of_degree,
)


# ---------------------------------------------------------------------------
# Small factor builders.  A "line" is the table index of an L-variable; the
# dual line has exponent -1.
# ---------------------------------------------------------------------------

def _one_minus_mono(table, pairs, q_power=0):
    """1 - q^q_power * prod(var^exp) as a polynomial."""
    exps = [0] * len(table)
    exps[0] = q_power
    for idx, e in pairs:
        exps[idx] += e
    return poly_one(table) - Polynomial.monomial(table, tuple(exps))


def ratio_R_term(table, a, u_pairs):
    """Finite interpretation R(a; u) of the doubly-infinite q-ratio.

    R(a;u) = prod_{m=1..a}(1-uq^m) for a >= 0 and 1/prod_{m=a+1..0}(1-uq^m)
    for a < 0; u is given as a list of (var index, exponent) pairs.
    """
    t = FactoredTerm.one(table)
    if a >= 1:
        for m in range(1, a + 1):
            t = t.times_poly(_one_minus_mono(table, u_pairs, m), 1)
    elif a <= -1:
        for m in range(a + 1, 1):
            t = t.times_poly(_one_minus_mono(table, u_pairs, m), -1)
    return t


def ratio_R(table, a, u_pairs):
    """R(a; u) as a rational expression (see ratio_R_term)."""
    return ratio_R_term(table, a, u_pairs).value()


def sigma_profile(comp):
    """(-1)^(sum over pairs of |d_a - d_b| - 1), over unequal pairs."""
    s = 0
    for a in range(len(comp)):
        for b in range(a + 1, len(comp)):
            if comp[a] != comp[b]:
                s += abs(comp[a] - comp[b]) - 1
    return -1 if s % 2 else 1


def _pair_term_oriented(table, lines, comp):
    """Degree-oriented pair ratios with the profile sign.

    For each unequal pair the ratio (1 - L_h^d L_l q^D)/(1 - L_h^d L_l)
    puts the dual on the higher-degree member h; D is the positive gap.
    The parity prefactor sigma makes the term symmetric under relabeling.
    """
    t = FactoredTerm.one(table).times_scalar(sigma_profile(comp))
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            if comp[a] == comp[b]:
                continue
            if comp[a] > comp[b]:
                h, l, gap = a, b, comp[a] - comp[b]
            else:
                h, l, gap = b, a, comp[b] - comp[a]
            u = [(lines[h], -1), (lines[l], 1)]
            t = t.times_poly(_one_minus_mono(table, u, gap), 1)
            t = t.times_poly(_one_minus_mono(table, u, 0), -1)
    return t


def _pair_term_literal(table, lines, comp):
    """Displayed pair ratios: dual on the higher index j for k < j, with the
    (-1)^((m-1)d) prefactor."""
    m = len(lines)
    d = sum(comp)
    sign = -1 if ((m - 1) * d) % 2 else 1
    t = FactoredTerm.one(table).times_scalar(sign)
    for k in range(m):
        for j in range(k + 1, m):
            u = [(lines[j], -1), (lines[k], 1)]
            t = t.times_poly(_one_minus_mono(table, u, comp[j] - comp[k]), 1)
            t = t.times_poly(_one_minus_mono(table, u, 0), -1)
    return t


def _pair_term_theorem(table, lines, comp):
    """Theorem-statement pair factors: R(d_k - d_j; L_j^d L_k) over ordered
    pairs k != j, with the (-1)^((m-1)d) prefactor."""
    m = len(lines)
    d = sum(comp)
    sign = -1 if ((m - 1) * d) % 2 else 1
    t = FactoredTerm.one(table).times_scalar(sign)
    for j in range(m):
        for k in range(m):
            if j == k:
                continue
            u = [(lines[j], -1), (lines[k], 1)]
            t = t.times_term(ratio_R_term(table, comp[k] - comp[j], u))
    return t


def _lines_q_term(table, lines, comp, n):
    """prod_a prod_{l=1..d_a} (1 - L_a^d q^l)^(-n)."""
    t = FactoredTerm.one(table)
    for a, da in zip(lines, comp):
        for l in range(1, da + 1):
            t = t.times_poly(_one_minus_mono(table, [(a, -1)], l), -n)
    return t


GRASSMANNIAN_FORMS = ("invariant", "literal")
FLAG_FORMS = ("canonical", "literal", "theorem_ratio")


def grassmannian_term(table, lines, comp, n, form="invariant"):
    if form == "invariant":
        t = _pair_term_oriented(table, lines, comp)
    elif form == "literal":
        t = _pair_term_literal(table, lines, comp)
    else:
        raise SpaceError("unknown grassmannian form %r" % form)
    return t.times_term(_lines_q_term(table, lines, comp, n))


class JCoefficient:
    """A fixed-degree coefficient of a J-function, as a sum of factored terms."""

    __slots__ = ("space", "degree", "form", "conjectural", "terms", "_value")

    def __init__(self, space, degree, terms, form=None, conjectural=False):
        self.space = space
        self.degree = tuple(degree)
        self.form = form
        self.conjectural = conjectural
        self.terms = terms
        self._value = None

    def value(self):
        if self._value is None:
            self._value = sum_factored([t for _, t in self.terms],
                                       self.space.table())
        return self._value

    def term_labels(self):
        return [label for label, _ in self.terms]

    def text(self):
        if not self.terms:
            return "0"
        return " + ".join(t.text() for _, t in self.terms)

    def json_obj(self):
        obj = {
            "space": self.space.json_obj(),
            "degree": list(self.degree),
            "conjectural": self.conjectural,
            "value": self.value().json_obj(),
        }
        if self.form is not None:
            obj["form"] = self.form
        return obj

    def __repr__(self):
        return "JCoefficient(%s, d=%r)" % (self.space.text(), self.degree)


def projective_j(n, d):
    """J-coefficient of the projective space of lines in C^n: the single
    term 1/prod_{l=1..d}(1 - L^d q^l)^n."""
    if n < 2:
        raise SpaceError("projective space needs n >= 2")
    if d < 0:
        raise SpaceError("degree must be nonnegative")
    space = SpaceDescriptor.projective(n)
    table = space.table()
    lines = space.level_var_indices(1)
    term = _lines_q_term(table, lines, (d,), n)
    return JCoefficient(space, (d,), [((d,), term)])


def grassmannian_j(r, n, d, form="invariant"):
    """Closed-form Grassmannian J-coefficient, one term per composition.

    The default "invariant" shape uses degree-oriented pair ratios with a
    parity prefactor; it is symmetric in the lines and q-regular term by
    term.  The "literal" shape keeps the displayed orientation and the
    (-1)^((r-1)d) prefactor; its terms differ from the invariant ones by
    monomial units and its sum is neither symmetric nor q-regular.
    """
    if not (1 <= r <= n):
        raise SpaceError("grassmannian needs 1 <= r <= n")
    if d < 0:
        raise SpaceError("degree must be nonnegative")
    if form not in GRASSMANNIAN_FORMS:
        raise SpaceError("unknown grassmannian form %r" % form)
    space = SpaceDescriptor.grassmannian(r, n)
    table = space.table()
    lines = space.level_var_indices(1)
    terms = []
    for comp in compositions(d, r):
        terms.append((comp, grassmannian_term(table, lines, comp, n, form)))
    return JCoefficient(space, (d,), terms, form=form)


def quot_profile_tangent_euler_term(profile, n, table, lines):
    """Tangent Euler class of a jumping-profile fixed locus, as displayed:

    prod_i prod_s prod_{l=1..D_i}(1 - L_{pos}^d q^l)^n over the blocks,
    divided by prod_{i>j} (-1)^(r_i r_j (D_ij - 1)) prod_{s,t}
    (1 - L_hi^d L_lo q^D_ij).
    """
    blocks = profile.blocks()
    starts = []
    acc = 0
    for _, size in blocks:
        starts.append(acc)
        acc += size
    t = FactoredTerm.one(table)
    for (deg, size), start in zip(blocks, starts):
        for s in range(size):
            for l in range(1, deg + 1):
                t = t.times_poly(
                    _one_minus_mono(table, [(lines[start + s], -1)], l), n)
    for hi in range(len(blocks)):
        for lo in range(hi):
            gap = blocks[hi][0] - blocks[lo][0]
            sign_exp = blocks[hi][1] * blocks[lo][1] * (gap - 1)
            if sign_exp % 2:
                t = t.times_scalar(-1)
            for s in range(blocks[hi][1]):
                for u in range(blocks[lo][1]):
                    vh = lines[starts[hi] + s]
                    vl = lines[starts[lo] + u]
                    t = t.times_poly(
                        _one_minus_mono(table, [(vh, -1), (vl, 1)], gap), -1)
    return t


def quot_profile_tangent_euler(profile, n):
    """Rational-expression form of quot_profile_tangent_euler_term over the
    Grassmannian table of the profile's rank."""
    space = SpaceDescriptor.grassmannian(profile.r, n)
    table = space.table()
    lines = space.level_var_indices(1)
    return quot_profile_tangent_euler_term(profile, n, table, lines).value()


def grassmannian_j_structured(r, n, d, check=True):
    """Structured route: sum over jumping profiles of the Weyl pushforward
    of the inverse profile tangent Euler class."""
    if not (1 <= r <= n):
        raise SpaceError("grassmannian needs 1 <= r <= n")
    space = SpaceDescriptor.grassmannian(r, n)
    table = space.table()
    lines = space.level_var_indices(1)
    terms = []
    for profile in profiles_of_degree(d, r):
        quotient = quot_profile_tangent_euler_term(profile, n, table, lines).inverted()
        blocks = profile.block_sizes()
        for f in relative_tangent_euler_factors(table, lines, blocks):
            quotient = quotient.times_poly(f, -1)
        profile_terms = []
        for images in coset_permutations(blocks):
            perm = Permutation.of_positions(table, lines, images)
            comp = [0] * r
            for slot, target in enumerate(images):
                comp[target] = profile.degrees[slot]
            profile_terms.append((tuple(comp), quotient.permuted(perm)))
        if check:
            pushed = sum_factored([t for _, t in profile_terms], table)
            check_level_invariant(pushed, table, lines, "profile pushforward")
        terms.extend(sorted(profile_terms, key=lambda kv: kv[0]))
    terms.sort(key=lambda kv: kv[0])
    return JCoefficient(space, (d,), terms, form="structured")


def flag_obstruction_euler(dims, n):
    """Euler class of the dual obstruction bundle of a flag: for each pair
    of consecutive levels, prod_j (1-L_{i,j}^d)^n / prod_{j,k}
    (1 - L_{i,j}^d L_{i+1,k})."""
    space = SpaceDescriptor.flag(dims, n)
    table = space.table()
    t = FactoredTerm.one(table)
    for i in range(1, len(dims)):
        cur = space.level_var_indices(i)
        nxt = space.level_var_indices(i + 1)
        for vj in cur:
            t = t.times_poly(_one_minus_mono(table, [(vj, -1)]), n)
            for vk in nxt:
                t = t.times_poly(_one_minus_mono(table, [(vj, -1), (vk, 1)]), -1)
    return t.value()


def flag_fixed_contribution(dims, n, level_comps):
    """Displayed per-term integrand of the structured flag route: the full
    numerator q-products and single cross factors over consecutive levels."""
    space = SpaceDescriptor.flag(dims, n)
    level_comps = _check_level_comps(space, level_comps)
    table = space.table()
    t = FactoredTerm.one(table)
    for i in range(1, len(dims) + 1):
        cur = space.level_var_indices(i)
        comp = level_comps[i - 1]
        for vj, dj in zip(cur, comp):
            for m in range(1, dj + 1):
                t = t.times_poly(_one_minus_mono(table, [(vj, -1)], m), n)
        if i < len(dims):
            nxt = space.level_var_indices(i + 1)
            ncomp = level_comps[i]
            for vj, dj in zip(cur, comp):
                for vk, dk in zip(nxt, ncomp):
                    t = t.times_poly(
                        _one_minus_mono(table, [(vj, -1), (vk, 1)], dj - dk), -1)
    return t.value()


def _check_level_comps(space, level_comps):
    dims = space.dims
    level_comps = tuple(tuple(int(x) for x in c) for c in level_comps)
    if len(level_comps) != len(dims):
        raise SpaceError("need one composition per level")
    for m, comp in zip(dims, level_comps):
        if len(comp) != m or any(x < 0 for x in comp):
            raise SpaceError("level composition has wrong shape")
    return level_comps


def flag_term(dims, n, level_comps, form="canonical", space=None, table=None):
    """One composition term of the flag J-coefficient, in the chosen shape.

    All shapes share the cross factor prod_{i=1..l} prod_{j,k}
    1/R(d_{i,j} - d_{i+1,k}; L_{i,j}^d L_{i+1,k}) with the virtual top
    level: m_{l+1} = n, trivial lines, zero degrees.
    """
    if space is None:
        space = SpaceDescriptor.flag(dims, n)
    if table is None:
        table = space.table()
    level_comps = _check_level_comps(space, level_comps)
    t = FactoredTerm.one(table)
    num_levels = len(dims)
    for i in range(1, num_levels + 1):
        lines = space.level_var_indices(i)
        comp = level_comps[i - 1]
        if form == "canonical":
            t = t.times_term(_pair_term_oriented(table, lines, comp))
        elif form == "literal":
            t = t.times_term(_pair_term_literal(table, lines, comp))
        elif form == "theorem_ratio":
            t = t.times_term(_pair_term_theorem(table, lines, comp))
        else:
            raise SpaceError("unknown flag form %r" % form)
        if i < num_levels:
            nxt_lines = space.level_var_indices(i + 1)
            nxt_comp = level_comps[i]
        else:
            nxt_lines = (None,) * n
            nxt_comp = (0,) * n
        for vj, dj in zip(lines, comp):
            for vk, dk in zip(nxt_lines, nxt_comp):
                u = [(vj, -1)]
                if vk is not None:
                    u.append((vk, 1))
                t = t.times_term(ratio_R_term(table, dj - dk, u).inverted())
    return t


def flag_j(dims, n, d, form="canonical"):
    """Type-A flag J-coefficient: sum over per-level compositions.

    canonical: degree-oriented pair ratios with parity prefactors (reduces
    exactly to the invariant Grassmannian shape at one level).
    literal: the displayed single-ratio shape with (-1)^((m_i-1)d_i).
    theorem_ratio: the displayed doubly-infinite-ratio shape, read through
    the finite R convention.
    """
    space = SpaceDescriptor.flag(dims, n)
    d = check_multidegree(space, d)
    if form not in FLAG_FORMS:
        raise SpaceError("unknown flag form %r" % form)
    table = space.table()
    per_level = [compositions(di, mi) for di, mi in zip(d, dims)]
    terms = []
    for combo in itertools.product(*per_level):
        terms.append((combo, flag_term(dims, n, combo, form, space, table)))
    return JCoefficient(space, d, terms, form=form)


def product_j(factors, degrees):
    """J-coefficient of a product, one level per factor, evaluated natively
    over the concatenated variable table."""
    space = SpaceDescriptor.product(factors)
    d = check_multidegree(space, degrees)
    table = space.table()
    per_level = []
    for level, factor in enumerate(space.factors, start=1):
        lines = space.level_var_indices(level)
        n = factor.n
        r = len(lines)
        comps = compositions(d[level - 1], r)
        level_terms = []
        for comp in comps:
            level_terms.append(
                (comp, grassmannian_term(table, lines, comp, n, "invariant")))
        per_level.append(level_terms)
    terms = []
    for combo in itertools.product(*per_level):
        label = tuple(c for c, _ in combo)
        term = FactoredTerm.one(table)
        for _, t in combo:
            term = term.times_term(t)
        terms.append((label, term))
    return JCoefficient(space, d, terms)


# ---------------------------------------------------------------------------
# Conjectural complete-flag evaluators (types B, C, D).  No independent
# oracle exists; outputs carry the conjectural flag.
# ---------------------------------------------------------------------------

def _conjecture_term(table, lines, comp, family):
    n = len(lines)
    d = sum(comp)
    sign_exp = d * (n * (n - 1) // 2)
    t = FactoredTerm.one(table).times_scalar(-1 if sign_exp % 2 else 1)
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            k_start = j + 1 if family == "c" else j
            for k in range(k_start, i + 1):
                u = [(lines[j - 1], -1), (lines[k - 1], -1)]
                for m in range(1, comp[j - 1] + comp[k - 1] + 1):
                    t = t.times_poly(_one_minus_mono(table, u, m), 1)
        for j in range(1, i + 1):
            for k in range(j + 1, i + 1):
                dj, dk = comp[j - 1], comp[k - 1]
                if dj == dk:
                    continue
                if dj > dk:
                    h, l, gap = j, k, dj - dk
                else:
                    h, l, gap = k, j, dk - dj
                u = [(lines[h - 1], -1), (lines[l - 1], 1)]
                t = t.times_poly(_one_minus_mono(table, u, gap), 1)
                t = t.times_poly(_one_minus_mono(table, u, 0), -1)
    for i in range(1, n):
        for j in range(1, i + 1):
            for k in range(1, i + 2):
                if j == k:
                    continue
                u = [(lines[j - 1], -1), (lines[k - 1], 1)]
                t = t.times_poly(_one_minus_mono(table, u, 0), 1)
                t = t.times_poly(
                    _one_minus_mono(table, u, comp[j - 1] - comp[k - 1]), -1)
    return t


def _conjecture_j(n, d, family):
    if n < 1:
        raise SpaceError("isotropic flag needs n >= 1")
    if d < 0:
        raise SpaceError("degree must be nonnegative")
    if family == "c":
        space = SpaceDescriptor.lagrangian_flag(n)
    else:
        space = SpaceDescriptor.bd_flag(n)
    table = space.table()
    lines = tuple(space.level_var_indices(i)[0] for i in range(1, n + 1))
    terms = []
    for comp in compositions(d, n):
        terms.append((comp, _conjecture_term(table, lines, comp, family)))
    return JCoefficient(space, (d,), terms, conjectural=True)


def lagrangian_flag_j_conjecture(n, d):
    """Conjectural J-coefficient of the Lagrangian complete flag variety
    (type C); the within-step pair products run over j < k."""
    return _conjecture_j(n, d, "c")


def bd_flag_j_conjecture(n, d):
    """Conjectural J-coefficient of the type B/D complete flag varieties;
    the within-step pair products run over j <= k (diagonal included)."""
    return _conjecture_j(n, d, "bd")


# ---------------------------------------------------------------------------
# Dispatch and series assembly.
# ---------------------------------------------------------------------------

def j_coefficient(space, d, form=None):
    d = check_multidegree(space, d) if space.kind not in (
        "lagrangian-flag", "bd-flag") else d
    if space.kind == "projective":
        return projective_j(space.n, d[0])
    if space.kind == "grassmannian":
        return grassmannian_j(space.r, space.n, d[0], form or "invariant")
    if space.kind == "flag":
        return flag_j(space.dims, space.n, d, form or "canonical")
    if space.kind == "product":
        return product_j(space.factors, d)
    if space.kind == "lagrangian-flag":
        return lagrangian_flag_j_conjecture(space.n, int(d[0]))
    if space.kind == "bd-flag":
        return bd_flag_j_conjecture(space.n, int(d[0]))
    raise SpaceError("no J-coefficient evaluator for %r" % space.kind)


class JSeries:
    """All J-coefficients with multidegree at most a componentwise cap."""

    __slots__ = ("space", "cap", "coefficients")

    def __init__(self, space, cap, coefficients):
        self.space = space
        self.cap = tuple(cap)
        self.coefficients = coefficients

    def json_obj(self):
        return {
            "space": self.space.json_obj(),
            "cap": list(self.cap),
            "coefficients": [
                {"degree": list(d), "value": c.value().json_obj()}
                for d, c in self.coefficients
            ],
        }

    def text(self):
        lines = []
        for d, c in self.coefficients:
            lines.append("Q^%s: %s" % ("(%s)" % ",".join(str(x) for x in d), c.text()))
        return "\n".join(lines)


def j_series(space, cap, form=None):
    if space.kind in ("lagrangian-flag", "bd-flag"):
        degs = [(k,) for k in range(int(cap[0]) + 1)]
    else:
        cap = check_multidegree(space, cap)
        degs = multidegrees_up_to(len(space.levels()), cap)
    coeffs = [(d, j_coefficient(space, d, form)) for d in degs]
    return JSeries(space, cap, coeffs)
