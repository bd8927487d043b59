"""Equivariant fixed-point calculus: Euler classes, Weyl pushforwards and
fixed-point Euler characteristics.

Pushforwards along partial-flag merges are Weyl sums of the input divided
by the relative tangent Euler class; Euler characteristics are computed
from the fixed-point sum, specialized exactly along the one-parameter
curve x_i = z^(i-1) and evaluated at z = 1 by exact division.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import (
    AlgebraError,
    InvariantViolationError,
    Permutation,
    Polynomial,
    RationalExpression,
    VariableTable,
    poly_one,
    poly_var,
)
from .spaces import KClassExpr, SpaceDescriptor, SpaceError, check_multidegree


def x_param_table(n):
    """Table for the ambient equivariant parameters x[1]..x[n]."""
    return VariableTable(["q"] + ["x[%d]" % i for i in range(1, n + 1)])


def character(table, powers):
    """Exponent vector of a monomial character, from a name -> power dict."""
    exps = [0] * len(table)
    for name, p in powers.items():
        exps[table.index(name)] += p
    return tuple(exps)


def dual_character(exps):
    return tuple(-e for e in exps)


def lambda_minus1_dual(table, chars):
    """Euler class of the dual of a sum of line characters: prod(1 - dual)."""
    out = poly_one(table)
    for exps in chars:
        out = out * (poly_one(table) - Polynomial.monomial(table, dual_character(exps)))
    return RationalExpression(out)


def level_transpositions(table, level_indices):
    out = []
    for a, b in zip(level_indices, level_indices[1:]):
        out.append(Permutation(table, {a: b, b: a}))
    return out


def is_invariant(value, perms):
    """Exact invariance under each permutation, with a fast path when the
    denominator itself is fixed termwise."""
    for perm in perms:
        pden = value.den.permuted(perm)
        if pden.terms == value.den.terms:
            if value.num.permuted(perm).terms != value.num.terms:
                return False
        else:
            if not value.permuted(perm).equals(value):
                return False
    return True


def check_level_invariant(value, table, level_indices, what="class"):
    if not is_invariant(value, level_transpositions(table, level_indices)):
        raise InvariantViolationError(
            "%s is not symmetric in the level's line variables" % what)


def relative_tangent_euler_factors(table, level_indices, block_sizes,
                                   dual_on_higher=True):
    """Pair factors (1 - L_hi^dual * L_lo) over block pairs hi > lo.

    level_indices lists the table positions of the level's lines; the
    first block_sizes[0] of them form block 1, and so on.
    """
    if sum(block_sizes) != len(level_indices):
        raise SpaceError("block sizes must partition the level")
    starts = []
    acc = 0
    for s in block_sizes:
        starts.append(acc)
        acc += s
    one = poly_one(table)
    out = []
    for hi in range(len(block_sizes)):
        for lo in range(hi):
            for s in range(block_sizes[hi]):
                for t in range(block_sizes[lo]):
                    vh = level_indices[starts[hi] + s]
                    vl = level_indices[starts[lo] + t]
                    exps = [0] * len(table)
                    if dual_on_higher:
                        exps[vh] -= 1
                        exps[vl] += 1
                    else:
                        exps[vl] -= 1
                        exps[vh] += 1
                    out.append(one - Polynomial.monomial(table, tuple(exps)))
    return out


def relative_tangent_euler_poly(table, level_indices, block_sizes, dual_on_higher=True):
    out = poly_one(table)
    for f in relative_tangent_euler_factors(table, level_indices, block_sizes,
                                            dual_on_higher):
        out = out * f
    return out


def relative_tangent_euler(space, target):
    """Euler class of the dual relative tangent bundle of the merge
    flag(m_1..m_l) -> grassmannian(r, n), in the merged level's variables."""
    if target.kind != "grassmannian":
        raise SpaceError("merge target must be a grassmannian")
    if space.kind != "flag" or space.dims[-1] != target.r or space.n != target.n:
        raise SpaceError("flag top dimension must match the target grassmannian")
    blocks = block_sizes_of_dims(space.dims)
    table = target.table()
    level = target.level_var_indices(1)
    return RationalExpression(relative_tangent_euler_poly(table, level, blocks))


def block_sizes_of_dims(dims):
    out = []
    prev = 0
    for m in dims:
        out.append(m - prev)
        prev = m
    return tuple(out)


def coset_permutations(block_sizes):
    """Minimal-length representatives of S_r modulo the block subgroup.

    Returned as image tuples w with w[a] the target position of slot a,
    deduplicated by the set of images of each block, in lexicographic
    order of the image tuple.
    """
    r = sum(block_sizes)
    bounds = []
    acc = 0
    for s in block_sizes:
        bounds.append((acc, acc + s))
        acc += s
    seen = set()
    out = []
    for w in itertools.permutations(range(r)):
        key = tuple(tuple(sorted(w[a:b])) for a, b in bounds)
        if key in seen:
            continue
        seen.add(key)
        out.append(w)
    return out


def permutation_sign(images):
    sign = 1
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if images[i] > images[j]:
                sign = -sign
    return sign


def weyl_pushforward_value(value, table, level_indices, block_sizes,
                           signed=False, check=True):
    """Sum over block-coset representatives of w(value / tangent Euler class).

    The default orientation (dual on the higher block, no sign) is the one
    that passes the pushforward oracles; signed=True switches to the
    signed variant with the dual on the lower block, kept for experiments.
    """
    rte = relative_tangent_euler_poly(table, level_indices, block_sizes,
                                      dual_on_higher=not signed)
    quotient = value / RationalExpression(rte)
    total = RationalExpression.zero(table)
    for images in coset_permutations(block_sizes):
        perm = Permutation.of_positions(table, level_indices, images)
        term = quotient.permuted(perm)
        if signed:
            term = term * permutation_sign(images)
        total = total + term
    if check:
        check_level_invariant(total, table, level_indices, "pushforward result")
    return total


def weyl_pushforward_partial(value, table, level_indices, from_blocks, to_blocks,
                             signed=False, check=True):
    """Merge a fine block structure into a coarser one, group by group."""
    if sum(from_blocks) != sum(to_blocks):
        raise SpaceError("block structures must partition the same level")
    out = value
    fi = 0
    pos = 0
    for target in to_blocks:
        sub = []
        acc = 0
        while acc < target:
            if fi >= len(from_blocks):
                raise SpaceError("coarse blocks must refine to the fine blocks")
            sub.append(from_blocks[fi])
            acc += from_blocks[fi]
            fi += 1
        if acc != target:
            raise SpaceError("coarse blocks must be unions of fine blocks")
        indices = level_indices[pos:pos + target]
        pos += target
        if len(sub) > 1:
            out = weyl_pushforward_value(out, table, indices, tuple(sub),
                                         signed=signed, check=check)
    return out


def weyl_pushforward(f, target, signed=False):
    """Pushforward of a class on a partial flag inside one Grassmannian level.

    f.space is the flag descriptor recording the block structure; the
    value is expressed in the merged level's variables (the target's own
    table).  Returns the class on the target Grassmannian.
    """
    if target.kind != "grassmannian":
        raise SpaceError("pushforward target must be a grassmannian")
    if f.space.kind != "flag" or f.space.dims[-1] != target.r or f.space.n != target.n:
        raise SpaceError("flag top dimension must match the target grassmannian")
    table = target.table()
    if f.value.table != table:
        raise SpaceError("value must be expressed in the merged level's variables")
    blocks = block_sizes_of_dims(f.space.dims)
    out = weyl_pushforward_value(f.value, table, target.level_var_indices(1),
                                 blocks, signed=signed)
    return KClassExpr(target, out)


def _single_level_shape(space):
    if space.kind == "projective":
        return 1, space.n
    if space.kind == "grassmannian":
        return space.r, space.n
    raise SpaceError("operation needs a projective space or grassmannian")


def fixed_point_restrict(f, subset):
    """Restrict to the fixed point of an r-subset {i_1 < .. < i_r}: the dual
    line L[1,j]^(-1) evaluates to x[i_j]."""
    r, n = _single_level_shape(f.space)
    subset = tuple(sorted(int(i) for i in subset))
    if len(subset) != r or len(set(subset)) != r:
        raise SpaceError("subset must have exactly %d distinct entries" % r)
    if subset[0] < 1 or subset[-1] > n:
        raise SpaceError("subset entries must lie in 1..%d" % n)
    table = f.value.table
    target = x_param_table(n)
    bindings = {}
    for j, i in enumerate(subset, start=1):
        exps = [0] * len(target)
        exps[target.index("x[%d]" % i)] = -1
        bindings[table.index("L[1,%d]" % j)] = (1, tuple(exps))
    return f.value.substituted(target, bindings)


def _z_slices(poly):
    """Dict z-exponent -> q-only slice (z position must be index 1)."""
    out = {}
    for e, c in poly.terms.items():
        out.setdefault(e[1], {})[(e[0], 0)] = c
    return out


def _divide_by_z_minus_1(poly, table):
    """Exact division by (z - 1); returns None when not divisible."""
    if poly.is_zero():
        return poly
    zmin = min(e[1] for e in poly.terms)
    work = poly.shifted((0, -zmin)) if zmin else poly
    slices = _z_slices(work)
    top = max(slices)
    quot = {}
    carry = {}
    for k in range(top, 0, -1):
        cur = dict(carry)
        for e, c in slices.get(k, {}).items():
            s = cur.get(e, 0) + c
            if s == 0:
                cur.pop(e, None)
            else:
                cur[e] = s
        for e, c in cur.items():
            quot[(e[0], k - 1)] = c
        carry = cur
    rem = dict(carry)
    for e, c in slices.get(0, {}).items():
        s = rem.get(e, 0) + c
        if s == 0:
            rem.pop(e, None)
        else:
            rem[e] = s
    if rem:
        return None
    out = Polynomial(table, quot)
    return out.shifted((0, zmin)) if zmin else out


def _eval_z1(poly, q_table):
    out = {}
    for e, c in poly.terms.items():
        key = (e[0],)
        s = out.get(key, 0) + c
        if s == 0:
            out.pop(key, None)
        else:
            out[key] = s
    return Polynomial(q_table, out)


def euler_characteristic(f):
    """Fixed-point Euler characteristic of an S_r-invariant class.

    Sums the fixed-point restrictions divided by the Euler classes of the
    normal spaces, along the exact curve x_i = z^(i-1), and takes the
    exact limit z -> 1.  A surviving pole at z = 1 means the class was
    not an honest symmetric K-class and raises InvariantViolationError.
    """
    r, n = _single_level_shape(f.space)
    table = f.value.table
    check_level_invariant(f.value, table, f.space.level_var_indices(1),
                          "euler characteristic input")
    qz = VariableTable(["q", "z"])
    q_table = VariableTable(["q"])
    xt = x_param_table(n)
    x_bind = {xt.index("x[%d]" % i): (1, (0, i - 1)) for i in range(1, n + 1)}
    one = poly_one(qz)
    total = RationalExpression.zero(qz)
    for subset in itertools.combinations(range(1, n + 1), r):
        rst = fixed_point_restrict(f, subset)
        term = rst.substituted(qz, x_bind)
        den = one
        inside = set(subset)
        for i in subset:
            for j in range(1, n + 1):
                if j in inside:
                    continue
                den = den * (one - Polynomial.monomial(qz, (0, j - i)))
        total = total + term / RationalExpression(den)
    num, den = total.num, total.den
    if num.is_zero():
        return RationalExpression.zero(q_table)
    while True:
        dnum = _divide_by_z_minus_1(num, qz)
        dden = _divide_by_z_minus_1(den, qz)
        if dden is None:
            break
        if dnum is None:
            raise InvariantViolationError(
                "fixed-point sum has a pole at the symmetric specialization")
        num, den = dnum, dden
    num_q = _eval_z1(num, q_table)
    den_q = _eval_z1(den, q_table)
    if den_q.is_zero():
        raise InvariantViolationError(
            "fixed-point sum has a pole at the symmetric specialization")
    return RationalExpression(num_q, den_q)


def gamma_one(space):
    return KClassExpr(space, RationalExpression.one(space.table()))


def gamma_det_s_dual(space):
    """Determinant of the dual tautological bundle of a single-level space."""
    r, _ = _single_level_shape(space)
    table = space.table()
    exps = [0] * len(table)
    for j in range(1, r + 1):
        exps[table.index("L[1,%d]" % j)] = -1
    return KClassExpr(space, RationalExpression(Polynomial.monomial(table, tuple(exps))))


def gamma_line_dual_power(space, k):
    """(L^dual)^k on a rank-one level (projective space)."""
    r, _ = _single_level_shape(space)
    if r != 1:
        raise SpaceError("line powers need a rank-one tautological bundle")
    table = space.table()
    return KClassExpr(space, RationalExpression(
        poly_var(table, "L[1,1]", -k)))


def descendant_series(space, d, gamma=None, order=0):
    """q-expansion of the Euler characteristic of J_d tensor gamma."""
    from . import jfunctions

    d = check_multidegree(space, d)
    coeff = jfunctions.j_coefficient(space, d)
    value = coeff.value()
    if gamma is not None:
        value = value * gamma.value
    chi = euler_characteristic(KClassExpr(space, value))
    return chi.q_series(order)
