"""Space descriptors, variable allocation, multidegrees and jump profiles.

A descriptor fixes the list of tautological levels of a space; level i of
size m_i owns the line variables L[i,1] .. L[i,m_i].  Together with the
formal parameter q these make up the space's variable table.  Products
concatenate the levels of their factors, renumbered consecutively.
"""

from __future__ import annotations

from .algebra import AlgebraError, Polynomial, RationalExpression, VariableTable


class SpaceError(AlgebraError):
    pass


class SpaceDescriptor:
    """Descriptor for the spaces handled by the evaluators.

    kind is one of "point", "projective", "grassmannian", "flag",
    "product", "lagrangian-flag", "bd-flag".  The two conjectural kinds
    describe complete isotropic flags; they allocate n levels of size 1.
    """

    __slots__ = ("kind", "n", "r", "dims", "factors")

    def __init__(self, kind, n=None, r=None, dims=None, factors=None):
        self.kind = kind
        self.n = n
        self.r = r
        self.dims = dims
        self.factors = factors

    @classmethod
    def point(cls):
        return cls("point")

    @classmethod
    def projective(cls, n):
        if n < 2:
            raise SpaceError("projective space needs ambient dimension >= 2")
        return cls("projective", n=n)

    @classmethod
    def grassmannian(cls, r, n):
        if not (1 <= r <= n):
            raise SpaceError("grassmannian needs 1 <= r <= n")
        return cls("grassmannian", n=n, r=r)

    @classmethod
    def flag(cls, dims, n):
        dims = tuple(dims)
        if not dims:
            raise SpaceError("flag needs at least one level")
        if any(b <= a for a, b in zip(dims, dims[1:])) or dims[0] < 1:
            raise SpaceError("flag dimensions must be strictly increasing")
        if dims[-1] >= n:
            raise SpaceError("flag dimensions must stay below the ambient n")
        return cls("flag", n=n, dims=dims)

    @classmethod
    def product(cls, factors):
        factors = tuple(factors)
        if not factors:
            raise SpaceError("product needs at least one factor")
        for f in factors:
            if f.kind not in ("projective", "grassmannian"):
                raise SpaceError("product factors must be projective or grassmannian")
        return cls("product", factors=factors)

    @classmethod
    def lagrangian_flag(cls, n):
        if n < 1:
            raise SpaceError("isotropic flag needs n >= 1")
        return cls("lagrangian-flag", n=n)

    @classmethod
    def bd_flag(cls, n):
        if n < 1:
            raise SpaceError("isotropic flag needs n >= 1")
        return cls("bd-flag", n=n)

    def levels(self):
        """Tuple of level sizes."""
        if self.kind == "point":
            return ()
        if self.kind == "projective":
            return (1,)
        if self.kind == "grassmannian":
            return (self.r,)
        if self.kind == "flag":
            return self.dims
        if self.kind in ("lagrangian-flag", "bd-flag"):
            return (1,) * self.n
        if self.kind == "product":
            out = []
            for f in self.factors:
                out.extend(f.levels())
            return tuple(out)
        raise SpaceError("unknown kind %r" % self.kind)

    def ambients(self):
        """Ambient dimension per level (parallel to levels())."""
        if self.kind == "product":
            out = []
            for f in self.factors:
                out.extend(f.ambients())
            return tuple(out)
        return (self.n,) * len(self.levels())

    def table(self):
        names = ["q"]
        for i, size in enumerate(self.levels(), start=1):
            for j in range(1, size + 1):
                names.append("L[%d,%d]" % (i, j))
        return VariableTable(names)

    def level_var_indices(self, level, table=None):
        """Table indices of the level's line variables (level is 1-based)."""
        sizes = self.levels()
        if not (1 <= level <= len(sizes)):
            raise SpaceError("level %d out of range" % level)
        start = 1 + sum(sizes[:level - 1])
        return tuple(range(start, start + sizes[level - 1]))

    def equals(self, other):
        return isinstance(other, SpaceDescriptor) and self.json_obj() == other.json_obj()

    def json_obj(self):
        if self.kind == "point":
            return {"kind": "point"}
        if self.kind == "projective":
            return {"kind": "projective", "n": self.n}
        if self.kind == "grassmannian":
            return {"kind": "grassmannian", "r": self.r, "n": self.n}
        if self.kind == "flag":
            return {"kind": "flag", "dims": list(self.dims), "n": self.n}
        if self.kind in ("lagrangian-flag", "bd-flag"):
            return {"kind": self.kind, "n": self.n}
        if self.kind == "product":
            return {"kind": "product", "factors": [f.json_obj() for f in self.factors]}
        raise SpaceError("unknown kind %r" % self.kind)

    def text(self):
        if self.kind == "point":
            return "pt"
        if self.kind == "projective":
            return "p:%d" % self.n
        if self.kind == "grassmannian":
            return "gr:%d,%d" % (self.r, self.n)
        if self.kind == "flag":
            return "fl:%s:%d" % (",".join(str(m) for m in self.dims), self.n)
        if self.kind == "lagrangian-flag":
            return "lfl:%d" % self.n
        if self.kind == "bd-flag":
            return "bd:%d" % self.n
        if self.kind == "product":
            return "x".join(f.text() for f in self.factors)
        raise SpaceError("unknown kind %r" % self.kind)

    def __repr__(self):
        return "SpaceDescriptor(%s)" % self.text()


def check_multidegree(space, d):
    d = tuple(int(x) for x in d)
    sizes = space.levels()
    if len(d) != len(sizes):
        raise SpaceError("degree vector needs one entry per level (%d)" % len(sizes))
    if any(x < 0 for x in d):
        raise SpaceError("degrees must be nonnegative")
    return d


class KClassExpr:
    """A K-class on a space: a rational expression over the space's table.

    A class living on a partial flag inside one Grassmannian level is
    expressed in the merged level's variables; the flag descriptor then
    only records the block structure.
    """

    __slots__ = ("space", "value")

    def __init__(self, space, value):
        self.space = space
        self.value = value

    def __repr__(self):
        return "KClassExpr(%s, %s)" % (self.space.text(), self.value.text())


class JumpProfile:
    """Nondecreasing degree profile d_1 <= ... <= d_r with its block data."""

    __slots__ = ("degrees",)

    def __init__(self, degrees):
        degrees = tuple(int(x) for x in degrees)
        if any(x < 0 for x in degrees):
            raise SpaceError("profile degrees must be nonnegative")
        if any(b < a for a, b in zip(degrees, degrees[1:])):
            raise SpaceError("profile degrees must be nondecreasing")
        self.degrees = degrees

    @classmethod
    def from_composition(cls, comp):
        return cls(tuple(sorted(comp)))

    @property
    def r(self):
        return len(self.degrees)

    def blocks(self):
        """List of (degree value, block size) for maximal constant runs."""
        out = []
        for x in self.degrees:
            if out and out[-1][0] == x:
                out[-1][1] += 1
            else:
                out.append([x, 1])
        return [(v, s) for v, s in out]

    def block_sizes(self):
        return tuple(s for _, s in self.blocks())

    def jumping_indices(self):
        """Cumulative block ends m_1 < ... < m_k (the induced flag dims)."""
        out = []
        acc = 0
        for _, s in self.blocks():
            acc += s
            out.append(acc)
        return tuple(out)

    def total(self):
        return sum(self.degrees)

    def __repr__(self):
        return "JumpProfile%r" % (self.degrees,)


def compositions(total, parts):
    """All tuples of nonnegative ints of length parts summing to total, lex order."""
    if parts == 0:
        return [()] if total == 0 else []
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def profiles_of_degree(total, r):
    """All nondecreasing degree profiles of length r summing to total."""
    out = []
    for comp in compositions(total, r):
        if all(b >= a for a, b in zip(comp, comp[1:])):
            out.append(JumpProfile(comp))
    return out


def multidegrees_up_to(levels, cap):
    """All multidegrees with componentwise bound cap, lex order."""
    cap = tuple(cap)
    if len(cap) != levels:
        raise SpaceError("cap needs one entry per level")
    out = [()]
    for c in cap:
        out = [d + (k,) for d in out for k in range(c + 1)]
    return out
