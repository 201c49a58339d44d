"""Exact scalar algebra over jet coordinates.

Expressions are kept in an expanded multivariate normal form: a map from
monomials to rational coefficients.  A monomial is a sorted tuple of
(atom, exponent) pairs.  Three kinds of atoms exist:

* ``('x', i)``             -- base coordinate x^i, 1 <= i <= n
* ``('y', sigma, J)``      -- jet coordinate y^sigma_J, J a sorted tuple
* ``('f', name, idx, n, m, order, partials)`` -- opaque function symbol

Jet coordinates are keyed by the sorted multi-index only (y_{12} and y_{21}
are the same stored coordinate); any multiplicity bookkeeping for sums over
unordered index tuples lives with the caller.

Opaque symbols model generic coefficient functions.  ``order`` declares the
coordinate dependence: the symbol depends on all x^i and on all y^sigma_J
with |J| <= order (order -1 means a function of the base point x only).
``partials`` is the sorted multiset of formal partial derivatives already
applied; mixed partials commute, so the sorted tuple is canonical.  Total
derivatives of opaque symbols expand through the chain rule over the
declared dependencies, producing new labelled atoms.  Equality of
expressions is literal equality of the normal forms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

Atom = tuple
Monomial = tuple  # tuple[tuple[Atom, int], ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def x(i: int) -> "Scalar":
    """The base coordinate x^i as an expression."""
    return Scalar({(( ('x', i), 1),): _ONE})


def y(sigma: int, *J: int) -> "Scalar":
    """The jet coordinate y^sigma_J; J is re-sorted on construction."""
    return Scalar({((y_atom(sigma, J), 1),): _ONE})


def y_atom(sigma: int, J: Iterable[int]) -> Atom:
    return ('y', sigma, tuple(sorted(J)))


def x_atom(i: int) -> Atom:
    return ('x', i)


def opaque(name: str, indices: tuple = (), *, n: int, m: int, order: int) -> "Scalar":
    """A generic function symbol of the coordinates up to jet ``order``.

    ``indices`` are tensor component labels (a flat tuple of ints) telling
    distinct components of one coefficient family apart.  ``order == -1``
    declares a function of x alone, whose total derivatives stay formal.
    """
    return Scalar({((('f', name, tuple(indices), n, m, order, ()), 1),): _ONE})


def rational(p: int, q: int = 1) -> "Scalar":
    return Scalar.from_fraction(Fraction(p, q))


def _mul_monomials(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        ka, ea = a[i]
        kb, eb = b[j]
        if ka == kb:
            out.append((ka, ea + eb))
            i += 1
            j += 1
        elif ka < kb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


class Scalar:
    """An expression in normal form.  Never mutate ``terms`` after creation."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_terms(terms: dict) -> "Scalar":
        return Scalar({m: c for m, c in terms.items() if c != 0})

    @staticmethod
    def from_fraction(c: Fraction) -> "Scalar":
        return Scalar({(): c} if c != 0 else {})

    @staticmethod
    def zero() -> "Scalar":
        return Scalar({})

    @staticmethod
    def one() -> "Scalar":
        return Scalar({(): _ONE})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(m == () for m in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return _ZERO
        if self.is_rational():
            return self.terms[()]
        raise ValueError("expression is not a rational constant")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = _coerce(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Scalar":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Scalar":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Scalar({})
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mul_monomials(ma, mb)
                s = out.get(m, _ZERO) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Scalar(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return Scalar.from_fraction(1 / self.as_fraction() ** (-k))
        out = Scalar.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other) -> "Scalar":
        other = _coerce(other)
        c = other.as_fraction()  # non-constant divisors are out of scope
        if c == 0:
            raise ZeroDivisionError("division by the zero expression")
        return self * Scalar.from_fraction(1 / c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = _coerce(other)
        return isinstance(other, Scalar) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        from .printers import scalar_text
        return f"Scalar({scalar_text(self)})"

    # -- structure ---------------------------------------------------------

    def atoms(self) -> Iterator[Atom]:
        seen = set()
        for m in self.terms:
            for a, _ in m:
                if a not in seen:
                    seen.add(a)
                    yield a

    def max_jet_order(self) -> int:
        """Highest |J| among jet coordinates and opaque dependencies present."""
        order = 0
        for a in self.atoms():
            if a[0] == 'y':
                order = max(order, len(a[2]))
            elif a[0] == 'f':
                order = max(order, a[5], *(len(k[2]) for k in a[6] if k[0] == 'y'), 0)
        return order


def _coerce(v) -> Scalar:
    if isinstance(v, Scalar):
        return v
    if isinstance(v, (int, Fraction)):
        return Scalar.from_fraction(Fraction(v))
    raise TypeError(f"cannot coerce {v!r} to Scalar")


def normalize(e: Scalar) -> Scalar:
    """Expressions are built in normal form; normalization is the identity."""
    return Scalar.from_terms(e.terms)


# -- differentiation -------------------------------------------------------

def _atom_depends(atom: Atom, coord: Atom) -> bool:
    """Whether an opaque atom declares dependence on the given coordinate."""
    if coord[0] == 'x':
        return True
    return coord[0] == 'y' and len(coord[2]) <= atom[5]


def _atom_partial(atom: Atom, coord: Atom) -> Scalar:
    """Partial derivative of a single atom with respect to a coordinate."""
    kind = atom[0]
    if kind in ('x', 'y'):
        return Scalar.one() if atom == coord else Scalar.zero()
    if not _atom_depends(atom, coord):
        return Scalar.zero()
    name, idx, n, m, order, partials = atom[1:]
    labelled = ('f', name, idx, n, m, order, tuple(sorted(partials + (coord,))))
    return Scalar({((labelled, 1),): _ONE})


def _derive_monomials(e: Scalar, atom_rule) -> Scalar:
    """Extend a derivation on atoms to the whole ring by the Leibniz rule."""
    total: dict = {}
    for mono, coeff in e.terms.items():
        for t, (a, k) in enumerate(mono):
            da = atom_rule(a)
            if da.is_zero():
                continue
            rest = mono[:t] + ((a, k - 1),) * (k > 1) + mono[t + 1:]
            piece = Scalar({rest: coeff * k}) * da
            for m, c in piece.terms.items():
                s = total.get(m, _ZERO) + c
                if s:
                    total[m] = s
                else:
                    total.pop(m, None)
    return Scalar(total)


def partial(e: Scalar, coord: Atom) -> Scalar:
    """Formal partial derivative with respect to a single stored coordinate.

    For jet coordinates the multi-index is matched after sorting and no
    multinomial weight is applied.
    """
    if coord[0] == 'y':
        coord = ('y', coord[1], tuple(sorted(coord[2])))
    return _derive_monomials(e, lambda a: _atom_partial(a, coord))


def _atom_total(atom: Atom, i: int) -> Scalar:
    kind = atom[0]
    if kind == 'x':
        return Scalar.one() if atom[1] == i else Scalar.zero()
    if kind == 'y':
        return y(atom[1], *(atom[2] + (i,)))
    # chain rule over the declared dependencies
    n, m, order = atom[3], atom[4], atom[5]
    out = _atom_partial(atom, ('x', i))
    for sigma in range(1, m + 1):
        for J in jet_keys(n, order):
            out = out + y(sigma, *(J + (i,))) * _atom_partial(atom, ('y', sigma, J))
    return out


def total_derivative(e: Scalar, i: int) -> Scalar:
    """The i-th formal derivative d_i, raising the jet order by one."""
    return _derive_monomials(e, lambda a: _atom_total(a, i))


def total_derivative_multi(e: Scalar, J: Iterable[int]) -> Scalar:
    for j in J:
        e = total_derivative(e, j)
    return e


def jet_keys(n: int, order: int) -> Iterator[tuple]:
    """All sorted multi-indices over {1..n} of length 0..order."""
    from itertools import combinations_with_replacement
    for k in range(max(order, -1) + 1):
        yield from combinations_with_replacement(range(1, n + 1), k)


def support_coords(e: Scalar, n: int, m: int) -> set:
    """Coordinates the expression can depend on (declared, not just visible)."""
    coords = set()
    for a in e.atoms():
        if a[0] in ('x', 'y'):
            coords.add(a)
        else:
            for i in range(1, n + 1):
                coords.add(('x', i))
            for sigma in range(1, m + 1):
                for J in jet_keys(n, a[5]):
                    coords.add(('y', sigma, J))
            for key in a[6]:
                if key[0] == 'y':
                    coords.add(key)
    return coords


def collect_linear(e: Scalar, family: str) -> dict:
    """Split an expression linear in the atoms of one opaque family.

    Returns a map ``atom -> coefficient``; the empty-atom key ``None`` holds
    the part free of the family.  Raises if the family enters nonlinearly.
    """
    out: dict = {}
    for mono, coeff in e.terms.items():
        hits = [(t, a) for t, (a, k) in enumerate(mono)
                if a[0] == 'f' and a[1] == family for _ in range(k)]
        if len(hits) > 1:
            raise ValueError(f"expression is not linear in family {family!r}")
        if not hits:
            key, rest = None, mono
        else:
            t, key = hits[0]
            a, k = mono[t]
            rest = mono[:t] + ((a, k - 1),) * (k > 1) + mono[t + 1:]
        bucket = out.setdefault(key, {})
        bucket[rest] = bucket.get(rest, _ZERO) + coeff
    return {k: Scalar.from_terms(v) for k, v in out.items()}
