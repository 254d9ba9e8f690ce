"""Exact sparse multivariate polynomial and rational-function arithmetic.

Everything here is exact: coefficients are arbitrary-precision rationals
(`int` or `fractions.Fraction`), a polynomial is a sparse map from exponent
vectors to nonzero coefficients, and a rational function is a quotient kept
in a lightly normalized form.  No floating point, no external CAS.

Design notes that the rest of the package relies on:

* A `VarRegistry` fixes the ordered variable set.  Polynomials over
  different registries never mix; attempting to combine them raises
  ``ValueError``.
* The monomial order is graded lexicographic over the registry order.  It
  drives leading-term selection, canonical text output, and the sign
  normalization of denominators.
* `RatFunc` stores its denominator as a multiset of primitive factors and
  cancels by exact trial division only.  There is no multivariate gcd;
  equality is decided by cross-multiplication, which the factored form makes
  cheap.  All denominators arising in this package are products of linear
  forms, so trial division recovers fully reduced quotients.
* `partial_fractions` splits a fraction with distinct linear factors in one
  distinguished variable into first-order terms, evaluating each deleted
  product at the corresponding root.
"""

from __future__ import annotations

import heapq
import re
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

Coeff = Union[int, Fraction]
Mono = tuple[int, ...]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class PoleError(ZeroDivisionError):
    """A substitution or division produced an identically zero denominator."""


def _as_coeff(c) -> Coeff:
    if isinstance(c, bool):
        raise TypeError("coefficient must be int or Fraction, not bool")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


def _grlex(mono: Mono) -> tuple[int, Mono]:
    return (sum(mono), mono)


# fixed odd-prime evaluation point for the divisibility pre-filter; any
# integers work, small ones keep the evaluated values short
_EVAL_POINT = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _primitive_value_at_point(poly: "MultiPoly") -> int | None:
    """Value of poly divided by its content at the fixed integer point.

    Returns None when the poly has fractional coefficients, is zero, or has
    more variables than the point covers.  For primitive integer polynomials
    f and g, the quotient f/g (when it divides exactly over the rationals)
    has integer coefficients, so g's value must divide f's value; a failed
    integer divisibility test therefore rules out exact division without
    running it.
    """
    if len(poly.registry) > len(_EVAL_POINT):
        return None
    total = 0
    content = 0
    for m, c in poly.terms.items():
        if isinstance(c, Fraction):
            return None
        v = c
        for p, e in zip(_EVAL_POINT, m):
            if e:
                v *= p ** e
        total += v
        content = gcd(content, c)
    if content == 0:
        return None
    return total // content


class VarRegistry:
    """Ordered, immutable set of variable names.

    The ordering is load-bearing: it fixes the monomial order and therefore
    every canonical form downstream.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        for nm in names:
            if not _NAME_RE.fullmatch(nm):
                raise ValueError(f"invalid variable name {nm!r}")
        self.names = names
        self._index = {nm: i for i, nm in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarRegistry) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarRegistry({list(self.names)!r})"

    # -- convenience constructors -------------------------------------

    def zero(self) -> "MultiPoly":
        return MultiPoly._raw(self, {})

    def one(self) -> "MultiPoly":
        return self.const(1)

    def const(self, c: Coeff) -> "MultiPoly":
        c = _as_coeff(c)
        n = len(self.names)
        return MultiPoly._raw(self, {} if c == 0 else {(0,) * n: c})

    def var(self, name: str) -> "MultiPoly":
        mono = [0] * len(self.names)
        mono[self.index(name)] = 1
        return MultiPoly._raw(self, {tuple(mono): 1})

    def linear(self, coeffs: Mapping[str, Coeff], const: Coeff = 0) -> "MultiPoly":
        """Linear form sum(coeffs[name] * name) + const."""
        terms: dict[Mono, Coeff] = {}
        n = len(self.names)
        for nm, c in coeffs.items():
            c = _as_coeff(c)
            if c == 0:
                continue
            mono = [0] * n
            mono[self.index(nm)] = 1
            terms[tuple(mono)] = c
        const = _as_coeff(const)
        if const != 0:
            terms[(0,) * n] = const
        return MultiPoly._raw(self, terms)


def _check_same_registry(a: "MultiPoly | RatFunc", b: "MultiPoly | RatFunc") -> None:
    if a.registry != b.registry:
        raise ValueError("registry mismatch between operands")


class MultiPoly:
    """Sparse exact polynomial: exponent vector -> nonzero rational coefficient."""

    __slots__ = ("registry", "terms", "_key")

    def __init__(self, registry: VarRegistry, terms: Mapping[Mono, Coeff]):
        n = len(registry)
        clean: dict[Mono, Coeff] = {}
        for mono, c in terms.items():
            c = _as_coeff(c)
            if c == 0:
                continue
            mono = tuple(mono)
            if len(mono) != n or any((not isinstance(e, int)) or e < 0 for e in mono):
                raise ValueError(f"bad exponent vector {mono!r}")
            if mono in clean:
                raise ValueError(f"duplicate exponent vector {mono!r}")
            clean[mono] = c
        self.registry = registry
        self.terms = clean
        self._key = None

    @staticmethod
    def _raw(registry: VarRegistry, terms: dict[Mono, Coeff]) -> "MultiPoly":
        p = object.__new__(MultiPoly)
        p.registry = registry
        p.terms = terms
        p._key = None
        return p

    # -- predicates and views ------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_const(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def const_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_const:
            raise ValueError("polynomial is not constant")
        return Fraction(next(iter(self.terms.values())))

    def total_degree(self) -> int:
        if self.is_zero:
            return 0
        return max(sum(m) for m in self.terms)

    def degree_in(self, name: str) -> int:
        if self.is_zero:
            return 0
        i = self.registry.index(name)
        return max(m[i] for m in self.terms)

    def leading(self) -> tuple[Mono, Coeff]:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        mono = max(self.terms, key=_grlex)
        return mono, self.terms[mono]

    def key(self) -> tuple:
        """Canonical hashable key; also a deterministic sort key."""
        if self._key is None:
            items = []
            for mono in sorted(self.terms):
                c = Fraction(self.terms[mono])
                items.append((mono, c.numerator, c.denominator))
            self._key = tuple(items)
        return self._key

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.registry.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.registry == other.registry and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.registry, self.key()))

    # -- ring operations ------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            _check_same_registry(self, other)
            return other
        return self.registry.const(other)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        big, small = (self.terms, other.terms)
        if len(big) < len(small):
            big, small = small, big
        out = dict(big)
        for mono, c in small.items():
            acc = out.get(mono)
            if acc is None:
                out[mono] = c
            else:
                acc = acc + c
                if acc == 0:
                    del out[mono]
                else:
                    out[mono] = acc
        return MultiPoly._raw(self.registry, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.registry, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def scale(self, c: Coeff) -> "MultiPoly":
        c = _as_coeff(c)
        if c == 0:
            return self.registry.zero()
        if c == 1:
            return self
        return MultiPoly._raw(self.registry, {m: v * c for m, v in self.terms.items()})

    def as_ratfunc(self) -> "RatFunc":
        return RatFunc.from_poly(self)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return self.registry.zero()
        if len(a) > len(b):
            a, b = b, a
        out: dict[Mono, Coeff] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                c = ca * cb
                acc = out.get(m)
                if acc is None:
                    out[m] = c
                else:
                    acc = acc + c
                    if acc == 0:
                        del out[m]
                    else:
                        out[m] = acc
        return MultiPoly._raw(self.registry, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a nonnegative int")
        result = self.registry.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- structure ------------------------------------------------------

    def primitive(self) -> tuple[Fraction, "MultiPoly"]:
        """Write self = scale * prim with prim integer, content 1, positive lead.

        The zero polynomial returns (0, 1) so that callers can fold the zero
        into a scalar uniformly.
        """
        if self.is_zero:
            return Fraction(0), self.registry.one()
        den_lcm = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                den_lcm = lcm(den_lcm, c.denominator)
        num_gcd = 0
        ints: dict[Mono, int] = {}
        for m, c in self.terms.items():
            v = int(c * den_lcm)
            ints[m] = v
            num_gcd = gcd(num_gcd, v)
        lead = max(ints, key=_grlex)
        if ints[lead] < 0:
            num_gcd = -num_gcd
        prim = MultiPoly._raw(self.registry, {m: v // num_gcd for m, v in ints.items()})
        return Fraction(num_gcd, den_lcm), prim

    def divide_exact(self, g: "MultiPoly") -> "MultiPoly | None":
        """Exact polynomial quotient self/g, or None if g does not divide."""
        _check_same_registry(self, g)
        if g.is_zero:
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero:
            return self
        if g.is_const:
            return self.scale(Fraction(1) / g.const_value())
        glead, gc = g.leading()
        rest = [(m, c) for m, c in g.terms.items() if m != glead]
        r = dict(self.terms)
        q: dict[Mono, Coeff] = {}
        # max-heap on the graded order via negated keys; stale entries are
        # skipped, and every monomial entering r is pushed exactly once more
        heap = [
            (-sum(m), tuple(-e for e in m), m) for m in r
        ]
        heapq.heapify(heap)
        while heap:
            rlead = heapq.heappop(heap)[2]
            if rlead not in r:
                continue
            diff = tuple(a - b for a, b in zip(rlead, glead))
            if any(e < 0 for e in diff):
                return None
            c = r[rlead] * Fraction(1)
            c = c / gc
            c = _as_coeff(c) if isinstance(c, Fraction) and c.denominator == 1 else c
            q[diff] = c
            del r[rlead]
            for m, gcoef in rest:
                mm = tuple(a + b for a, b in zip(diff, m))
                fresh = mm not in r
                acc = r.get(mm, 0) - c * gcoef
                if acc == 0:
                    r.pop(mm, None)
                else:
                    r[mm] = acc
                    if fresh:
                        heapq.heappush(
                            heap, (-sum(mm), tuple(-e for e in mm), mm)
                        )
        return MultiPoly._raw(self.registry, q)

    def weighted_degree_if_homogeneous(self, weights: Mapping[str, int] | None = None):
        """Weighted degree if all terms share one, else None.  Zero -> 0."""
        if self.is_zero:
            return 0
        if weights is None:
            wvec = [1] * len(self.registry)
        else:
            wvec = [weights.get(nm, 0) for nm in self.registry.names]
        deg = None
        for m in self.terms:
            d = sum(e * w for e, w in zip(m, wvec))
            if deg is None:
                deg = d
            elif d != deg:
                return None
        return deg

    # -- substitution ----------------------------------------------------

    def substitute(self, bindings: Mapping[str, object],
                   target: VarRegistry | None = None) -> "RatFunc":
        """Exact image under the evaluation homomorphism given by bindings.

        Bound variables are replaced simultaneously by their values (RatFunc,
        MultiPoly, or rational constants over `target`); unbound variables
        must exist in `target` by name.  Default target is this registry.
        """
        target = target if target is not None else self.registry
        n_t = len(target)
        occurs = [False] * len(self.registry)
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    occurs[i] = True
        bound: dict[int, RatFunc] = {}
        resid: dict[int, int] = {}
        for i, nm in enumerate(self.registry.names):
            if nm in bindings:
                bound[i] = RatFunc.coerce(target, bindings[nm])
            elif occurs[i]:
                if nm not in target:
                    raise ValueError(f"variable {nm!r} unbound and absent from target registry")
                resid[i] = target.index(nm)
        for nm in bindings:
            if nm not in self.registry:
                raise KeyError(f"binding for unknown variable {nm!r}")
        pow_cache: dict[tuple[int, int], RatFunc] = {}

        def power(i: int, e: int) -> "RatFunc":
            got = pow_cache.get((i, e))
            if got is None:
                got = bound[i] ** e
                pow_cache[(i, e)] = got
            return got

        total = RatFunc.zero(target)
        for mono in sorted(self.terms):
            c = self.terms[mono]
            tm = [0] * n_t
            for i, j in resid.items():
                tm[j] = mono[i]
            acc = RatFunc.from_poly(MultiPoly._raw(target, {tuple(tm): c}))
            for i in bound:
                e = mono[i]
                if e:
                    acc = acc * power(i, e)
            total = total + acc
        return total

    # -- text ------------------------------------------------------------

    def text(self) -> str:
        return _poly_text(self)

    def __repr__(self) -> str:
        return f"<MultiPoly {self.text()}>"


def _coeff_text(c: Coeff) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _poly_text(p: MultiPoly) -> str:
    if p.is_zero:
        return "0"
    chunks: list[str] = []
    for mono in sorted(p.terms, key=_grlex, reverse=True):
        c = Fraction(p.terms[mono])
        parts = []
        for e, nm in zip(mono, p.registry.names):
            if e == 1:
                parts.append(nm)
            elif e > 1:
                parts.append(f"{nm}^{e}")
        mag = abs(c)
        if not parts or mag != 1:
            parts.insert(0, _coeff_text(mag))
        body = "*".join(parts)
        if not chunks:
            chunks.append(body if c > 0 else f"-{body}")
        else:
            chunks.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(chunks)


class RatFunc:
    """Exact rational function with a factored, trial-division-reduced denominator.

    Canonical layout: ``scalar * num / prod(factor**mult)`` where `num` and
    every factor are primitive integer polynomials with positive leading
    coefficient, the factor list is sorted, and `num` is divisible by no
    factor.  The zero function is scalar 0 with empty denominator.  Equality
    falls back to exact cross-multiplication, so two representations of the
    same function always compare equal.
    """

    __slots__ = ("registry", "scalar", "num", "factors", "_den")

    def __init__(self, *args, **kwargs):
        raise TypeError("use RatFunc.from_poly / from_num_den / coerce")

    @staticmethod
    def _make(registry: VarRegistry, scalar: Fraction, num: MultiPoly,
              factors: tuple[tuple[MultiPoly, int], ...]) -> "RatFunc":
        f = object.__new__(RatFunc)
        f.registry = registry
        f.scalar = scalar
        f.num = num
        f.factors = factors
        f._den = None
        return f

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(registry: VarRegistry) -> "RatFunc":
        return RatFunc._make(registry, Fraction(0), registry.one(), ())

    @staticmethod
    def one(registry: VarRegistry) -> "RatFunc":
        return RatFunc._make(registry, Fraction(1), registry.one(), ())

    @staticmethod
    def from_scalar(registry: VarRegistry, c: Coeff) -> "RatFunc":
        c = Fraction(c)
        if c == 0:
            return RatFunc.zero(registry)
        return RatFunc._make(registry, c, registry.one(), ())

    @staticmethod
    def from_poly(p: MultiPoly) -> "RatFunc":
        s, prim = p.primitive()
        if s == 0:
            return RatFunc.zero(p.registry)
        return RatFunc._make(p.registry, s, prim, ())

    @staticmethod
    def coerce(registry: VarRegistry, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            if x.registry != registry:
                raise ValueError("registry mismatch between operands")
            return x
        if isinstance(x, MultiPoly):
            if x.registry != registry:
                raise ValueError("registry mismatch between operands")
            return RatFunc.from_poly(x)
        if isinstance(x, (int, Fraction)):
            return RatFunc.from_scalar(registry, x)
        raise TypeError(f"cannot interpret {type(x).__name__} as RatFunc")

    @staticmethod
    def from_num_den(num: MultiPoly, den: MultiPoly) -> "RatFunc":
        _check_same_registry(num, den)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        return RatFunc.from_factored(num, [den])

    @staticmethod
    def from_factored(num: MultiPoly, dens: Iterable[MultiPoly],
                      scale: Coeff = 1) -> "RatFunc":
        """Build num / (scale-adjusted product of dens), keeping dens factored."""
        registry = num.registry
        scalar = Fraction(scale)
        if scalar == 0:
            raise ZeroDivisionError("zero denominator scale")
        s, prim = num.primitive()
        if s == 0:
            return RatFunc.zero(registry)
        scalar = s / scalar
        fac: dict[tuple, tuple[MultiPoly, int]] = {}
        for d in dens:
            _check_same_registry(num, d)
            if d.is_zero:
                raise ZeroDivisionError("zero denominator factor")
            ds, dp = d.primitive()
            scalar = scalar / ds
            if dp.is_const:
                continue
            k = dp.key()
            if k in fac:
                fac[k] = (dp, fac[k][1] + 1)
            else:
                fac[k] = (dp, 1)
        return RatFunc._reduced(registry, scalar, prim, fac)

    @staticmethod
    def _reduced(registry: VarRegistry, scalar: Fraction, num: MultiPoly,
                 fac: dict[tuple, tuple[MultiPoly, int]]) -> "RatFunc":
        """Normalize: cancel factors dividing num, drop constants, sort."""
        if scalar == 0 or num.is_zero:
            return RatFunc.zero(registry)
        out: list[tuple[MultiPoly, int]] = []
        # one numerator evaluation screens every candidate factor below
        fval = _primitive_value_at_point(num)
        for k in sorted(fac):
            f, mult = fac[k]
            gval = _primitive_value_at_point(f) if fval is not None else None
            while mult > 0:
                if fval is not None and gval not in (None, 0) and fval % gval:
                    break
                q = num.divide_exact(f)
                if q is None:
                    break
                num = q
                mult -= 1
                if fval is not None:
                    fval = _primitive_value_at_point(num)
            if mult > 0:
                out.append((f, mult))
        # division of primitives yields a primitive, but renormalize cheaply
        # in case callers handed in a non-primitive numerator
        s, num = num.primitive()
        scalar = scalar * s
        return RatFunc._make(registry, scalar, num, tuple(out))

    # -- views -------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.scalar == 0

    @property
    def numerator(self) -> MultiPoly:
        """Numerator of the canonical pair (scalar folded in)."""
        return self.num.scale(self.scalar)

    @property
    def denominator(self) -> MultiPoly:
        """Expanded denominator: primitive, positive leading coefficient."""
        if self._den is None:
            den = self.registry.one()
            for f, m in self.factors:
                den = den * f ** m
            self._den = den
        return self._den

    def is_poly(self) -> bool:
        return not self.factors

    def as_poly(self) -> MultiPoly:
        if self.factors:
            raise ValueError("rational function has a nontrivial denominator")
        return self.numerator

    def const_value(self) -> Fraction:
        if self.factors or not self.num.is_const:
            raise ValueError("rational function is not constant")
        return self.scalar * self.num.const_value()

    # -- arithmetic ----------------------------------------------------------

    def _factor_dict(self) -> dict[tuple, tuple[MultiPoly, int]]:
        return {f.key(): (f, m) for f, m in self.factors}

    def __add__(self, other) -> "RatFunc":
        other = RatFunc.coerce(self.registry, other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        fa = self._factor_dict()
        fb = other._factor_dict()
        union: dict[tuple, tuple[MultiPoly, int]] = {}
        for k, (f, m) in fa.items():
            union[k] = (f, m)
        for k, (f, m) in fb.items():
            if k in union:
                union[k] = (f, max(union[k][1], m))
            else:
                union[k] = (f, m)
        numa = self.num
        for k, (f, m) in union.items():
            need = m - (fa[k][1] if k in fa else 0)
            for _ in range(need):
                numa = numa * f
        numb = other.num
        for k, (f, m) in union.items():
            need = m - (fb[k][1] if k in fb else 0)
            for _ in range(need):
                numb = numb * f
        sa, sb = self.scalar, other.scalar
        q = sa.denominator * sb.denominator
        num = numa.scale(sa.numerator * sb.denominator) + numb.scale(sb.numerator * sa.denominator)
        if num.is_zero:
            return RatFunc.zero(self.registry)
        s, prim = num.primitive()
        return RatFunc._reduced(self.registry, s / q, prim, union)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._make(self.registry, -self.scalar, self.num, self.factors)

    def __sub__(self, other) -> "RatFunc":
        return self + (-RatFunc.coerce(self.registry, other))

    def __rsub__(self, other) -> "RatFunc":
        return (-self) + other

    def __mul__(self, other) -> "RatFunc":
        other = RatFunc.coerce(self.registry, other)
        if self.is_zero or other.is_zero:
            return RatFunc.zero(self.registry)
        merged: dict[tuple, tuple[MultiPoly, int]] = {}
        for f, m in self.factors:
            merged[f.key()] = (f, m)
        for f, m in other.factors:
            k = f.key()
            if k in merged:
                merged[k] = (f, merged[k][1] + m)
            else:
                merged[k] = (f, m)
        num = self.num * other.num
        return RatFunc._reduced(self.registry, self.scalar * other.scalar, num, merged)

    __rmul__ = __mul__

    def reciprocal(self) -> "RatFunc":
        if self.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        num = self.denominator
        fac: dict[tuple, tuple[MultiPoly, int]] = {}
        scalar = 1 / self.scalar
        if self.num.is_const:
            scalar = scalar / self.num.const_value()
        else:
            fac[self.num.key()] = (self.num, 1)
        s, prim = num.primitive()
        return RatFunc._reduced(self.registry, scalar * s, prim, fac)

    def __truediv__(self, other) -> "RatFunc":
        other = RatFunc.coerce(self.registry, other)
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "RatFunc":
        return RatFunc.coerce(self.registry, other) * self.reciprocal()

    def __pow__(self, n: int) -> "RatFunc":
        if not isinstance(n, int):
            raise ValueError("exponent must be an int")
        if n < 0:
            return self.reciprocal() ** (-n)
        result = RatFunc.one(self.registry)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = RatFunc.coerce(self.registry, other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        if self.registry != other.registry:
            return False
        if self.scalar == other.scalar and self.num == other.num and \
                [(f.key(), m) for f, m in self.factors] == [(f.key(), m) for f, m in other.factors]:
            return True
        return (self - other).is_zero

    # deliberately unhashable: equal values may carry different factor splits
    __hash__ = None

    # -- substitution ---------------------------------------------------------

    def substitute(self, bindings: Mapping[str, object],
                   target: VarRegistry | None = None) -> "RatFunc":
        """Simultaneous exact substitution; raises PoleError on a vanishing denominator."""
        target = target if target is not None else self.registry
        out = self.num.substitute(bindings, target) * self.scalar
        for f, m in self.factors:
            fr = f.substitute(bindings, target)
            if fr.is_zero:
                raise PoleError("substitution makes a denominator factor vanish")
            # divide factor by factor so the image keeps its split denominator
            for _ in range(m):
                out = out / fr
        return out

    # -- text -------------------------------------------------------------------

    def text(self) -> str:
        """Canonical display: integer numerator over the factored denominator.

        The scalar's denominator is printed as a leading integer inside the
        denominator parentheses, e.g. 1/(2(a + h)(a + 2*h)); a lone factor
        keeps only the outer parentheses.
        """
        if not self.factors:
            return _poly_text(self.numerator)
        num_disp = self.num.scale(self.scalar.numerator)
        num_text = _poly_text(num_disp)
        if len(num_disp.terms) > 1:
            num_text = f"({num_text})"
        pieces: list[str] = []
        if self.scalar.denominator != 1:
            pieces.append(str(self.scalar.denominator))
        for f, m in self.factors:
            ft = _poly_text(f)
            bare = re.fullmatch(r"[A-Za-z_]\w*(\^\d+)?", ft) is not None
            if bare and m == 1:
                pieces.append(ft)
            elif bare and "^" not in ft:
                pieces.append(f"{ft}^{m}")
            else:
                pieces.append(f"({ft})" if m == 1 else f"({ft})^{m}")
        if len(pieces) == 1 and pieces[0].startswith("(") and pieces[0].endswith(")"):
            pieces[0] = pieces[0][1:-1]
        return f"{num_text}/({''.join(pieces)})"

    def __repr__(self) -> str:
        return f"<RatFunc {self.text()}>"


# -- module-level convenience functions ----------------------------------------


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Ring operation on polynomials: op in {'add', 'sub', 'mul'}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation {op!r}")


def rat_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    """Field operation on rational functions: op in {'add', 'sub', 'mul', 'div'}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown rational operation {op!r}")


def substitute(f: RatFunc | MultiPoly, bindings: Mapping[str, object],
               target: VarRegistry | None = None) -> RatFunc:
    """Exact evaluation homomorphism on a polynomial or rational function."""
    if isinstance(f, MultiPoly):
        return f.substitute(bindings, target)
    return f.substitute(bindings, target)


def homogeneous_degree(f: RatFunc | MultiPoly,
                       weights: Mapping[str, int] | None = None):
    """Weighted degree of f if numerator and denominator are homogeneous.

    Returns an int, or None when either side mixes weighted degrees.  The
    zero function reports 0.
    """
    if isinstance(f, MultiPoly):
        return f.weighted_degree_if_homogeneous(weights)
    dn = f.num.weighted_degree_if_homogeneous(weights)
    if dn is None:
        return None
    dd = 0
    for fac, m in f.factors:
        d = fac.weighted_degree_if_homogeneous(weights)
        if d is None:
            return None
        dd += d * m
    if f.is_zero:
        return 0
    return dn - dd


def shifted_factorial(registry: VarRegistry, p: int, alpha: MultiPoly,
                      h: MultiPoly) -> MultiPoly:
    """Product (1*h + alpha)(2*h + alpha)...(p*h + alpha); empty product is 1."""
    if p < 0:
        raise ValueError("shifted factorial needs p >= 0")
    out = registry.one()
    for m in range(1, p + 1):
        out = out * (h.scale(m) + alpha)
    return out


# -- partial fractions ---------------------------------------------------------


class LinearFactorization:
    """Denominator factored into degree-one factors of one distinguished variable.

    Each factor must be of the form a*var + b where a is a nonzero rational
    constant and b is free of var.  Roots are -b/a.  The represented
    denominator is scale * product(factors).
    """

    __slots__ = ("registry", "var", "pairs", "scale")

    def __init__(self, var: str, factors: Sequence[MultiPoly], scale: RatFunc):
        if not factors:
            raise ValueError("factorization needs at least one factor")
        registry = factors[0].registry
        if var not in registry:
            raise KeyError(f"unknown variable {var!r}")
        if scale.registry != registry:
            raise ValueError("registry mismatch between operands")
        if scale.is_zero:
            raise ZeroDivisionError("zero scale")
        vi = registry.index(var)
        if _ratfunc_degree_in(scale, var) != 0:
            raise ValueError("scale must not involve the distinguished variable")
        pairs: list[tuple[RatFunc, MultiPoly]] = []
        for f in factors:
            _check_same_registry(factors[0], f)
            lin: Coeff = 0
            const_terms: dict[Mono, Coeff] = {}
            for mono, c in f.terms.items():
                if mono[vi] == 0:
                    const_terms[mono] = c
                elif mono[vi] == 1 and sum(mono) == 1:
                    lin = c
                else:
                    raise ValueError("factor is not of the form a*var + b with constant a")
            if lin == 0:
                raise ValueError("factor has degree 0 in the distinguished variable")
            b = MultiPoly._raw(registry, const_terms)
            root = RatFunc.from_poly(-b) / lin
            pairs.append((root, f))
        for i in range(len(pairs)):
            for j in range(i + 1, len(pairs)):
                if pairs[i][0] == pairs[j][0]:
                    raise ValueError("repeated root in factorization")
        self.registry = registry
        self.var = var
        self.pairs = tuple(pairs)
        self.scale = scale

    def __len__(self) -> int:
        return len(self.pairs)

    def roots(self) -> list[RatFunc]:
        return [r for r, _ in self.pairs]

    def expand(self) -> RatFunc:
        """Reconstruct the represented denominator as a RatFunc."""
        out = self.scale
        for _, f in self.pairs:
            out = out * f
        return out


def _ratfunc_degree_in(f: RatFunc, name: str) -> int:
    d = f.num.degree_in(name)
    for fac, m in f.factors:
        d += fac.degree_in(name) * m
    return d


def partial_fractions(scale: RatFunc, factorization: LinearFactorization,
                      numerator: MultiPoly) -> list[tuple[RatFunc, MultiPoly]]:
    """Split numerator / (scale * product(factors)) into first-order terms.

    Returns [(residue_k, factor_k)] with
    sum(residue_k / factor_k) == numerator / (scale * product(factors)).
    Each residue is the deleted product evaluated at the factor's root.
    Preconditions: numerator degree in the distinguished variable is strictly
    below the factor count, and roots are pairwise distinct (enforced by the
    factorization).
    """
    registry = factorization.registry
    if scale.registry != registry or numerator.registry != registry:
        raise ValueError("registry mismatch between operands")
    if scale.is_zero:
        raise ZeroDivisionError("zero scale")
    var = factorization.var
    if _ratfunc_degree_in(scale, var) != 0:
        raise ValueError("scale must not involve the distinguished variable")
    if numerator.degree_in(var) >= len(factorization):
        raise ValueError("numerator degree must be below the number of factors")
    full_scale = scale * factorization.scale
    out: list[tuple[RatFunc, MultiPoly]] = []
    for k, (root, factor) in enumerate(factorization.pairs):
        binding = {var: root}
        num_at = numerator.substitute(binding)
        deleted = full_scale
        for l, (_, other) in enumerate(factorization.pairs):
            if l != k:
                deleted = deleted * other.substitute(binding)
        out.append((num_at / deleted, factor))
    return out


def recombine(decomposition: Iterable[tuple[RatFunc, MultiPoly]],
              registry: VarRegistry) -> RatFunc:
    """Sum residue/factor terms back into a single rational function."""
    total = RatFunc.zero(registry)
    for residue, factor in decomposition:
        total = total + residue / RatFunc.from_poly(factor)
    return total


# -- canonical text parsing -----------------------------------------------------


class _Tokens:
    def __init__(self, s: str):
        self.toks = re.findall(r"\d+|[A-Za-z_][A-Za-z0-9_]*|[()+\-*/^]", s)
        if "".join(self.toks).replace(" ", "") != s.replace(" ", ""):
            raise ValueError(f"unparseable characters in {s!r}")
        self.i = 0

    def peek(self, ahead: int = 0):
        j = self.i + ahead
        return self.toks[j] if j < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ValueError("unexpected end of input")
        self.i += 1
        return t

    def expect(self, t: str):
        got = self.next()
        if got != t:
            raise ValueError(f"expected {t!r}, got {got!r}")


def _parse_poly(ts: _Tokens, registry: VarRegistry) -> MultiPoly:
    total = registry.zero()
    sign = 1
    t = ts.peek()
    if t in ("+", "-"):
        ts.next()
        sign = -1 if t == "-" else 1
    while True:
        total = total + _parse_term(ts, registry).scale(sign)
        t = ts.peek()
        if t == "+":
            ts.next()
            sign = 1
        elif t == "-":
            ts.next()
            sign = -1
        else:
            return total


def _parse_term(ts: _Tokens, registry: VarRegistry) -> MultiPoly:
    out = _parse_atom(ts, registry)
    while ts.peek() == "*":
        ts.next()
        out = out * _parse_atom(ts, registry)
    return out


def _parse_atom(ts: _Tokens, registry: VarRegistry) -> MultiPoly:
    t = ts.next()
    if t.isdigit():
        val: Coeff = int(t)
        # a slash only continues the coefficient when a bare integer follows;
        # otherwise it separates numerator from denominator one level up
        if ts.peek() == "/" and (ts.peek(1) or "").isdigit():
            ts.next()
            val = Fraction(val, int(ts.next()))
        return registry.const(val)
    if _NAME_RE.fullmatch(t):
        e = 1
        if ts.peek() == "^":
            ts.next()
            d = ts.next()
            if not d.isdigit():
                raise ValueError("expected integer exponent")
            e = int(d)
        return registry.var(t) ** e
    raise ValueError(f"unexpected token {t!r}")


def _parse_exponent(ts: _Tokens) -> int:
    ts.next()
    d = ts.next()
    if not d.isdigit():
        raise ValueError("expected integer exponent")
    return int(d)


def _parse_factored_den(ts: _Tokens, registry: VarRegistry):
    """Product of juxtaposed pieces: integers, variable powers, (poly)^m blocks.

    A top-level + or - means the whole content is a single expanded factor.
    """
    start = ts.i
    scale: Coeff = 1
    factors: list[tuple[MultiPoly, int]] = []
    while ts.peek() not in (")", None):
        t = ts.peek()
        if t in ("+", "-"):
            ts.i = start
            return 1, [(_parse_poly(ts, registry), 1)]
        if t == "*":
            ts.next()
            continue
        if t == "(":
            ts.next()
            f = _parse_poly(ts, registry)
            ts.expect(")")
            m = _parse_exponent(ts) if ts.peek() == "^" else 1
            factors.append((f, m))
        elif t.isdigit():
            ts.next()
            if ts.peek() == "/" and (ts.peek(1) or "").isdigit():
                ts.next()
                scale = scale * Fraction(int(t), int(ts.next()))
            else:
                scale = scale * int(t)
        elif _NAME_RE.fullmatch(t):
            ts.next()
            e = _parse_exponent(ts) if ts.peek() == "^" else 1
            factors.append((registry.var(t) ** e, 1))
        else:
            raise ValueError(f"unexpected token {t!r} in denominator")
    return scale, factors


def parse_text(registry: VarRegistry, s: str) -> RatFunc:
    """Parse the canonical text form back into a RatFunc."""
    ts = _Tokens(s)
    if ts.peek() == "(":
        ts.next()
        num = _parse_poly(ts, registry)
        ts.expect(")")
    else:
        num = _parse_poly(ts, registry)
        if ts.peek() is None:
            return RatFunc.from_poly(num)
    ts.expect("/")
    ts.expect("(")
    scale, factors = _parse_factored_den(ts, registry)
    ts.expect(")")
    if ts.peek() is not None:
        raise ValueError("trailing input after rational function")
    dens: list[MultiPoly] = []
    for f, m in factors:
        dens.extend([f] * m)
    return RatFunc.from_factored(num, dens) / RatFunc.from_scalar(registry, scale)
