"""Exact coefficient arithmetic.

Scalars live in towers of simple algebraic extensions of the rationals.
An element of a tower with n levels is represented recursively: a
``Fraction`` at depth 0, and at depth n a trimmed tuple of depth-(n-1)
elements (the coefficients in the top variable, reduced modulo the top
modulus; the empty tuple is zero).

Moduli are adjoined optimistically (dynamic evaluation): whenever an
inversion discovers a zero divisor, a :class:`~enriques.errors.ModulusSplit`
carrying a proper factor is raised, and callers branch the tower.
Irreducibility over the rationals itself is certified by full univariate
factorization, so splits can only involve moduli adjoined over a
non-trivial tower.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .errors import DivisionByZero, ModulusSplit


# ---------------------------------------------------------------------------
# Towers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tower:
    """A stack of simple extensions of QQ.

    ``levels`` is a tuple of ``(var, modulus)`` pairs; each modulus is a
    monic squarefree dense coefficient tuple over the tower below it, of
    degree >= 2.  The empty tower is QQ itself.
    """

    levels: tuple = ()

    @property
    def depth(self):
        return len(self.levels)

    def sub(self):
        return Tower(self.levels[:-1])

    @property
    def top_var(self):
        return self.levels[-1][0]

    @property
    def top_modulus(self):
        return self.levels[-1][1]

    def extend(self, var, modulus):
        if any(v == var for v, _ in self.levels):
            raise ValueError(f"variable {var!r} already used in tower")
        return Tower(self.levels + ((var, modulus),))

    @property
    def degree(self):
        d = 1
        for _, m in self.levels:
            d *= len(m) - 1
        return d


QQ = Tower()


def is_zero(tw, a):
    if not tw.levels:
        return a == 0
    return a == ()


def zero(tw):
    return Fraction(0) if not tw.levels else ()


def one(tw):
    if not tw.levels:
        return Fraction(1)
    return (one(tw.sub()),)


def from_rational(tw, q):
    q = Fraction(q)
    if not tw.levels:
        return q
    if q == 0:
        return ()
    return (from_rational(tw.sub(), q),)


def lift(tw, a):
    """Regard an element of ``tw.sub()`` as an element of ``tw``."""
    return () if is_zero(tw.sub(), a) else (a,)


def generator(tw):
    """The class of the top variable of a non-trivial tower."""
    s = tw.sub()
    return pmod(s, (zero(s), one(s)), tw.top_modulus)


def add(tw, a, b):
    if not tw.levels:
        return a + b
    return padd(tw.sub(), a, b)


def neg(tw, a):
    if not tw.levels:
        return -a
    return pneg(tw.sub(), a)


def sub(tw, a, b):
    return add(tw, a, neg(tw, b))


def mul(tw, a, b):
    if not tw.levels:
        return a * b
    s = tw.sub()
    return pmod(s, pmul(s, a, b), tw.top_modulus)


def inv(tw, a):
    if not tw.levels:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / a
    s = tw.sub()
    a = pmod(s, a, tw.top_modulus)
    if not a:
        raise DivisionByZero("inverse of zero")
    g, u = _xgcd_against(s, a, tw.top_modulus)
    if pdeg(g) == 0:
        c = inv(s, g[0])
        return pmod(s, pscale(s, u, c), tw.top_modulus)
    # g is a proper monic factor of the modulus (deg a < deg modulus)
    raise ModulusSplit(tw.top_var, g)


def div(tw, a, b):
    return mul(tw, a, inv(tw, b))


def rereduce(tw_new, a):
    """Re-reduce an element after the top modulus shrank (tower split)."""
    if not tw_new.levels:
        return a
    return pmod(tw_new.sub(), a, tw_new.top_modulus)


def split_tower(tw, factor):
    """Branch a tower at its top modulus: (factor tower, cofactor tower)."""
    s = tw.sub()
    var = tw.top_var
    cofactor = pdiv_exact(s, tw.top_modulus, factor)
    return (Tower(s.levels + ((var, factor),)),
            Tower(s.levels + ((var, cofactor),)))


def branched(tower, var, fn):
    """Run ``fn(tower)``, branching on splits of the modulus owned by ``var``.

    Returns a list of ``(tower, result)`` pairs, one per surviving branch.
    Splits of other moduli propagate to their own handler.
    """
    try:
        return [(tower, fn(tower))]
    except ModulusSplit as e:
        if e.var != var:
            raise
        t1, t2 = split_tower(tower, e.factor)
        return branched(t1, var, fn) + branched(t2, var, fn)


# ---------------------------------------------------------------------------
# Dense univariate polynomials over a tower (plain tuples, low -> high)
# ---------------------------------------------------------------------------

def ptrim(tw, cs):
    cs = list(cs)
    while cs and is_zero(tw, cs[-1]):
        cs.pop()
    return tuple(cs)


def pdeg(f):
    return len(f) - 1


def pconst(tw, c):
    return () if is_zero(tw, c) else (c,)


def padd(tw, f, g):
    n = max(len(f), len(g))
    z = zero(tw)
    out = [add(tw, f[i] if i < len(f) else z, g[i] if i < len(g) else z)
           for i in range(n)]
    return ptrim(tw, out)


def pneg(tw, f):
    return tuple(neg(tw, c) for c in f)


def psub(tw, f, g):
    return padd(tw, f, pneg(tw, g))


def pscale(tw, f, c):
    if is_zero(tw, c):
        return ()
    return ptrim(tw, [mul(tw, a, c) for a in f])


def pmul(tw, f, g):
    if not f or not g:
        return ()
    z = zero(tw)
    out = [z] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if is_zero(tw, a):
            continue
        for j, b in enumerate(g):
            out[i + j] = add(tw, out[i + j], mul(tw, a, b))
    return ptrim(tw, out)


def pdivmod(tw, f, g):
    if not g:
        raise DivisionByZero("polynomial division by zero")
    invlc = inv(tw, g[-1])
    q = [zero(tw)] * max(0, len(f) - len(g) + 1)
    r = list(f)
    while len(r) >= len(g) and ptrim(tw, r):
        r = list(ptrim(tw, r))
        if len(r) < len(g):
            break
        c = mul(tw, r[-1], invlc)
        k = len(r) - len(g)
        q[k] = c
        for i, b in enumerate(g):
            r[k + i] = sub(tw, r[k + i], mul(tw, c, b))
        r = r[:-1]
    return ptrim(tw, q), ptrim(tw, r)


def pmod(tw, f, g):
    return pdivmod(tw, f, g)[1]


def pdiv_exact(tw, f, g):
    q, r = pdivmod(tw, f, g)
    if r:
        raise ValueError("inexact polynomial division")
    return q


def pmonic(tw, f):
    if not f:
        return f
    return pscale(tw, f, inv(tw, f[-1]))


def pgcd(tw, f, g):
    f, g = ptrim(tw, f), ptrim(tw, g)
    if not tw.levels:
        return _pgcd_qq(f, g)
    while g:
        f, g = g, pmod(tw, f, g)
    return pmonic(tw, f)


def _prim_int(f):
    """Scale rational coefficients to a primitive integer tuple."""
    import math as _math
    den = 1
    for c in f:
        den = den * c.denominator // _math.gcd(den, c.denominator)
    ints = [int(c * den) for c in f]
    g = 0
    for v in ints:
        g = _math.gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _pgcd_qq(f, g):
    """Rational univariate gcd via the primitive PRS over the integers
    (avoids the coefficient blowup of naive Euclid over Fraction)."""
    import math as _math
    if not f:
        return pmonic(QQ, g)
    if not g:
        return pmonic(QQ, f)
    a, b = _prim_int(f), _prim_int(g)
    while b:
        # integer pseudo-remainder of a by b
        r = list(a)
        lb = b[-1]
        while len(r) >= len(b) and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) < len(b):
                break
            lr = r[-1]
            k = len(r) - len(b)
            r = [v * lb for v in r]
            for i, bv in enumerate(b):
                r[k + i] -= lr * bv
            r = r[:-1]
        while r and r[-1] == 0:
            r.pop()
        if r:
            cont = 0
            for v in r:
                cont = _math.gcd(cont, v)
            if cont > 1:
                r = [v // cont for v in r]
        a, b = b, r
    lead = a[-1]
    return tuple(Fraction(v, lead) for v in a)


def pderiv(tw, f):
    return ptrim(tw, [mul(tw, from_rational(tw, i), f[i])
                      for i in range(1, len(f))])


def peval(tw, f, x0):
    acc = zero(tw)
    for c in reversed(f):
        acc = add(tw, mul(tw, acc, x0), c)
    return acc


def _xgcd_against(tw, a, m):
    """Return (g, u) with g = gcd(a, m) monic and u*a = g (mod m)."""
    r0, s0 = ptrim(tw, m), ()
    r1, s1 = ptrim(tw, a), (one(tw),)
    while r1:
        q, r = pdivmod(tw, r0, r1)
        r0, s0, r1, s1 = r1, s1, r, psub(tw, s0, pmul(tw, q, s1))
    if not r0:
        raise DivisionByZero("gcd of zero polynomials")
    c = inv(tw, r0[-1])
    return pscale(tw, r0, c), pscale(tw, s0, c)


def plift(tw_ext, f):
    """Lift a polynomial over ``tw_ext.sub()`` coefficientwise into ``tw_ext``."""
    return tuple(lift(tw_ext, c) for c in f)


def prereduce(tw_new, f):
    return ptrim(tw_new, [rereduce(tw_new, c) for c in f])


# ---------------------------------------------------------------------------
# Public element wrapper (API and JSON boundary)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    tower: Tower
    rep: object

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.tower != self.tower:
                raise ValueError("tower mismatch")
            return other.rep
        return from_rational(self.tower, other)

    def __add__(self, other):
        return FieldElement(self.tower, add(self.tower, self.rep, self._coerce(other)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.tower, neg(self.tower, self.rep))

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def _wrap(self, other):
        return FieldElement(self.tower, self._coerce(other))

    def __mul__(self, other):
        return FieldElement(self.tower, mul(self.tower, self.rep, self._coerce(other)))

    __rmul__ = __mul__

    def inverse(self):
        return FieldElement(self.tower, inv(self.tower, self.rep))

    @property
    def is_zero(self):
        return is_zero(self.tower, self.rep)


def field_arith(a, b, op):
    """add / mul / invert on FieldElements (invert ignores ``b``)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "invert":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Bivariate polynomials
# ---------------------------------------------------------------------------

class BiPoly:
    """Exact bivariate polynomial in x, y over a field tower.

    Terms are kept sparse as ``{(i, j): coeff}`` with nonzero reduced
    coefficients.  Supports +, -, *, ** with int/Fraction coercion.
    """

    __slots__ = ("tower", "terms")

    def __init__(self, tower, terms):
        self.tower = tower
        self.terms = {k: v for k, v in terms.items() if not is_zero(tower, v)}

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, tower=QQ):
        return cls(tower, {})

    @classmethod
    def const(cls, value, tower=QQ):
        return cls(tower, {(0, 0): from_rational(tower, value)})

    @classmethod
    def variable(cls, name, tower=QQ):
        if name == "x":
            return cls(tower, {(1, 0): one(tower)})
        if name == "y":
            return cls(tower, {(0, 1): one(tower)})
        raise ValueError("variables are named 'x' and 'y'")

    @classmethod
    def from_elem(cls, tower, elem):
        return cls(tower, {(0, 0): elem})

    # -- basics --------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            try:
                other = BiPoly.const(other, self.tower)
            except (TypeError, ValueError):
                return NotImplemented
        return self.tower == other.tower and self.terms == other.terms

    def __hash__(self):
        return hash((self.tower, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "BiPoly(0)"
        bits = []
        for (i, j), c in sorted(self.terms.items()):
            mono = "".join(s for s, e in (("x", i), ("y", j)) for s in [s * 0 or f"{s}^{e}" if e > 1 else (s if e == 1 else "")] if s)
            bits.append(f"({c!r}){mono}" if mono else f"({c!r})")
        return "BiPoly(" + " + ".join(bits) + ")"

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            if other.tower != self.tower:
                raise ValueError("tower mismatch")
            return other
        return BiPoly.const(other, self.tower)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        tw = self.tower
        for k, v in other.terms.items():
            out[k] = add(tw, out.get(k, zero(tw)), v)
        return BiPoly(tw, out)

    __radd__ = __add__

    def __neg__(self):
        tw = self.tower
        return BiPoly(tw, {k: neg(tw, v) for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        tw = self.tower
        out = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = add(tw, out.get(k, zero(tw)), mul(tw, a, b))
        return BiPoly(tw, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        acc = BiPoly.const(1, self.tower)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base if n > 1 else base
            n >>= 1
        return acc

    # -- structure -----------------------------------------------------
    def order(self):
        """Order of vanishing at the origin (min total degree)."""
        if not self.terms:
            raise ValueError("order of the zero polynomial")
        return min(i + j for i, j in self.terms)

    def total_degree(self):
        if not self.terms:
            return -1
        return max(i + j for i, j in self.terms)

    def deg_x(self):
        return max((i for i, _ in self.terms), default=-1)

    def deg_y(self):
        return max((j for _, j in self.terms), default=-1)

    def coeff(self, i, j):
        return self.terms.get((i, j), zero(self.tower))

    def leading_form(self):
        m = self.order()
        return BiPoly(self.tower, {k: v for k, v in self.terms.items()
                                   if k[0] + k[1] == m})

    def form_in_t(self):
        """The lowest form written as a polynomial in t = y/x.

        Returns ``(coeffs, x_mult)``: dense coefficients of L(1, t) and the
        multiplicity of x in the lowest form (the 'direction at infinity').
        """
        m = self.order()
        tw = self.tower
        cs = [zero(tw)] * (m + 1)
        for (i, j), c in self.terms.items():
            if i + j == m:
                cs[j] = c
        cs = ptrim(tw, cs)
        x_mult = m - pdeg(cs) if cs else m
        return cs, x_mult

    def deriv(self, var):
        tw = self.tower
        out = {}
        for (i, j), c in self.terms.items():
            if var == "x" and i > 0:
                out[(i - 1, j)] = add(tw, out.get((i - 1, j), zero(tw)),
                                      mul(tw, from_rational(tw, i), c))
            elif var == "y" and j > 0:
                out[(i, j - 1)] = add(tw, out.get((i, j - 1), zero(tw)),
                                      mul(tw, from_rational(tw, j), c))
        return BiPoly(tw, out)

    def eval_origin_shifted(self):
        return self.terms.get((0, 0), zero(self.tower))

    def compose(self, px, py):
        """Substitute BiPolys for x and y."""
        tw = self.tower
        xpow = {0: BiPoly.const(1, tw)}
        ypow = {0: BiPoly.const(1, tw)}

        def power(cache, base, n):
            if n not in cache:
                cache[n] = power(cache, base, n - 1) * base
            return cache[n]

        acc = BiPoly.zero(tw)
        for (i, j), c in self.terms.items():
            acc = acc + BiPoly.from_elem(tw, c) * power(xpow, px, i) * power(ypow, py, j)
        return acc

    def linear_change(self, a11, a12, a21, a22):
        """Substitute x -> a11 x + a12 y, y -> a21 x + a22 y (rational entries)."""
        tw = self.tower
        x = BiPoly.variable("x", tw)
        y = BiPoly.variable("y", tw)
        return self.compose(a11 * x + a12 * y, a21 * x + a22 * y)

    def lift_to(self, tw_ext):
        return BiPoly(tw_ext, {k: lift(tw_ext, v) for k, v in self.terms.items()})

    def rereduce_to(self, tw_new):
        return BiPoly(tw_new, {k: rereduce(tw_new, v) for k, v in self.terms.items()})

    # -- conversions to (K[x])[y] -------------------------------------
    def to_yx(self):
        tw = self.tower
        dy = self.deg_y()
        if dy < 0:
            return ()
        rows = [{} for _ in range(dy + 1)]
        for (i, j), c in self.terms.items():
            rows[j][i] = c
        out = []
        for row in rows:
            dx = max(row, default=-1)
            out.append(ptrim(tw, [row.get(i, zero(tw)) for i in range(dx + 1)]))
        while out and not out[-1]:
            out.pop()
        return tuple(out)

    @classmethod
    def from_yx(cls, tower, yx):
        terms = {}
        for j, row in enumerate(yx):
            for i, c in enumerate(row):
                if not is_zero(tower, c):
                    terms[(i, j)] = c
        return cls(tower, terms)


# -- (K[x])[y] helpers ------------------------------------------------

def _yx_deg(f):
    return len(f) - 1


def _yx_trim(f):
    f = list(f)
    while f and not f[-1]:
        f.pop()
    return tuple(f)


def _yx_content(tw, f):
    c = ()
    for row in f:
        c = pgcd(tw, c, row)
    return c


def _yx_scale_div(tw, f, c):
    """Divide every x-coefficient exactly by the x-polynomial ``c``."""
    return tuple(pdiv_exact(tw, row, c) for row in f)


def _yx_prem(tw, f, g):
    """Pseudo-remainder of f by g in (K[x])[y]."""
    f = list(f)
    dg = _yx_deg(g)
    lcg = g[-1]
    while _yx_deg(f) >= dg and _yx_trim(f):
        f = list(_yx_trim(f))
        if _yx_deg(f) < dg:
            break
        lcf = f[-1]
        k = _yx_deg(f) - dg
        f = [pmul(tw, row, lcg) for row in f]
        for i in range(dg + 1):
            f[k + i] = psub(tw, f[k + i], pmul(tw, lcf, g[i]))
        f = f[:-1]
    return _yx_trim(f)


def _yx_primitive(tw, f):
    c = _yx_content(tw, f)
    if not c:
        return f, ()
    return _yx_scale_div(tw, f, c), c


def monic_lex(p):
    """Normalize so the lex-leading (highest y, then x) coefficient is 1."""
    if p.is_zero():
        return p
    tw = p.tower
    key = max(p.terms, key=lambda k: (k[1], k[0]))
    c = inv(tw, p.terms[key])
    return BiPoly(tw, {k: mul(tw, v, c) for k, v in p.terms.items()})


_SYM_X, _SYM_Y = sympy.symbols("x y")


def _gcd_qq(p, q):
    """Bivariate gcd over the rationals, delegated to sympy's fast path."""
    ps = sympy.Poly.from_dict(
        {m: sympy.Rational(c) for m, c in p.terms.items()},
        _SYM_X, _SYM_Y, domain="QQ")
    qs = sympy.Poly.from_dict(
        {m: sympy.Rational(c) for m, c in q.terms.items()},
        _SYM_X, _SYM_Y, domain="QQ")
    gs = ps.gcd(qs)
    terms = {m: Fraction(c.p, c.q) for m, c in gs.terms()}
    return monic_lex(BiPoly(QQ, terms))


def poly_gcd(p, q):
    """GCD in K[x, y], normalized monic-lex; divides both inputs exactly."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials")
    if p.is_zero():
        return monic_lex(q)
    if q.is_zero():
        return monic_lex(p)
    tw = p.tower
    if tw != q.tower:
        raise ValueError("tower mismatch")
    if not tw.levels:
        return _gcd_qq(p, q)
    f, g = p.to_yx(), q.to_yx()
    if _yx_deg(f) == 0 and _yx_deg(g) == 0:
        return monic_lex(BiPoly.from_yx(tw, (pgcd(tw, f[0], g[0]),)))
    if _yx_deg(f) == 0 or _yx_deg(g) == 0:
        u = f[0] if _yx_deg(f) == 0 else g[0]
        other = g if _yx_deg(f) == 0 else f
        return monic_lex(BiPoly.from_yx(tw, (pgcd(tw, u, _yx_content(tw, other)),)))
    fpp, fc = _yx_primitive(tw, f)
    gpp, gc = _yx_primitive(tw, g)
    cont = pgcd(tw, fc, gc)
    a, b = fpp, gpp
    if _yx_deg(a) < _yx_deg(b):
        a, b = b, a
    while b:
        r = _yx_prem(tw, a, b)
        if r:
            r, _ = _yx_primitive(tw, r)
        a, b = b, r
    app, _ = _yx_primitive(tw, a)
    gcd_yx = tuple(pmul(tw, row, cont) for row in app)
    return monic_lex(BiPoly.from_yx(tw, gcd_yx))


def exact_div(p, q):
    """Exact quotient p / q in K[x, y]; raises ValueError if not divisible."""
    if q.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    if p.is_zero():
        return p
    tw = p.tower
    f, g = list(p.to_yx()), q.to_yx()
    if _yx_deg(g) == 0:
        return BiPoly.from_yx(tw, tuple(pdiv_exact(tw, row, g[0]) for row in f))
    quot = [()] * max(0, _yx_deg(f) - _yx_deg(g) + 1)
    while _yx_trim(f):
        f = list(_yx_trim(f))
        k = _yx_deg(f) - _yx_deg(g)
        if k < 0:
            raise ValueError("inexact bivariate division")
        qc = pdiv_exact(tw, f[-1], g[-1])
        quot[k] = qc
        for i in range(_yx_deg(g) + 1):
            f[k + i] = psub(tw, f[k + i], pmul(tw, qc, g[i]))
        f = f[:-1]
    return BiPoly.from_yx(tw, tuple(quot))


def divides(q, p):
    try:
        exact_div(p, q)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# Resultants
# ---------------------------------------------------------------------------

def uni_resultant(tw, f, g):
    """Resultant of two dense univariate polynomials over the tower."""
    f, g = ptrim(tw, f), ptrim(tw, g)
    if not f or not g:
        return zero(tw)
    sign = 1
    acc = one(tw)
    while pdeg(g) > 0:
        if pdeg(f) < pdeg(g):
            if (pdeg(f) * pdeg(g)) % 2:
                sign = -sign
            f, g = g, f
            continue
        r = pmod(tw, f, g)
        if (pdeg(f) * pdeg(g)) % 2:
            sign = -sign
        if not r:
            return zero(tw)
        e = pdeg(f) - pdeg(r)
        lcg = g[-1]
        for _ in range(e):
            acc = mul(tw, acc, lcg)
        f, g = g, r
    # g is a nonzero constant
    for _ in range(pdeg(f)):
        acc = mul(tw, acc, g[0])
    if sign < 0:
        acc = neg(tw, acc)
    return acc


def _eval_x(tw, yx, c):
    """Evaluate each x-coefficient at x = c, giving a dense poly in y."""
    x0 = from_rational(tw, c)
    return ptrim(tw, [peval(tw, row, x0) for row in yx])


def _resultant_y_qq(p, q):
    # gens ordered (y, x): sympy's resultant eliminates the first gen
    ps = sympy.Poly.from_dict(
        {(j, i): sympy.Rational(c) for (i, j), c in p.terms.items()},
        _SYM_Y, _SYM_X, domain="QQ")
    qs = sympy.Poly.from_dict(
        {(j, i): sympy.Rational(c) for (i, j), c in q.terms.items()},
        _SYM_Y, _SYM_X, domain="QQ")
    res = sympy.Poly(ps.resultant(qs), _SYM_X, domain="QQ")
    out = [Fraction(0)] * (res.degree() + 1 if not res.is_zero else 0)
    for (i,), c in res.terms():
        out[i] = Fraction(c.p, c.q)
    return ptrim(QQ, out)


def resultant_y(p, q):
    """Res_y(p, q) as a dense polynomial in x (evaluation/interpolation;
    over the plain rationals it is delegated to sympy)."""
    tw = p.tower
    if not tw.levels:
        return _resultant_y_qq(p, q)
    f, g = p.to_yx(), q.to_yx()
    dyp, dyq = _yx_deg(f), _yx_deg(g)
    if dyp < 0 or dyq < 0:
        return ()
    if dyp == 0 or dyq == 0:
        base = f[0] if dyp == 0 else g[0]
        power = dyq if dyp == 0 else dyp
        acc = (one(tw),)
        for _ in range(power):
            acc = pmul(tw, acc, base)
        return acc
    bound = p.deg_x() * dyq + q.deg_x() * dyp
    pts, vals = [], []
    for c in itertools.count():
        lcp = peval(tw, f[-1], from_rational(tw, c))
        lcq = peval(tw, g[-1], from_rational(tw, c))
        if is_zero(tw, lcp) or is_zero(tw, lcq):
            continue
        pts.append(Fraction(c))
        vals.append(uni_resultant(tw, _eval_x(tw, f, c), _eval_x(tw, g, c)))
        if len(pts) == bound + 1:
            break
    return _lagrange(tw, pts, vals)


def _lagrange(tw, pts, vals):
    n = len(pts)
    acc = ()
    for k in range(n):
        denom = Fraction(1)
        basis = (Fraction(1),)
        for j in range(n):
            if j == k:
                continue
            denom *= pts[k] - pts[j]
            basis = _qmul(basis, (-pts[j], Fraction(1)))
        scale = 1 / denom
        term = ptrim(tw, [mul(tw, vals[k], from_rational(tw, b * scale))
                          for b in basis])
        acc = padd(tw, acc, term)
    return acc


def _qmul(f, g):
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return tuple(out)


def order_in_x(tw, f):
    for i, c in enumerate(f):
        if not is_zero(tw, c):
            return i
    return None


# ---------------------------------------------------------------------------
# Direction splitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Direction:
    """One tangent direction: a root (in a possibly extended tower), the
    size of its conjugacy orbit, and its multiplicity in the input."""
    tower: Tower
    root: object
    orbit: int
    multiplicity: int


@dataclass(frozen=True)
class UniPoly:
    tower: Tower
    coeffs: tuple

    def degree(self):
        return pdeg(self.coeffs)

    def is_zero(self):
        return not self.coeffs


def _fresh_var(tw):
    return f"t{tw.depth + 1}"


def _split_over_qq(coeffs):
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed([sympy.Rational(c) for c in coeffs])),
                      t, domain="QQ")
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        cs = [Fraction(c.p, c.q) for c in reversed(fac.all_coeffs())]
        lead = cs[-1]
        cs = tuple(c / lead for c in cs)
        deg = len(cs) - 1
        if deg == 1:
            out.append((QQ, -cs[0], 1, mult))
        else:
            tw = QQ.extend(_fresh_var(QQ), cs)
            out.append((tw, generator(tw), deg, mult))
    return out


def _yun(tw, f):
    """Squarefree decomposition over a tower: [(factor, multiplicity)]."""
    f = pmonic(tw, f)
    df = pderiv(tw, f)
    a = pgcd(tw, f, df)
    b = pdiv_exact(tw, f, a)
    c = psub(tw, pdiv_exact(tw, df, a), pderiv(tw, b))
    out = []
    i = 1
    while pdeg(b) > 0:
        d = pgcd(tw, b, c)
        if pdeg(d) > 0:
            out.append((d, i))
        b = pdiv_exact(tw, b, d)
        c = psub(tw, pdiv_exact(tw, c, d), pderiv(tw, b))
        i += 1
    return out


def split_directions(p):
    """Split a univariate polynomial into roots with orbit sizes.

    Over QQ the factorization is certified; over a non-trivial tower
    squarefree factors of degree >= 2 are adjoined optimistically and any
    later zero divisor raises ModulusSplit for the caller to branch on.
    """
    if p.is_zero():
        raise ValueError("cannot split the zero polynomial")
    tw = p.tower
    if not tw.levels:
        return [Direction(t, r, o, m)
                for t, r, o, m in _split_over_qq(p.coeffs)]
    out = []
    for fac, mult in _yun(tw, p.coeffs):
        if pdeg(fac) == 1:
            out.append(Direction(tw, neg(tw, fac[0]), 1, mult))
        else:
            ext = tw.extend(_fresh_var(tw), fac)
            out.append(Direction(ext, generator(ext), pdeg(fac), mult))
    return out


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def _frac_to_json(q):
    return f"{q.numerator}/{q.denominator}"


def _frac_from_json(s):
    return Fraction(s)


def elem_to_json(tw, a):
    if not tw.levels:
        return _frac_to_json(a)
    s = tw.sub()
    return {"ext": tw.top_var, "coeffs": [elem_to_json(s, c) for c in a]}


def elem_from_json(tw, data):
    if isinstance(data, str):
        return from_rational(tw, _frac_from_json(data))
    if not tw.levels or data.get("ext") != tw.top_var:
        raise ValueError("element does not match tower")
    s = tw.sub()
    return ptrim(s, [elem_from_json(s, c) for c in data["coeffs"]])


def tower_to_json(tw):
    out = []
    running = QQ
    for var, modulus in tw.levels:
        out.append({"var": var,
                    "modulus": [elem_to_json(running, c) for c in modulus]})
        running = running.extend(var, modulus)
    return {"levels": out}


def tower_from_json(data):
    tw = QQ
    for level in data.get("levels", []):
        modulus = tuple(elem_from_json(tw, c) for c in level["modulus"])
        tw = tw.extend(level["var"], modulus)
    return tw


def poly_to_json(p):
    terms = [[i, j, elem_to_json(p.tower, c)]
             for (i, j), c in sorted(p.terms.items())]
    return {"vars": ["x", "y"], "terms": terms}


def poly_from_json(tower, data):
    terms = {}
    for i, j, c in data["terms"]:
        terms[(i, j)] = elem_from_json(tower, c)
    return BiPoly(tower, terms)
