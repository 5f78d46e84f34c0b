"""Exact WKB recursion for V(x) = 1/cos^2(x) in canonical units (2m = alpha = U0 = 1).

The derivatives of the phase obey

    sigma_0'^2 = E - cos^-2(x),
    sum_{k=0}^{n} sigma_k' sigma_{n-k}' + sigma_{n-1}'' = 0,

and each sigma_n' is stored in the structured form

    sigma_n' = (sigma_0')^(1-3n) * sin^f(x) * sum_l C_{n,l} cos^(2l-3n)(x),

with f = n mod 2.  Every product and x-derivative is carried out on this
triple (sigma_0' power, sine parity, Laurent table in cos).  Whenever
sigma_0'^2 appears it is replaced by E - cos^-2, so the table entries are
polynomials in the formal energy E with rational coefficients.  Only the
leading entry C_{n,0} is free of E.

Write c = cos(x), s = sin(x).  Internally a Laurent table is a dict
``{(a, b): Fraction}`` standing for ``sum coef * E^a * c^b``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .coeffs import c_k0_sequence

__all__ = [
    "AnsatzViolation",
    "ContourValue",
    "OddTermReport",
    "ReductionFailure",
    "SigmaPoly",
    "contour_integral_even",
    "contour_z_moment",
    "integrand_exponents",
    "leading_coefficients_agree",
    "maslov_coefficient",
    "recurse_sigma",
    "residual",
    "sigma0_squared",
    "verify_odd_vanishing",
]

Poly = dict  # {(E power, c power): Fraction}


class AnsatzViolation(ArithmeticError):
    """A computed sigma_n' does not fit the structured form."""

    def __init__(self, n: int, monomial: object, reason: str):
        self.n = n
        self.monomial = monomial
        super().__init__(f"sigma'_{n}: {reason} (offending term {monomial!r})")


class ReductionFailure(ArithmeticError):
    """The contour reduction produced something other than a pure l = 0 constant."""


# --- Laurent-table arithmetic --------------------------------------------------------


def _clean(p: Poly) -> Poly:
    return {m: c for m, c in p.items() if c}


def _add(p: Poly, q: Poly, scale: Fraction = Fraction(1)) -> Poly:
    out = defaultdict(Fraction, p)
    for m, c in q.items():
        out[m] += scale * c
    return _clean(out)


def _mul(p: Poly, q: Poly) -> Poly:
    out: defaultdict = defaultdict(Fraction)
    for (a1, b1), c1 in p.items():
        for (a2, b2), c2 in q.items():
            out[a1 + a2, b1 + b2] += c1 * c2
    return _clean(out)


def _scale(p: Poly, k: Fraction) -> Poly:
    return {m: k * c for m, c in p.items()} if k else {}


def _shift_c(p: Poly, k: int) -> Poly:
    return {(a, b + k): c for (a, b), c in p.items()}


def _d_dc(p: Poly) -> Poly:
    return _clean({(a, b - 1): b * c for (a, b), c in p.items()})


_SIN_SQ = {(0, 0): Fraction(1), (0, 2): Fraction(-1)}  # 1 - c^2
_SIGMA0_SQ = {(1, 0): Fraction(1), (0, -2): Fraction(-1)}  # E - c^-2


@dataclass(frozen=True)
class _Expr:
    """(sigma_0')^power * s^parity * poly(E, c)."""

    power: int
    parity: int
    poly: Poly

    def lower_to(self, power: int) -> _Expr:
        """Rewrite with a smaller sigma_0' power by absorbing factors of sigma_0'^2."""
        diff = self.power - power
        if diff < 0 or diff % 2:
            raise ValueError(f"cannot rewrite sigma_0'^{self.power} at power {power}")
        poly = self.poly
        for _ in range(diff // 2):
            poly = _mul(poly, _SIGMA0_SQ)
        return _Expr(power, self.parity, poly)

    def __add__(self, other: _Expr) -> _Expr:
        if self.parity != other.parity:
            raise ValueError("cannot add terms of different sine parity")
        low = min(self.power, other.power)
        a, b = self.lower_to(low), other.lower_to(low)
        return _Expr(low, self.parity, _add(a.poly, b.poly))

    def __mul__(self, other: _Expr) -> _Expr:
        poly = _mul(self.poly, other.poly)
        parity = self.parity + other.parity
        if parity == 2:
            poly, parity = _mul(poly, _SIN_SQ), 0
        return _Expr(self.power + other.power, parity, poly)

    def scaled(self, k: Fraction) -> _Expr:
        return _Expr(self.power, self.parity, _scale(self.poly, k))

    def d_dx(self) -> _Expr:
        # sigma_0'' = -s c^-3 / sigma_0', hence
        # d/dx[S^p s^f Q] = -p S^(p-2) s^(f+1) c^-3 Q + S^p d/dx(s^f Q)
        p, f, q = self.power, self.parity, self.poly
        chain = _Expr(p - 2, 1, _scale(_shift_c(q, -3), Fraction(-p)))
        if f == 1:
            chain = _Expr(p - 2, 0, _mul(chain.poly, _SIN_SQ))
        dq = _d_dc(q)
        if f == 0:
            # d/dx Q(c) = -s Q'(c)
            rest = _Expr(p, 1, _scale(dq, Fraction(-1)))
        else:
            # d/dx [s Q(c)] = c Q - s^2 Q'
            rest = _Expr(p, 0, _add(_shift_c(q, 1), _mul(_SIN_SQ, dq), Fraction(-1)))
        return chain + rest

    def is_zero(self) -> bool:
        return not self.poly


_SIGMA0 = _Expr(1, 0, {(0, 0): Fraction(1)})


def sigma0_squared(mass2: Fraction = Fraction(1), depth: Fraction = Fraction(1)) -> Poly:
    """sigma_0'^2 = 2m E - 2m U0 cos^-2 as a Laurent table ``{(E power, c power): coef}``.

    ``mass2`` is 2m; the defaults are the canonical units used everywhere else.
    """
    return {(1, 0): Fraction(mass2), (0, -2): -Fraction(mass2) * Fraction(depth)}


def evaluate_poly(poly: Poly, E: float, c: float) -> float:
    return math.fsum(float(coef) * E**a * c**b for (a, b), coef in poly.items())


# --- public structured form ----------------------------------------------------------


def _g(n: int) -> int:
    return (3 * n - 2) // 2 if n % 2 == 0 else (3 * n - 3) // 2


@dataclass(frozen=True)
class SigmaPoly:
    """sigma_n' = (sigma_0')^(1-3n) sin^f(x) sum_l C_{n,l}(E) cos^(2l-3n)(x).

    ``coeffs[l]`` is the tuple of rational coefficients of C_{n,l} as a
    polynomial in E, lowest power first.
    """

    order: int
    sigma0_power: int
    sine_parity: int
    coeffs: dict[int, tuple[Fraction, ...]] = field(default_factory=dict)

    @property
    def degree_bound(self) -> int:
        return _g(self.order) if self.order > 0 else 0

    def coefficient(self, l: int, E: Fraction | float | None = None):
        """C_{n,l} as a tuple in E, or evaluated at ``E`` if given."""
        poly = self.coeffs.get(l, ())
        if E is None:
            return poly
        return sum((c * E**a for a, c in enumerate(poly)), Fraction(0) * E)

    def to_poly(self) -> Poly:
        n = self.order
        return {
            (a, 2 * l - 3 * n): c
            for l, cs in self.coeffs.items()
            for a, c in enumerate(cs)
            if c
        }

    def _expr(self) -> _Expr:
        return _Expr(self.sigma0_power, self.sine_parity, self.to_poly())

    def evaluate(self, E: float, x: float) -> float:
        """Numerical value of sigma_n'(x) on the real branch sigma_0' > 0."""
        c, s = math.cos(x), math.sin(x)
        s0 = math.sqrt(E - 1.0 / (c * c))
        return s0**self.sigma0_power * s**self.sine_parity * evaluate_poly(self.to_poly(), E, c)

    @classmethod
    def _from_expr(cls, n: int, expr: _Expr) -> SigmaPoly:
        if expr.power != 1 - 3 * n:
            expr = expr.lower_to(1 - 3 * n) if expr.power > 1 - 3 * n else expr
        if expr.power != 1 - 3 * n:
            raise AnsatzViolation(n, f"sigma0'^{expr.power}", "wrong power of sigma_0'")
        if expr.parity != n % 2:
            raise AnsatzViolation(n, f"sin^{expr.parity}", "wrong sine parity")
        g = _g(n) if n > 0 else 0
        table: dict[int, dict[int, Fraction]] = defaultdict(dict)
        for (a, b), c in expr.poly.items():
            twice_l = b + 3 * n
            if twice_l % 2 or not 0 <= twice_l // 2 <= g:
                raise AnsatzViolation(n, f"E^{a} cos^{b}", f"cos power outside 2l-3n, 0<=l<={g}")
            table[twice_l // 2][a] = c
        coeffs = {
            l: tuple(row.get(a, Fraction(0)) for a in range(max(row) + 1))
            for l, row in sorted(table.items())
        }
        return cls(order=n, sigma0_power=1 - 3 * n, sine_parity=n % 2, coeffs=coeffs)


@lru_cache(maxsize=8)
def _recurse(n_max: int) -> tuple[SigmaPoly, ...]:
    exprs = [_SIGMA0]
    polys = [SigmaPoly(0, 1, 0, {0: (Fraction(1),)})]
    for n in range(1, n_max + 1):
        acc = exprs[n - 1].d_dx()
        for k in range(1, n):
            acc = acc + exprs[k] * exprs[n - k]
        # 2 sigma_0' sigma_n' = -(sigma_{n-1}'' + sum_{k=1}^{n-1} sigma_k' sigma_{n-k}')
        sn = _Expr(acc.power - 1, acc.parity, _scale(acc.poly, Fraction(-1, 2)))
        sp = SigmaPoly._from_expr(n, sn)
        exprs.append(sp._expr())
        polys.append(sp)
    return tuple(polys)


def recurse_sigma(n_max: int = 12) -> list[SigmaPoly]:
    """sigma_0', sigma_1', ..., sigma_{n_max}' (index n holds sigma_n').

    Raises :class:`AnsatzViolation` if any order leaves the structured form.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return list(_recurse(n_max))


def residual(sigmas: list[SigmaPoly], n: int) -> Poly:
    """sum_{k=0}^{n} sigma_k' sigma_{n-k}' + sigma_{n-1}'' at sigma_0' power 2-3n; zero if exact."""
    exprs = [s._expr() for s in sigmas[: n + 1]]
    acc = exprs[n - 1].d_dx()
    for k in range(n + 1):
        acc = acc + exprs[k] * exprs[n - k]
    return acc.lower_to(2 - 3 * n).poly


# --- contour integrals ---------------------------------------------------------------


def _double_factorial_odd(j: int) -> int:
    """(2j-1)!!, with (-1)!! = 1."""
    out = 1
    for i in range(1, 2 * j, 2):
        out *= i
    return out


def _falling(x: Fraction, q: int) -> Fraction:
    out = Fraction(1)
    for i in range(q):
        out *= x - i
    return out


@lru_cache(maxsize=None)
def contour_z_moment(p: int, q: int) -> tuple[Fraction, ...]:
    """(1/2pi) oint dz (1 + z^2)^p (beta - z^2)^(1/2 - q) as a polynomial in beta.

    The loop encircles the cut [-sqrt(beta), sqrt(beta)] with the orientation
    in which oint (beta - z^2)^(1/2) dz = 2 int sqrt(beta - z^2) dz > 0.  For
    q >= 1 the value is d^q/dbeta^q of the q = 0 loop integral divided by
    (1/2)(1/2 - 1)...(1/2 - q + 1).  Returned coefficients are lowest power first.
    """
    if p < 0 or q < 0:
        raise ValueError("p and q must be >= 0")
    coeffs: defaultdict = defaultdict(Fraction)
    norm = _falling(Fraction(1, 2), q)
    for j in range(p + 1):
        # (1/2pi) * 2 int z^2j sqrt(beta - z^2) dz = beta^(j+1) (2j-1)!! / (2^(j+1) (j+1)!)
        base = Fraction(_double_factorial_odd(j), 2 ** (j + 1) * factorial(j + 1))
        deg = j + 1
        if q > deg:
            continue
        deriv = _falling(Fraction(deg), q)
        coeffs[deg - q] += comb(p, j) * base * deriv / norm
    if not coeffs:
        return (Fraction(0),)
    top = max(coeffs)
    return tuple(coeffs.get(i, Fraction(0)) for i in range(top + 1))


def _poly_mul_1d(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def integrand_exponents(sp: SigmaPoly) -> list[tuple[int, int, Fraction]]:
    """Exponents after z = tan(x) for each table row of an even order n = 2k.

    Returns ``(l, p, r)`` such that the row contributes
    ``C_{2k,l} (1 + z^2)^p / (beta - z^2)^r dz``.
    """
    n = sp.order
    if n % 2 or n < 2:
        raise ValueError("only even orders n >= 2")
    out = []
    for l in sorted(sp.coeffs):
        # cos^(2l-3n) dx = (1+z^2)^((3n-2l)/2 - 1) dz;  sigma_0'^(1-3n) = (beta - z^2)^((1-3n)/2)
        out.append((l, (3 * n - 2 * l) // 2 - 1, Fraction(3 * n - 1, 2)))
    return out


@dataclass(frozen=True)
class ContourValue:
    """value * 2 pi hbar * B^(1 - order) equals (hbar/i)^order oint sigma_order' dx."""

    order: int
    value: Fraction


def contour_integral_even(sp: SigmaPoly) -> ContourValue:
    """Exact (hbar/i)^(2k) oint sigma_{2k}' dx, as a rational multiple of 2 pi hbar B^(1-2k).

    Every table row is integrated, not only l = 0; a nonzero l > 0 contribution
    or a leftover dependence on E raises :class:`ReductionFailure`.
    """
    n = sp.order
    if n % 2 or n < 2:
        raise ValueError("contour_integral_even needs an even order n >= 2")
    k = n // 2
    total: list[Fraction] = [Fraction(0)]  # polynomial in beta
    e_as_beta = [Fraction(1), Fraction(1)]  # E = beta + 1 in canonical units
    for l, p, r in integrand_exponents(sp):
        moment = list(contour_z_moment(p, int(r + Fraction(1, 2))))
        row = [Fraction(0)]
        e_pow = [Fraction(1)]
        for coef in sp.coeffs[l]:
            row = _poly_add(row, [coef * x for x in e_pow])
            e_pow = _poly_mul_1d(e_pow, e_as_beta)
        contribution = _poly_mul_1d(row, moment)
        if l > 0 and any(contribution):
            raise ReductionFailure(f"order {n}: row l={l} contributes {contribution}")
        total = _poly_add(total, contribution)
    if any(total[1:]):
        raise ReductionFailure(f"order {n}: contour value depends on E: {total}")
    # (hbar/i)^(2k) = (-1)^k hbar^2k;  hbar^2k / (hbar B^(1-2k)) = 2^(2k-1) since hbar B = 2
    return ContourValue(order=n, value=(-1) ** k * 2 ** (2 * k - 1) * total[0])


def _poly_add(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _odd_residue(sp: SigmaPoly) -> tuple[Fraction, ...]:
    """Residue at one turning point of sigma_n' dx for odd n, as a polynomial in E.

    With u = cos^-2(x), sin(x) dx = -dc and c^(2l-3n) dc = -(1/2) u^((3n-2l-3)/2) du,
    sigma_n' dx = (1/2) (E - u)^m sum_l C_{n,l} u^(d-l) du,  m = (1-3n)/2,  d = (3n-3)/2.
    The only pole inside the loop is u = E (order -m); u = 0 is regular since l <= d.
    """
    n = sp.order
    m = (1 - 3 * n) // 2
    d = (3 * n - 3) // 2
    order = -m - 1  # residue of (E-u)^m f(u) at u=E is (-1)^m f^(order)(E) / order!
    res: list[Fraction] = [Fraction(0)]
    for l, cs in sp.coeffs.items():
        e = d - l
        if e < order:
            continue
        # d^order/du^order u^e at u = E  ->  falling(e, order) E^(e - order)
        k = Fraction(math.perm(e, order), factorial(order))
        shifted = [Fraction(0)] * (e - order) + [c * k for c in cs]
        res = _poly_add(res, shifted)
    sign = (-1) ** (-m)  # (E - u)^m = (-1)^m (u - E)^m
    return tuple(Fraction(1, 2) * sign * c for c in res)


def maslov_coefficient(sigma1: SigmaPoly) -> Fraction:
    """(hbar/i) oint sigma_1' dx as a rational multiple of 2 pi hbar (expected -1/2).

    Counter-clockwise loop: oint = 2 pi i * (sum of the two equal turning-point residues).
    """
    if sigma1.order != 1:
        raise ValueError("expects sigma_1'")
    r = _odd_residue(sigma1)
    if any(r[1:]):
        raise ReductionFailure(f"Maslov residue depends on E: {r}")
    # (hbar/i) * 2 pi i * 2 r = 2 pi hbar * 2 r
    return 2 * r[0]


@dataclass(frozen=True)
class OddTermReport:
    residues: dict[int, tuple[Fraction, ...]]

    @property
    def failures(self) -> list[int]:
        return [n for n, r in self.residues.items() if any(r)]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_odd_vanishing(n_max: int = 11) -> OddTermReport:
    """Turning-point residues of sigma_n' dx for odd 3 <= n <= n_max.

    A zero residue (identically in E) means the closed-loop integral vanishes.
    """
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    sigmas = recurse_sigma(n_max)
    return OddTermReport(
        residues={n: _odd_residue(sigmas[n]) for n in range(3, n_max + 1, 2)}
    )


def leading_coefficients_agree(n_max: int = 12) -> bool:
    """C_{n,0} from the full recursion equals the scalar recursion (prefactor 1) for n <= n_max."""
    sigmas = recurse_sigma(n_max)
    scalar = c_k0_sequence(n_max)
    for n in range(n_max + 1):
        lead = sigmas[n].coefficient(0)
        if len(lead) > 1 or (lead[0] if lead else 0) != scalar[n]:
            return False
    return True
