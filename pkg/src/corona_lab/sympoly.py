"""Exact polynomial identities over indexed commuting symbols.

A ``SymPoly`` maps monomials (sorted tuples of symbols) to Python integers, so
expansion is exact and overflow-free.  The hat involution is modelled by
distinct symbol classes (``F`` vs ``Fhat``); it is not an operator on values.

The verifiers check the unconditional identities behind the general-``n``
disk argument: the syzygy identities for ``F_s, G_s``, the third Bezout
equation, the cancellation of the correction terms (ansatz and the four cross terms),
and the T-sum cancellations.  Identities that need the Bezout equations as
hypotheses are checked numerically in ``corona_disk``.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .corona_disk import canonical, combine

# symbol class -> its hat partner (None: class has no hat in these identities)
SYMBOL_CLASSES: dict[str, str | None] = {
    "F": "Fhat", "G": "Ghat", "H": "Hhat", "K": "Khat",
    "h": "hhat", "k": "khat",
    "dh": None, "dkhat": None,
    "lam": "lamhat", "alpha": "alphahat", "mu": "muhat",
    "beta": "betahat", "gamma": "gammahat", "eta": "etahat", "etat": "etathat",
}
SYMBOL_CLASSES.update({v: k for k, v in list(SYMBOL_CLASSES.items()) if v is not None})


@dataclass(frozen=True, order=True)
class Sym:
    name: str
    idx: tuple

    def __post_init__(self):
        if self.name not in SYMBOL_CLASSES:
            raise ValueError(f"unknown symbol class {self.name!r}")

    def __str__(self):
        return f"{self.name}[{','.join(str(i + 1) for i in self.idx)}]"


Monomial = tuple  # sorted tuple of Sym, repeats allowed


class SymPoly:
    """Sparse polynomial with integer coefficients; zero coefficients never stored."""

    __slots__ = ("terms", "raw")

    def __init__(self, terms: dict | None = None, raw: int | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}
        # monomials generated before merging (expansion size)
        self.raw = len(self.terms) if raw is None else raw

    @classmethod
    def const(cls, c: int) -> "SymPoly":
        return cls({(): int(c)})

    @classmethod
    def sym(cls, name: str, *idx: int) -> "SymPoly":
        return cls({(Sym(name, tuple(idx)),): 1})

    @staticmethod
    def _lift(x) -> "SymPoly":
        if isinstance(x, SymPoly):
            return x
        if isinstance(x, int):
            return SymPoly.const(x)
        if isinstance(x, Sym):
            return SymPoly({(x,): 1})
        raise TypeError(f"cannot convert {type(x).__name__} to SymPoly")

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return SymPoly(out, self.raw + other.raw)

    __radd__ = __add__

    def __neg__(self):
        return SymPoly({m: -c for m, c in self.terms.items()}, self.raw)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
        return SymPoly(out, len(self.terms) * len(other.terms))

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self.terms == self._lift(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def hat(self) -> "SymPoly":
        """Swap every symbol with its hat partner (integer coefficients are real)."""
        out: dict = {}
        for m, c in self.terms.items():
            hm = []
            for s in m:
                partner = SYMBOL_CLASSES[s.name]
                if partner is None:
                    raise ValueError(f"symbol class {s.name!r} has no hat partner")
                hm.append(Sym(partner, s.idx))
            key = tuple(sorted(hm))
            out[key] = out.get(key, 0) + c
        return SymPoly(out)

    def __repr__(self):
        if not self.terms:
            return "SymPoly(0)"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            body = "*".join(str(s) for s in m) or "1"
            parts.append(f"{c:+d}*{body}" if m else f"{c:+d}")
        return "SymPoly(" + " ".join(parts) + ")"


# --- expression trees ---------------------------------------------------------------

Expr = Union[int, Sym, SymPoly, tuple]


def sp_expand_normalize(e: Expr) -> SymPoly:
    """Expand a tree built from ints, ``Sym`` leaves and ``("add"|"mul", *args)``,
    ``("sub", a, b)``, ``("neg", a)`` nodes into canonical form."""
    if isinstance(e, (int, Sym, SymPoly)):
        return SymPoly._lift(e)
    if not (isinstance(e, tuple) and e and isinstance(e[0], str)):
        raise TypeError(f"malformed expression node: {e!r}")
    op, args = e[0], e[1:]
    if op == "add":
        out = SymPoly()
        for a in args:
            out = out + sp_expand_normalize(a)
        return out
    if op == "mul":
        out = SymPoly.const(1)
        for a in args:
            out = out * sp_expand_normalize(a)
        return out
    if op == "sub" and len(args) == 2:
        return sp_expand_normalize(args[0]) - sp_expand_normalize(args[1])
    if op == "neg" and len(args) == 1:
        return -sp_expand_normalize(args[0])
    raise ValueError(f"unknown expression node {op!r}")


def psum(items: Iterable) -> SymPoly:
    """Sum with in-place accumulation (much cheaper than repeated ``+``)."""
    acc: dict = {}
    raw = 0
    for p in items:
        p = SymPoly._lift(p)
        raw += p.raw
        for m, c in p.terms.items():
            acc[m] = acc.get(m, 0) + c
    return SymPoly(acc, raw)


# --- results ------------------------------------------------------------------------

@dataclass
class IdentityCheck:
    """Outcome of one identity: ``residual`` is the normalized difference."""

    name: str
    n: int
    residual: SymPoly
    terms: int  # monomials generated expanding both sides, before cancellation
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"name": self.name, "n": self.n, "ok": self.ok, "terms": self.terms,
                "residual_terms": len(self.residual)}


@dataclass
class SuiteResult:
    name: str
    n: int
    checks: list[IdentityCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __bool__(self):
        return self.ok

    @property
    def terms(self) -> int:
        return sum(c.terms for c in self.checks)


def _check(name: str, n: int, lhs: SymPoly, rhs: SymPoly, t0: float) -> IdentityCheck:
    return IdentityCheck(name, n, lhs - rhs, lhs.raw + rhs.raw, time.perf_counter() - t0)


class _Symbols:
    """Indexed symbol lists ``F[r], Fhat[r], ...`` for one ``n``."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need n >= 1")
        self.n = n
        self.R = range(n)

    def __getattr__(self, name):
        if name in SYMBOL_CLASSES:
            return [SymPoly.sym(name, r) for r in self.R]
        raise AttributeError(name)


# --- syzygy and third Bezout --------------------------------------------------------

def _syzygy_sides(S: _Symbols):
    F, G, Fh, Gh, Hh, K = S.F, S.G, S.Fhat, S.Ghat, S.Hhat, S.K
    R = S.R
    e1 = psum(Fh[j] * Hh[j] for j in R) - psum(Gh[j] * K[j] for j in R)  # = 1 under Bezout
    e2 = psum(G[j] * Hh[j] for j in R) + psum(F[j] * K[j] for j in R)  # = 0 under Bezout
    rhs_F = [psum((Fh[r] * F[s] + Gh[s] * G[r]) * Hh[r] + (Gh[s] * F[r] - Gh[r] * F[s]) * K[r] for r in R) for s in R]
    rhs_G = [psum((Fh[r] * G[s] - Fh[s] * G[r]) * Hh[r] - (Fh[s] * F[r] + Gh[r] * G[s]) * K[r] for r in R) for s in R]
    return e1, e2, rhs_F, rhs_G


def verify_syzygy_identity(n: int) -> SuiteResult:
    """``sum_r (Fh_r F_s + Gh_s G_r) Hh_r + ... = F_s e1 + Gh_s e2`` and the ``G_s`` companion."""
    S = _Symbols(n)
    t0 = time.perf_counter()
    e1, e2, rhs_F, rhs_G = _syzygy_sides(S)
    checks = []
    for s in S.R:
        checks.append(_check(f"F_{s + 1}", n, rhs_F[s], S.F[s] * e1 + S.Ghat[s] * e2, t0))
        checks.append(_check(f"G_{s + 1}", n, rhs_G[s], S.G[s] * e1 - S.Fhat[s] * e2, t0))
    return SuiteResult("syzygy", n, checks)


def verify_third_bezout_identity(n: int) -> SuiteResult:
    """Substituting the syzygy right-hand sides into the first Bezout equation
    gives the grouped quadratic form of the third Bezout equation."""
    S = _Symbols(n)
    t0 = time.perf_counter()
    _, _, rhs_F, rhs_G = _syzygy_sides(S)
    F, G, Fh, Gh, H, Hh, K, Kh = S.F, S.G, S.Fhat, S.Ghat, S.H, S.Hhat, S.K, S.Khat
    R = S.R
    pairs = list(itertools.combinations(R, 2))
    lhs = psum(rhs_F[s] * H[s] - rhs_G[s] * Kh[s] for s in R)
    rhs = (
        psum((Fh[r] * F[s] + Gh[s] * G[r]) * (Hh[r] * H[s] + Kh[r] * K[s]) for s in R for r in R)
        + psum((Gh[s] * F[r] - Gh[r] * F[s]) * (K[r] * H[s] - K[s] * H[r]) for s, r in pairs)
        + psum((Fh[r] * G[s] - Fh[s] * G[r]) * (Hh[s] * Kh[r] - Hh[r] * Kh[s]) for s, r in pairs)
    )
    return SuiteResult("third_bezout", n, [_check("bezout3", n, lhs, rhs, t0)])


# --- homogeneous cancellations ------------------------------------------------------

FAMILY_KIND = {"beta": "beta", "gamma": "gamma", "eta": "eta", "etat": "etat"}


def alt_symbol(kind: str, name: str, idx: tuple) -> SymPoly:
    """Generic alternating symbol: free on canonical orbits, signed elsewhere."""
    c = canonical(kind, tuple(idx))
    if c is None:
        return SymPoly()
    sign, key = c
    return sign * SymPoly.sym(name, *key)


def _family_field(only: str | None) -> Callable:
    def field_at(kind, idx, hatted):
        if only is not None and kind != only:
            return SymPoly()
        return alt_symbol(FAMILY_KIND[kind], kind + "hat" if hatted else kind, idx)

    return field_at


def _ansatz_check(S: _Symbols, t0: float) -> IdentityCheck:
    """``h_j``/``k_j`` corrections built from alternating ``lam, alpha`` and free ``mu``
    add nothing to the first Bezout equation."""
    F, G, Fh, Gh = S.F, S.G, S.Fhat, S.Ghat
    R = S.R
    lam = lambda r, j: alt_symbol("pair", "lam", (r, j))  # noqa: E731
    alphahat = lambda r, j: alt_symbol("pair", "alphahat", (r, j))  # noqa: E731
    muhat = lambda r, j: SymPoly.sym("muhat", r, j)  # noqa: E731
    mu = lambda r, j: SymPoly.sym("mu", r, j)  # noqa: E731
    dh = [psum(lam(r, j) * F[r] for r in R if r != j) + psum(mu(r, j) * G[r] for r in R) for j in R]
    dk = [psum(alphahat(r, j) * Gh[r] for r in R if r != j) + psum(muhat(j, r) * Fh[r] for r in R) for j in R]
    lhs = psum(F[j] * dh[j] for j in R) - psum(G[j] * dk[j].hat() for j in R)
    return _check("ansatz_bezout1", S.n, lhs, SymPoly(), t0)


def verify_homogeneous_cancellations(n: int) -> SuiteResult:
    """(a) ansatz invariance; (b) for each family separately, the ``H``/``K``
    corrections contribute nothing to either Bezout equation."""
    S = _Symbols(n)
    F, G, Fh, Gh = S.F, S.G, S.Fhat, S.Ghat
    checks = [_ansatz_check(S, time.perf_counter())]
    zero = [SymPoly() for _ in S.R]
    for fam in FAMILY_KIND:
        t0 = time.perf_counter()
        dH, dK = combine(F, G, Fh, Gh, zero, zero, _family_field(fam))
        b1 = psum(F[j] * dH[j] for j in S.R) - psum(G[j] * dK[j].hat() for j in S.R)
        checks.append(_check(f"{fam}_bezout1", n, b1, SymPoly(), t0))
        t0 = time.perf_counter()
        b2 = psum(F[j] * dK[j] for j in S.R) + psum(G[j] * dH[j].hat() for j in S.R)
        checks.append(_check(f"{fam}_bezout2", n, b2, SymPoly(), t0))
    return SuiteResult("homogeneous", n, checks)


# --- T-sums -------------------------------------------------------------------------

def verify_Tsum_cancellations(n: int) -> SuiteResult:
    """``T11 + T31 + T32 = 0`` and ``T12 + T21 + T22 = 0`` for every ``j``, with
    ``dh[r]`` and ``dkhat[r]`` as independent symbols."""
    S = _Symbols(n)
    F, G, Fh, Gh = S.F, S.G, S.Fhat, S.Ghat
    h, k, hh, kh, dh, dkh = S.h, S.k, S.hhat, S.khat, S.dh, S.dkhat
    R = S.R
    pairs = list(itertools.combinations(R, 2))
    checks = []
    for j in R:
        t0 = time.perf_counter()
        a = psum((Fh[s] * G[r] - Fh[r] * G[s]) * (hh[r] * h[j] + kh[r] * k[j]) * dkh[s] for r in R for s in R)
        a = a - psum((Fh[s] * G[r] - Fh[r] * G[s]) * (hh[r] * h[j] + kh[r] * k[j]) * dkh[s] for r, s in pairs)
        a = a + psum((Fh[s] * G[r] - Fh[r] * G[s]) * (hh[s] * h[j] + kh[s] * k[j]) * dkh[r] for r, s in pairs)
        checks.append(_check(f"T11+T31+T32 (j={j + 1})", n, a, SymPoly(), t0))
        t0 = time.perf_counter()
        b = psum((Gh[s] * F[r] - Gh[r] * F[s]) * (h[s] * k[j] - h[j] * k[s]) * dh[r] for r in R for s in R)
        b = b + psum((Gh[r] * F[s] - Gh[s] * F[r]) * (h[j] * k[r] - h[r] * k[j]) * dh[s] for r, s in pairs)
        b = b + psum((Gh[r] * F[s] - Gh[s] * F[r]) * (h[s] * k[j] - h[j] * k[s]) * dh[r] for r, s in pairs)
        checks.append(_check(f"T12+T21+T22 (j={j + 1})", n, b, SymPoly(), t0))
    return SuiteResult("tsum", n, checks)


VERIFIERS: dict[str, Callable[[int], SuiteResult]] = {
    "syzygy": verify_syzygy_identity,
    "third_bezout": verify_third_bezout_identity,
    "homogeneous": verify_homogeneous_cancellations,
    "tsum": verify_Tsum_cancellations,
}


def run_all(n: int) -> list[SuiteResult]:
    return [fn(n) for fn in VERIFIERS.values()]
