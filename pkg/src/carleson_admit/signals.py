"""Scalar input signals on ``(0, inf)`` with exact Laplace transforms.

A signal is a finite sum of modulated indicators ``coef * chi_(a,b](t) * exp(i*c*t)``
plus optional exponential terms ``coef * exp(-rate*t)`` on ``(0, inf)``.  Grid
signals (piecewise constant on a partition) are the special case ``c = 0``
with one piece per cell.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, UnboundedNormError

__all__ = [
    "Piece",
    "ExpTerm",
    "InputSignal",
    "modulated_indicator",
    "weighted_sum",
    "grid_signal",
    "kernel_signal",
    "zero_signal",
]


@dataclass(frozen=True)
class Piece:
    """``coef * chi_(a,b](t) * exp(i*freq*t)``."""

    a: float
    b: float
    freq: float = 0.0
    coef: complex = 1.0

    def __post_init__(self):
        if not (0 <= self.a < self.b < math.inf):
            raise DomainError(f"need 0 <= a < b < inf, got a={self.a}, b={self.b}", "a")


@dataclass(frozen=True)
class ExpTerm:
    """``coef * exp(-rate*t)`` on ``(0, inf)``; ``Re rate > 0``."""

    coef: complex
    rate: complex

    def __post_init__(self):
        if not complex(self.rate).real > 0:
            raise DomainError("exponential term needs Re(rate) > 0", "rate")


class InputSignal:
    __slots__ = ("pieces", "exps", "kind")

    def __init__(self, pieces=(), exps=(), kind="weighted_sum"):
        self.pieces = tuple(p for p in pieces if p.coef != 0)
        self.exps = tuple(e for e in exps if e.coef != 0)
        self.kind = kind

    def __repr__(self):
        return f"InputSignal(kind={self.kind!r}, pieces={len(self.pieces)}, exps={len(self.exps)})"

    def __eq__(self, other):
        if not isinstance(other, InputSignal):
            return NotImplemented
        return self.pieces == other.pieces and self.exps == other.exps

    __hash__ = None

    @property
    def is_zero(self):
        return not self.pieces and not self.exps

    @property
    def support_end(self):
        if self.exps:
            return math.inf
        return max((p.b for p in self.pieces), default=0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for p in self.pieces:
            inside = (t > p.a) & (t <= p.b)
            out = out + np.where(inside, p.coef * np.exp(1j * p.freq * t), 0)
        for e in self.exps:
            out = out + np.where(t > 0, e.coef * np.exp(-e.rate * t), 0)
        return out

    def scaled(self, c):
        c = complex(c)
        return InputSignal(
            [Piece(p.a, p.b, p.freq, p.coef * c) for p in self.pieces],
            [ExpTerm(e.coef * c, e.rate) for e in self.exps],
            self.kind,
        )

    def __add__(self, other):
        return InputSignal(self.pieces + other.pieces, self.exps + other.exps)

    def __mul__(self, other):
        if not isinstance(other, InputSignal):
            return self.scaled(other)
        if self.exps or other.exps:
            raise DomainError("products are only formed between compactly supported signals")
        out = []
        for p in self.pieces:
            for r in other.pieces:
                a, b = max(p.a, r.a), min(p.b, r.b)
                if a < b:
                    out.append(Piece(a, b, p.freq + r.freq, p.coef * r.coef))
        return InputSignal(out)

    def restrict(self, t0):
        """The signal times ``chi_(0, t0]``."""
        if self.exps:
            raise DomainError("restriction of exponential terms is not represented")
        out = [Piece(p.a, min(p.b, t0), p.freq, p.coef) for p in self.pieces if p.a < t0]
        return InputSignal(out, kind=self.kind)

    def reflect(self, t0):
        """``r -> u(t0 - r)`` on ``(0, t0)``; the support must lie in ``(0, t0]``."""
        if self.support_end > t0:
            raise DomainError("signal support extends beyond the reflection horizon", "t0")
        out = [
            Piece(t0 - p.b, t0 - p.a, -p.freq, p.coef * np.exp(1j * p.freq * t0))
            for p in self.pieces
        ]
        return InputSignal(out, kind=self.kind)

    # --- modulus -----------------------------------------------------------

    def breakpoints(self):
        pts = {0.0}
        for p in self.pieces:
            pts.update((p.a, p.b))
        return np.array(sorted(pts))

    def abs_profile(self):
        """``(edges, moduli)`` if ``|f|`` is piecewise constant, else ``None``.

        ``|f|`` equals ``moduli[j]`` on ``(edges[j], edges[j+1]]``.  This holds
        whenever all pieces active on an elementary interval share one
        frequency.
        """
        if self.exps:
            return None
        edges = self.breakpoints()
        if edges.size < 2:
            return edges, np.zeros(0)
        moduli = np.zeros(edges.size - 1)
        for j in range(edges.size - 1):
            lo, hi = edges[j], edges[j + 1]
            active = [p for p in self.pieces if p.a <= lo and p.b >= hi]
            if not active:
                continue
            freqs = {p.freq for p in active}
            if len(freqs) > 1:
                return None
            moduli[j] = abs(sum(p.coef for p in active))
        return edges, moduli

    def _cells(self):
        """Elementary intervals with the active pieces on each."""
        edges = self.breakpoints()
        for j in range(edges.size - 1):
            lo, hi = edges[j], edges[j + 1]
            active = [p for p in self.pieces if p.a <= lo and p.b >= hi]
            if active:
                yield lo, hi, active

    def integrate_modulus(self, g):
        """``int_0^inf g(|f(t)|) dt`` for a vectorised ``g`` with ``g(0) = 0``."""
        prof = self.abs_profile()
        if prof is not None:
            edges, moduli = prof
            if moduli.size == 0:
                return 0.0
            return math.fsum(np.diff(edges) * g(moduli))
        def fun(t):
            return float(g(np.abs(self(np.array(t)))))

        opts = dict(limit=400, epsabs=1e-14, epsrel=1e-12)
        edges = self.breakpoints()
        total = [integrate.quad(fun, lo, hi, **opts)[0] for lo, hi in zip(edges[:-1], edges[1:])]
        if self.exps:
            tail, _ = integrate.quad(fun, edges[-1], math.inf, **opts)
            if not math.isfinite(tail):
                raise UnboundedNormError("modulus integral diverges")
            total.append(tail)
        return math.fsum(total)

    def sup_norm(self):
        """Essential supremum of ``|f|``.

        Exact for piecewise-constant moduli and pure exponentials; otherwise
        the triangle-inequality bound ``sum |coef|`` per cell, which is an
        upper bound.
        """
        prof = self.abs_profile()
        if prof is not None:
            return float(prof[1].max(initial=0.0))
        best = 0.0
        for _, _, active in self._cells():
            best = max(best, sum(abs(p.coef) for p in active))
        exp_bound = sum(abs(e.coef) for e in self.exps)
        if not self.pieces:
            return float(exp_bound)
        return float(best + exp_bound)

    def l1_norm(self):
        return self.integrate_modulus(lambda m: m)

    def lp_norm(self, p):
        if p == math.inf:
            return self.sup_norm()
        return self.integrate_modulus(lambda m: m**p) ** (1.0 / p)

    # --- serialisation -------------------------------------------------------

    def to_dict(self):
        if self.exps:
            return {
                "kind": "weighted_sum",
                "terms": [_piece_dict(p) for p in self.pieces],
                "exponentials": [
                    {"coef": _cplx(e.coef), "rate": _cplx(e.rate)} for e in self.exps
                ],
            }
        if self.is_zero:
            return {"kind": "zero"}
        if self.kind == "grid":
            edges = self.breakpoints()
            values = self(0.5 * (edges[1:] + edges[:-1]))
            return {"kind": "grid", "edges": edges.tolist(), "values": [_cplx(v) for v in values]}
        if len(self.pieces) == 1 and self.kind == "modulated_indicator":
            return {"kind": "modulated_indicator", **_piece_dict(self.pieces[0])}
        return {"kind": "weighted_sum", "terms": [_piece_dict(p) for p in self.pieces]}

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind")
        if kind == "zero":
            return zero_signal()
        if kind == "modulated_indicator":
            return modulated_indicator(d["a"], d["b"], d.get("c", 0.0), _from_cplx(d.get("coef", 1.0)))
        if kind == "weighted_sum":
            pieces = [
                Piece(t["a"], t["b"], t.get("c", 0.0), _from_cplx(t.get("coef", 1.0)))
                for t in d.get("terms", [])
            ]
            exps = [
                ExpTerm(_from_cplx(e["coef"]), _from_cplx(e["rate"]))
                for e in d.get("exponentials", [])
            ]
            return cls(pieces, exps)
        if kind == "grid":
            return grid_signal(d["edges"], [_from_cplx(v) for v in d["values"]])
        if kind == "kernel":
            return kernel_signal(_from_cplx(d["lambda"]))
        raise DomainError(f"unknown signal kind {kind!r}", "kind")


def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def _from_cplx(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _piece_dict(p):
    return {"a": p.a, "b": p.b, "c": p.freq, "coef": _cplx(p.coef)}


def modulated_indicator(a, b, c=0.0, coef=1.0):
    """``coef * chi_(a,b](t) * exp(i*c*t)``."""
    return InputSignal([Piece(float(a), float(b), float(c), complex(coef))], kind="modulated_indicator")


def weighted_sum(terms):
    """Sum of ``coef * indicator`` from ``(coef, signal)`` pairs."""
    pieces, exps = [], []
    for coef, sig in terms:
        s = sig.scaled(coef)
        pieces.extend(s.pieces)
        exps.extend(s.exps)
    return InputSignal(pieces, exps)


def grid_signal(edges, values):
    """Piecewise-constant signal equal to ``values[j]`` on ``(edges[j], edges[j+1]]``."""
    edges = np.asarray(edges, dtype=float)
    values = np.asarray(values, dtype=complex)
    if edges.ndim != 1 or values.shape != (edges.size - 1,):
        raise DomainError("grid needs len(values) == len(edges) - 1", "values")
    if edges[0] < 0 or np.any(np.diff(edges) <= 0):
        raise DomainError("grid edges must be non-negative and strictly increasing", "edges")
    pieces = [Piece(float(a), float(b), 0.0, complex(v)) for a, b, v in zip(edges[:-1], edges[1:], values)]
    return InputSignal(pieces, kind="grid")


def kernel_signal(lam):
    """``k_lambda(t) = exp(-conj(lambda) t) / (2 pi)`` for ``Re lambda > 0``."""
    lam = complex(lam)
    if not lam.real > 0:
        raise DomainError("kernel needs Re(lambda) > 0", "lambda")
    return InputSignal([], [ExpTerm(1.0 / (2.0 * math.pi), lam.conjugate())], kind="kernel")


def zero_signal():
    return InputSignal([], kind="zero")
