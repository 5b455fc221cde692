"""Young functions, complementary functions and Luxemburg norms.

A Young function is represented by its value ``Phi`` and its left-continuous
derivative ``phi``.  Every class also provides ``inverse_deriv``, the
generalised inverse of ``phi``, which is what the complementary function needs:
``Phi^c(s) = s*t - Phi(t)`` at any ``t`` with ``phi(t) <= s <= phi(t+)``.

``L1`` and ``LINF`` stand for the spaces ``L^1`` and ``L^inf`` with their usual
norms.  They are not Young functions in the strict sense and get their own code
paths in the norm routines.
"""

import math

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, UnboundedNormError
from .signals import modulated_indicator

__all__ = [
    "YoungFunction",
    "PowerYoung",
    "ExpYoung",
    "ExpAlphaYoung",
    "TabulatedYoung",
    "ComposedYoung",
    "ConjugateYoung",
    "L1",
    "LINF",
    "complementary",
    "young_from_dict",
    "luxemburg_norm",
    "luxemburg_integral",
    "exp_orlicz_integral",
    "exp_orlicz_integral_direct",
    "exp_function_norm",
    "construct_witness_young",
    "WitnessCheck",
    "verify_witness",
    "HolderCheck",
    "holder_orlicz",
    "indicator_norm",
    "KAPPA_HOLDER",
]

KAPPA_HOLDER = 2.0
"""Hoelder constant for Luxemburg norms: ``int |fg| <= 2 ||f||_Phi ||g||_Phi^c``."""

_BISECT_STEPS = 120


class YoungFunction:
    """Base class.  Subclasses implement ``__call__`` and ``deriv``."""

    kind = "abstract"

    def __call__(self, t):
        raise NotImplementedError

    def deriv(self, t):
        raise NotImplementedError

    def inverse_deriv(self, s):
        """``inf {t >= 0 : phi(t) >= s}`` by vectorised bisection."""
        s = np.asarray(s, dtype=float)
        if s.ndim == 0:
            return self._inverse_deriv_scalar(float(s))
        lo = np.zeros_like(s)
        hi = np.ones_like(s)
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(2100):
                low = self.deriv(hi) < s
                if not low.any():
                    break
                hi = np.where(low, 2.0 * hi, hi)
            for _ in range(_BISECT_STEPS):
                mid = 0.5 * (lo + hi)
                below = self.deriv(mid) < s
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
        with np.errstate(over="ignore", invalid="ignore"):
            at_zero = self.deriv(np.full_like(s, np.nextafter(0.0, 1.0))) >= s
        return np.where((s <= 0) | at_zero, 0.0, hi)

    def _inverse_deriv_scalar(self, s):
        if not s > 0:
            return 0.0
        with np.errstate(over="ignore", invalid="ignore"):
            if float(self.deriv(np.nextafter(0.0, 1.0))) >= s:
                return 0.0
            hi = 1.0
            while float(self.deriv(hi)) < s:
                hi *= 2.0
            lo = 0.0 if hi == 1.0 else 0.5 * hi
            return optimize.brentq(
                lambda t: float(self.deriv(t)) - s, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=400
            )

    def log_moment(self, C):
        """``int_0^1 phi(s/C) log(1/s) ds``, computed with ``s = exp(-u)``."""

        def f(u):
            e = math.exp(-u)
            return float(self.deriv(e / C)) * u * e

        opts = dict(limit=400, epsabs=1e-15, epsrel=1e-12)
        head, _ = integrate.quad(f, 0.0, 40.0, points=self._u_kinks(C), **opts)
        tail, _ = integrate.quad(f, 40.0, math.inf, **opts)
        return head + tail

    def _u_kinks(self, C):
        return None

    def complementary(self):
        return ConjugateYoung(self)

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"

    def to_dict(self):
        raise NotImplementedError


class _Endpoint(YoungFunction):
    """Marker for the ``L^1`` / ``L^inf`` conventions."""

    def __init__(self, kind):
        self.kind = kind

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "l1":
            return t.copy() if t.ndim else float(t)
        out = np.where(t <= 1.0, 0.0, math.inf)
        return out if out.ndim else float(out)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "l1":
            out = np.where(t > 0, 1.0, 0.0)
        else:
            out = np.where(t <= 1.0, 0.0, math.inf)
        return out if out.ndim else float(out)

    def complementary(self):
        return LINF if self.kind == "l1" else L1

    def to_dict(self):
        return {"kind": self.kind}


L1 = _Endpoint("l1")
LINF = _Endpoint("linf")


class PowerYoung(YoungFunction):
    """``Phi(t) = coef * t**p`` with ``p > 1``."""

    kind = "power"

    def __init__(self, p, coef=1.0):
        if not p > 1:
            raise DomainError(f"power Young function needs p > 1, got {p}", "p")
        if not coef > 0:
            raise DomainError("coefficient must be positive", "coef")
        self.p = float(p)
        self.coef = float(coef)

    def __call__(self, t):
        return self.coef * np.asarray(t, dtype=float) ** self.p

    def deriv(self, t):
        return self.coef * self.p * np.asarray(t, dtype=float) ** (self.p - 1.0)

    def inverse_deriv(self, s):
        s = np.maximum(np.asarray(s, dtype=float), 0.0)
        return (s / (self.coef * self.p)) ** (1.0 / (self.p - 1.0))

    def log_moment(self, C):
        # int_0^1 s^a log(1/s) ds = 1/(a+1)^2
        return self.coef * self.p * C ** (1.0 - self.p) / self.p**2

    def complementary(self):
        pc = self.p / (self.p - 1.0)
        return PowerYoung(pc, (self.coef * self.p) ** (-(pc - 1.0)) / pc)

    def to_dict(self):
        return {"kind": "power", "params": {"p": self.p, "coef": self.coef}}


class ExpYoung(YoungFunction):
    """``Phi_exp(t) = exp(t) - t - 1``."""

    kind = "exp"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return np.expm1(t) - t

    def deriv(self, t):
        with np.errstate(over="ignore"):
            return np.expm1(np.asarray(t, dtype=float))

    def inverse_deriv(self, s):
        return np.log1p(np.maximum(np.asarray(s, dtype=float), 0.0))

    def to_dict(self):
        return {"kind": "exp"}


class ExpAlphaYoung(YoungFunction):
    """``Phi_a(t) = exp(t**a) - t**a - 1`` for ``a >= 1/2``.

    ``ExpAlphaYoung(0.5)`` composed with ``t**2`` is ``Phi_exp``.  Its derivative
    tends to ``1/2`` at ``0+``.
    """

    kind = "exp_alpha"

    def __init__(self, alpha):
        if not alpha >= 0.5:
            raise DomainError(f"exp_alpha needs alpha >= 1/2, got {alpha}", "alpha")
        self.alpha = float(alpha)

    def __call__(self, t):
        x = np.asarray(t, dtype=float) ** self.alpha
        with np.errstate(over="ignore"):
            return np.expm1(x) - x

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        a = self.alpha
        x = t**a
        with np.errstate(over="ignore", invalid="ignore"):
            out = a * t ** (2.0 * a - 1.0) * special.exprel(x)
        return np.where(t > 0, out, 0.0)

    def inverse_deriv(self, s):
        if self.alpha != 0.5:
            return super().inverse_deriv(s)
        # phi(x^2) = exprel(x)/2 = s.  exprel is convex and increasing, so Newton
        # started right of the root converges monotonically.  Start from the
        # Lambert-W solution x = -a - W_{-1}(-a e^{-a}), a = 1/(2s), away from
        # s = 1/2 and from x = 2(2s - 1) (an overestimate) near it.
        s = np.asarray(s, dtype=float)
        live = s > 0.5
        ss = np.where(live, s, 1.0)
        a = 0.5 / ss
        with np.errstate(invalid="ignore"):
            w = -a - special.lambertw(-a * np.exp(-a), -1).real
        x = np.where((ss >= 0.6) & np.isfinite(w), w * (1.0 + 1e-12), 2.0 * (2.0 * ss - 1.0))
        for _ in range(60):
            f = special.exprel(x) - 2.0 * ss
            small = np.abs(x) < 1e-3
            xs = np.where(small, 1.0, x)
            fp = np.where(small, 0.5 + x / 3.0 + x * x / 8.0, (xs * np.exp(xs) - np.expm1(xs)) / (xs * xs))
            step = f / fp
            x = x - step
            if np.all(np.abs(step) <= 4e-16 * np.abs(x)):
                break
        out = np.where(live, x * x, 0.0)
        return out if out.ndim else float(out)

    def to_dict(self):
        return {"kind": "exp_alpha", "params": {"alpha": self.alpha}}


class TabulatedYoung(YoungFunction):
    """Young function whose derivative is piecewise linear through ``knots``.

    ``knots`` is a sequence of ``(t, phi(t))`` pairs starting at ``(0, 0)``
    with both coordinates strictly increasing.  Past the last knot ``phi``
    continues with the slope of the last segment.
    """

    kind = "tabulated"

    def __init__(self, knots):
        k = np.asarray(knots, dtype=float)
        if k.ndim != 2 or k.shape[1] != 2 or k.shape[0] < 2:
            raise DomainError("need at least two (t, phi) knots", "knots")
        t, v = k[:, 0], k[:, 1]
        if t[0] != 0 or v[0] != 0:
            raise DomainError("first knot must be (0, 0)", "knots")
        if np.any(np.diff(t) <= 0) or np.any(np.diff(v) <= 0):
            raise DomainError("knots must be strictly increasing in t and phi", "knots")
        self.t = t
        self.v = v
        self.slopes = np.diff(v) / np.diff(t)
        # Phi at the knots (trapezoids of a linear derivative are exact)
        self.cum = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (v[1:] + v[:-1]))])
        for a in (self.t, self.v, self.slopes, self.cum):
            a.flags.writeable = False

    def _segment(self, t):
        j = np.searchsorted(self.t, t, side="right") - 1
        return np.clip(j, 0, self.slopes.size - 1)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        j = self._segment(t)
        return self.v[j] + self.slopes[j] * (t - self.t[j])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        j = self._segment(t)
        dt = t - self.t[j]
        return self.cum[j] + self.v[j] * dt + 0.5 * self.slopes[j] * dt * dt

    def inverse_deriv(self, s):
        s = np.maximum(np.asarray(s, dtype=float), 0.0)
        j = np.clip(np.searchsorted(self.v, s, side="right") - 1, 0, self.slopes.size - 1)
        return self.t[j] + (s - self.v[j]) / self.slopes[j]

    def log_moment(self, C):
        # phi(s/C) is linear in s between the knots scaled by C; integrate
        # (v_j + m_j (s/C - t_j)) log(1/s) over each piece in closed form with
        # antiderivatives of log(1/s) and s log(1/s).
        edges = np.minimum(self.t * C, 1.0)
        edges = np.append(edges, 1.0)
        total = []
        for j in range(self.slopes.size):
            lo = edges[j]
            hi = 1.0 if j == self.slopes.size - 1 else edges[j + 1]
            if hi <= lo:
                continue
            m = self.slopes[j] / C
            b = self.v[j] - self.slopes[j] * self.t[j]
            total.append(b * (_a0(hi) - _a0(lo)) + m * (_a1(hi) - _a1(lo)))
        return math.fsum(total)

    def _u_kinks(self, C):
        s = self.t[1:] * C
        s = s[s < 1.0]
        return list(-np.log(s)) if s.size else None

    def to_dict(self):
        return {"kind": "tabulated", "knots": np.column_stack([self.t, self.v]).tolist()}


def _a0(s):
    """Antiderivative of ``log(1/s)``: ``s - s log s``."""
    return s - s * math.log(s) if s > 0 else 0.0


def _a1(s):
    """Antiderivative of ``s log(1/s)``: ``s**2/4 - s**2 log(s)/2``."""
    return 0.25 * s * s - 0.5 * s * s * math.log(s) if s > 0 else 0.0


class ComposedYoung(YoungFunction):
    """``Phi(t) = inner(t**qprime)``."""

    kind = "composed_qprime"

    def __init__(self, inner, qprime):
        if not qprime >= 1:
            raise DomainError("exponent must be >= 1", "qprime")
        self.inner = inner
        self.qprime = float(qprime)

    def __call__(self, t):
        return self.inner(np.asarray(t, dtype=float) ** self.qprime)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(invalid="ignore", over="ignore"):
            out = self.qprime * t ** (self.qprime - 1.0) * self.inner.deriv(t**self.qprime)
        return np.where(t > 0, out, 0.0)

    def to_dict(self):
        return {
            "kind": "composed_qprime",
            "params": {"qprime": self.qprime},
            "inner": self.inner.to_dict(),
        }


class ConjugateYoung(YoungFunction):
    """``Phi^c(s) = max_t (s t - Phi(t))`` of an inner Young function."""

    kind = "complementary"

    def __init__(self, inner):
        self.inner = inner

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        t = np.asarray(self.inner.inverse_deriv(s))
        with np.errstate(invalid="ignore"):
            out = np.maximum(s * t - self.inner(t), 0.0)
        out = np.where(s > 0, out, 0.0)
        return out if out.ndim else float(out)

    def deriv(self, s):
        return self.inner.inverse_deriv(s)

    def inverse_deriv(self, t):
        return self.inner.deriv(t)

    def complementary(self):
        return self.inner

    def to_dict(self):
        return {"kind": "complementary", "inner": self.inner.to_dict()}


def complementary(phi):
    """Complementary Young function; closed form for power functions."""
    return phi.complementary()


def young_from_dict(d):
    kind = d.get("kind")
    params = d.get("params", {})
    if kind == "l1":
        return L1
    if kind == "linf":
        return LINF
    if kind == "power":
        return PowerYoung(params["p"], params.get("coef", 1.0))
    if kind == "exp":
        return ExpYoung()
    if kind == "exp_alpha":
        return ExpAlphaYoung(params["alpha"])
    if kind == "tabulated":
        return TabulatedYoung(d["knots"])
    if kind == "composed_qprime":
        return ComposedYoung(young_from_dict(d["inner"]), params["qprime"])
    if kind == "complementary":
        return ConjugateYoung(young_from_dict(d["inner"]))
    raise DomainError(f"unknown Young function kind {kind!r}", "kind")


# --- Luxemburg norms ---------------------------------------------------------


def luxemburg_integral(f, phi, k):
    """``int Phi(|f|/k)``."""
    return f.integrate_modulus(lambda m: phi(np.asarray(m) / k))


def _feasible_root(g, lo, hi):
    """Root of the decreasing ``g`` in ``[lo, hi]`` nudged so that ``g <= 0``."""
    k = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(200):
        if g(k) <= 0:
            return k
        k = k * (1.0 + 1e-15) if k > 0 else np.nextafter(k, math.inf)
    return k


def luxemburg_norm(f, phi):
    """Luxemburg norm ``inf {k > 0 : int Phi(|f|/k) <= 1}`` of an input signal.

    Returns the smallest representable ``k`` found by root bracketing that is
    feasible, so the integral at the returned ``k`` is at most one.
    """
    if phi is LINF:
        return f.sup_norm()
    if phi is L1:
        return f.l1_norm()
    if f.is_zero:
        return 0.0
    scale = f.sup_norm()
    if scale == 0:
        return 0.0

    # search k = scale * x so the bracket stays near 1 whatever the size of f
    def g(x):
        val = luxemburg_integral(f, phi, scale * x)
        if math.isnan(val):
            return math.inf
        return val - 1.0

    lo = hi = 1.0
    for _ in range(2000):
        if g(hi) <= 0:
            break
        hi *= 2.0
    else:
        raise UnboundedNormError("Orlicz integral stays above one for every scale")
    for _ in range(2000):
        if g(lo) > 0:
            break
        lo *= 0.5
    else:
        return 0.0
    k = scale * _feasible_root(g, lo, hi)
    while luxemburg_integral(f, phi, k) > 1.0:
        k = np.nextafter(k, math.inf)
    return float(k)


def exp_orlicz_integral(phi, alpha, C):
    """``int_0^inf Phi(exp(-alpha t)/C) dt`` through its log-weighted form.

    The value equals ``(1/(alpha C)) int_0^1 phi(s/C) log(1/s) ds``; the
    right-hand integral is evaluated in closed form where available and
    otherwise with ``s = exp(-u)`` quadrature.
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive", "alpha")
    if not C > 0:
        raise DomainError("C must be positive", "C")
    if phi is L1:
        return 1.0 / (alpha * C)
    if phi is LINF:
        return 0.0 if C >= 1 else math.inf
    return phi.log_moment(C) / (alpha * C)


def exp_orlicz_integral_direct(phi, alpha, C):
    """The same quantity by direct quadrature in ``t`` (independent route)."""

    def f(t):
        return float(phi(math.exp(-alpha * t) / C))

    val, _ = integrate.quad(f, 0.0, math.inf, limit=400, epsabs=1e-15, epsrel=1e-12)
    return val


def exp_function_norm(phic, rate):
    """Luxemburg norm of ``t -> exp(-rate t)`` on ``(0, inf)`` in ``L^phic``."""
    if not rate > 0:
        raise DomainError("rate must be positive", "rate")
    if phic is L1:
        return 1.0 / rate
    if phic is LINF:
        return 1.0
    if isinstance(phic, PowerYoung):
        # int coef (e^{-rate t}/k)^p dt = coef / (p rate k^p)
        return (phic.coef / (phic.p * rate)) ** (1.0 / phic.p)

    def g(k):
        return exp_orlicz_integral(phic, rate, k) - 1.0

    lo = hi = 1.0
    for _ in range(2000):
        if g(hi) <= 0:
            break
        hi *= 2.0
    for _ in range(2000):
        if g(lo) > 0:
            break
        lo *= 0.5
    return _feasible_root(g, lo, hi)


# --- witness construction ------------------------------------------------------


def _check_tails(gammas, window):
    lo, hi = window
    ns = sorted(gammas)
    left = [n for n in ns if n < lo]
    right = [n for n in ns if n > hi]
    for side, seq in (("right", right), ("left", left[::-1])):
        if not seq:
            continue
        vals = [gammas[n] for n in seq]
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise DomainError(f"gamma is not monotone on the {side} tail", "gammas")
        inner = [gammas[n] for n in ns if lo <= n <= hi]
        boundary = inner[-1] if side == "right" and inner else inner[0] if inner else vals[0]
        if not vals[-1] > boundary:
            raise DomainError(f"gamma does not grow on the {side} tail", "gammas")


def construct_witness_young(gammas, q, window=None):
    """Build ``Phi(t) = Phi~(t**q')`` with ``2^n ||e^{-q' 2^{n-1} t}||_{Phi~^c} <= gamma_n``.

    Parameters
    ----------
    gammas : mapping int -> float
        Target values ``gamma_n >= 1`` indexed by strip.
    q : float
        Exponent ``q >= 2``; ``q' = q/(q-1)``.
    window : (int, int), optional
        Strips outside this window must carry growing ``gamma`` (nondecreasing
        away from the window, strictly larger at the outermost index).

    Returns
    -------
    ComposedYoung
        ``ComposedYoung(ConjugateYoung(T), q')`` where ``T`` is a
        :class:`TabulatedYoung` whose derivative satisfies
        ``phi_T(2^n) <= (q'/2) gamma_n``.
    """
    if not q >= 2:
        raise DomainError(f"q must be >= 2, got {q}", "q")
    gammas = {int(n): float(g) for n, g in dict(gammas).items()}
    if not gammas:
        raise DomainError("no gamma values supplied", "gammas")
    for n, g in gammas.items():
        if not g >= 1:
            raise DomainError(f"gamma_{n} = {g} is below 1", "gammas")
    if window is not None:
        _check_tails(gammas, window)
    qp = q / (q - 1.0)
    ns = sorted(gammas)
    targets = np.array([0.5 * qp * gammas[n] for n in ns])
    env = np.minimum.accumulate(targets[::-1])[::-1]
    vals = env * (1.0 - 0.5 ** (np.arange(len(ns)) + 1.0))
    knots = [(0.0, 0.0)] + [(math.ldexp(1.0, n), v) for n, v in zip(ns, vals)]
    tab = TabulatedYoung(knots)
    return ComposedYoung(ConjugateYoung(tab), qp)


class WitnessCheck:
    """Per-strip verification of a witness Young function."""

    def __init__(self, rows, q):
        self.rows = rows
        self.q = q

    @property
    def ok(self):
        return all(r["integral"] <= 1.0 for r in self.rows)

    def to_dict(self):
        return {"q": self.q, "ok": self.ok, "strips": self.rows}


def verify_witness(phi, gammas, q):
    """Check ``2^n ||e^{-q' 2^{n-1} t}||_{Phi~^c} <= gamma_n`` for each ``n``.

    The decisive test is ``int Phi~^c(e^{-q' 2^{n-1} t} 2^n / gamma_n) dt <= 1``,
    which is equivalent to the norm inequality by monotonicity of the Orlicz
    integral in the scale.  The scaled norm itself is reported too.
    """
    qp = q / (q - 1.0)
    phic = complementary(phi.inner)
    rows = []
    for n in sorted(gammas):
        g = float(gammas[n])
        rate = qp * math.ldexp(1.0, n - 1)
        integral = exp_orlicz_integral(phic, rate, g / math.ldexp(1.0, n))
        scaled = math.ldexp(exp_function_norm(phic, rate), n)
        rows.append({"n": int(n), "gamma": g, "integral": integral, "scaled_norm": scaled})
    return WitnessCheck(rows, q)


# --- Hoelder -------------------------------------------------------------------


class HolderCheck:
    def __init__(self, lhs, rhs, norm_f, norm_g, kappa):
        self.lhs = lhs
        self.rhs = rhs
        self.norm_f = norm_f
        self.norm_g = norm_g
        self.kappa = kappa

    @property
    def holds(self):
        return self.lhs <= self.rhs

    def to_dict(self):
        return dict(
            lhs=self.lhs, rhs=self.rhs, norm_f=self.norm_f, norm_g=self.norm_g,
            kappa_holder=self.kappa, holds=self.holds,
        )


def holder_orlicz(f, g, phi, kappa=KAPPA_HOLDER):
    """``(||fg||_1, kappa ||f||_Phi ||g||_{Phi^c})``; the first must not exceed the second."""
    lhs = (f * g).l1_norm()
    nf = luxemburg_norm(f, phi)
    ng = luxemburg_norm(g, complementary(phi))
    rhs = kappa * nf * ng
    check = HolderCheck(lhs, rhs, nf, ng, kappa)
    if not check.holds:
        raise AssertionError(f"Hoelder bound violated: {lhs} > {rhs}")
    return check


def indicator_norm(tau, phi):
    """``||chi_(0, tau]||_Phi``."""
    return luxemburg_norm(modulated_indicator(0.0, tau), phi)

