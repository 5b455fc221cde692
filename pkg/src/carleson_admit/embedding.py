"""Laplace-Carleson embeddings: test signals, two-sided norm bounds and functionals.

The embedding ``L : X -> L^q(mu)`` sends a signal ``f`` to its Laplace
transform restricted to the atoms of ``mu``.  For a discrete measure

    ||L f||_{L^q(mu)}^q = sum_k w_k |L f(z_k)|^q,

so any signal gives a certified lower bound ``||L f||_{L^q(mu)} / ||f||_X``
for the operator norm.  The upper bound runs the strip-by-strip chain
(Hardy-space Carleson embedding, Hausdorff-Young, Hoelder in Orlicz spaces)
with every constant explicit, see :class:`UpperBound`.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import DomainError
from .laplace import laplace
from .measure import (
    ImaginaryInterval,
    alpha_intensity,
    best_window,
    intensity_table,
    strip_restrict,
    strips,
    summability_functionals,
)
from .orlicz import (
    KAPPA_HOLDER,
    L1,
    LINF,
    ComposedYoung,
    ExpAlphaYoung,
    ExpYoung,
    PowerYoung,
    complementary,
    exp_function_norm,
    indicator_norm,
    luxemburg_norm,
)
from .signals import InputSignal, Piece, grid_signal, modulated_indicator

__all__ = [
    "STEP1_LOWER",
    "STEP1_DECAY",
    "KAPPA_CARLESON",
    "hausdorff_young_constant",
    "test_family_fn",
    "test_family_gk",
    "sample_right_half",
    "exp_family_integral",
    "exp_family_series",
    "lq_mu_norm",
    "embedding_lower_bound",
    "mc_norm_estimate",
    "as_composed",
    "UpperBound",
    "upper_bound_terms",
    "embedding_upper_bound",
    "EmbeddingEstimate",
    "embedding_estimate",
    "strip_embedding_check",
    "finite_time_check",
    "exp_orlicz_embedding_check",
    "psi_integral_limit_check",
    "psi_limit",
    "zero_class_bound",
    "zero_class_curve",
]

STEP1_LOWER = math.exp(-2.0) * math.cos(1.0)
"""``|F_n(z)| >= STEP1_LOWER * 2**(-n-1)`` on the right half of ``Q_{I_n}``."""

STEP1_DECAY = 1.0
"""``C`` in ``|F_m(z)| <= C 2**(-n-|n-m|)``; ``sup_a 2a exp(-a) = 2/e <= 1``."""

_SMALLNESS = STEP1_LOWER / 2.0


def _carleson_constant():
    """Constant ``kappa`` in ``int |F|^q dnu <= kappa C_1[nu] ||F||_{H^q}^q``.

    Valid for ``nu`` carried by a strip ``a <= Re z < 3a``.  Since ``|F|^q`` is
    dominated by the Poisson extension of its boundary values,
    ``int |F|^q dnu <= ||F||^q sup_s int P_x(y - s) dnu``.  Cut the ``y`` line
    into blocks of height ``h = 3a`` centred at ``s``.  Each block is the
    shadow of a square that holds its whole slice of ``nu``, so it carries at
    most ``3a C_1[nu]``.  On block ``j`` the kernel is bounded by
    ``1/(pi a)`` for ``j = 0``, and otherwise by the smaller of
    ``1/(2 pi u)`` and ``3a/(pi (a^2 + u^2))`` with ``u = 3a(|j| - 1/2)``.
    Summing gives ``(3/pi)(1 + 2 sum_j min(1/(3(2j-1)), 3/(1 + 9(j-1/2)^2)))``.
    The ``j >= 3`` part uses ``sum_{j>=1} 1/((j-1/2)^2 + b^2) = pi tanh(pi b)/(2b)``.
    """
    b = 1.0 / 3.0
    full = math.pi * math.tanh(math.pi * b) / (2.0 * b)  # sum_{j>=1} 1/((j-1/2)^2 + b^2)
    head = [min(1.0 / (3.0 * (2 * j - 1)), 3.0 / (1.0 + 9.0 * (j - 0.5) ** 2)) for j in (1, 2)]
    rest = (full - sum(1.0 / ((j - 0.5) ** 2 + b * b) for j in (1, 2))) / 3.0
    assert all(1.0 / (3.0 * (2 * j - 1)) >= 3.0 / (1.0 + 9.0 * (j - 0.5) ** 2) for j in range(3, 50))
    return 3.0 / math.pi * (1.0 + 2.0 * (sum(head) + rest))


KAPPA_CARLESON = _carleson_constant()


def hausdorff_young_constant(q):
    """``(2 pi)^(1/q)``: ``||L h||_{H^q} <= (2 pi)^(1/q) ||h||_{q'}`` for ``q >= 2``.

    Riesz-Thorin between ``||h^||_inf <= ||h||_1`` and Plancherel
    ``||h^||_2 = sqrt(2 pi) ||h||_2`` for the unnormalised transform.
    """
    return (2.0 * math.pi) ** (1.0 / q)


# --- explicit test signals --------------------------------------------------------


def test_family_fn(n, interval):
    """``chi_(2^{-n-1}, 2^{-n}](t) exp(i c_n t)`` with ``c_n`` the centre of ``I_n``.

    ``|I_n|`` must be ``2^{n+1}``.
    """
    if not math.isclose(interval.length, math.ldexp(1.0, n + 1), rel_tol=1e-12):
        raise DomainError(f"interval for n={n} must have length 2^{n + 1}", "interval")
    return modulated_indicator(math.ldexp(1.0, -n - 1), math.ldexp(1.0, -n), interval.center)


test_family_fn.__test__ = False


def sample_right_half(n, interval, count, rng):
    """``count`` points of ``T_n = {2^n <= x < 2^{n+1}, y in I_n}``."""
    x = rng.uniform(math.ldexp(1.0, n), math.ldexp(1.0, n + 1), count)
    y = rng.uniform(interval.lo, interval.hi, count)
    return x + 1j * y


def test_family_gk(kind, k, intervals, N, alpha=None):
    """Sum of test signals ``f_j`` over ``j = k (mod N)``.

    Parameters
    ----------
    kind : {"linf", "exp", "exp_alpha"}
        ``linf`` gives ``sum_j f_j``; ``exp`` gives ``log 2 * sum_m m f_{k+mN}``;
        ``exp_alpha`` gives ``(log 2)^(1/alpha) sum_m m^(1/alpha) f_{k+mN}``.
    k : int
    intervals : mapping int -> ImaginaryInterval
        ``I_j`` for every index to include; its keys fix the truncation.
    N : int
        Spacing.  ``linf`` needs ``2^{3-N} <= exp(-2) cos(1)/2``, i.e. ``N >= 8``;
        the other kinds need ``N >= 2``.
    """
    if kind == "linf":
        if not 2.0 ** (3 - N) * STEP1_DECAY <= _SMALLNESS:
            raise DomainError(f"N = {N} violates the smallness condition (needs N >= 8)", "N")
    elif kind in ("exp", "exp_alpha"):
        if N < 2:
            raise DomainError("N must be >= 2", "N")
        if kind == "exp_alpha" and not (alpha and alpha > 0):
            raise DomainError("exp_alpha family needs alpha > 0", "alpha")
        if k < 0:
            raise DomainError("k must be >= 0", "k")
    else:
        raise DomainError(f"unknown family kind {kind!r}", "kind")
    pieces = []
    for j in sorted(intervals):
        if (j - k) % N:
            continue
        m = (j - k) // N
        if kind == "linf":
            coef = 1.0
        else:
            if m < 0:
                continue
            a = 1.0 if kind == "exp" else alpha
            coef = math.log(2.0) ** (1.0 / a) * m ** (1.0 / a)
        f = test_family_fn(j, intervals[j])
        pieces.extend(Piece(p.a, p.b, p.freq, coef * p.coef) for p in f.pieces)
    g = InputSignal(pieces)
    if kind == "exp":
        integral = exp_family_integral(g)
        bound = exp_family_series(k, N)
        if not integral <= float(bound) <= 1.0:
            raise AssertionError(f"exp family normalisation failed: {integral} > {bound}")
    return g


test_family_gk.__test__ = False


def exp_family_integral(g):
    """``int_0^1 Phi_exp(|g(t)|) dt`` (exact for disjoint modulated indicators)."""
    return g.restrict(1.0).integrate_modulus(ExpYoung())


def exp_family_series(k, N):
    """``sum_{m>=0} 2^{-(k+mN+1)} 2^m = 2^{-(k+1)} / (1 - 2^{1-N})`` as a fraction."""
    return Fraction(1, 2 ** (k + 1)) / (1 - Fraction(2, 2**N))


# --- lower bounds -------------------------------------------------------------------


def lq_mu_norm(f, mu, q):
    """``(sum_k w_k |L f(z_k)|^q)^(1/q)`` with a fixed summation order."""
    if not mu:
        return 0.0
    vals = mu.weights * np.abs(laplace(f, mu.points)) ** q
    return math.fsum(vals) ** (1.0 / q)


def _strip_intervals(mu):
    """``I_n`` maximising the length-``2^{n+1}`` window mass of each strip."""
    out = {}
    for n in strips(mu):
        L = math.ldexp(1.0, n + 1)
        out[n] = ImaginaryInterval(best_window(strip_restrict(mu, n), L).center, L)
    return out


def _dyadic_edges(mu, pad, per_octave=1):
    ns = strips(mu)
    lo, hi = -ns[-1] - pad, -ns[0] + pad
    e = 2.0 ** (np.arange(lo * per_octave, hi * per_octave + 1) / per_octave)
    return np.concatenate([[0.0], e])


def _candidates(mu):
    """Deterministic candidate signals: ``f_n``, ``g_k`` and atom-matched indicators."""
    ivs = _strip_intervals(mu)
    cands = [test_family_fn(n, iv) for n, iv in ivs.items()]
    N = 8
    lo, hi = min(ivs), max(ivs)
    full = {
        j: ivs.get(j, ImaginaryInterval(0.0, math.ldexp(1.0, j + 1))) for j in range(lo, hi + 1)
    }
    for k in range(N):
        g = test_family_gk("linf", k, full, N)
        if not g.is_zero:
            cands.append(g)
    heavy = np.argsort(-mu.weights, kind="stable")[:32]
    for i in sorted(heavy):
        w = mu.points[i]
        for T in (0.5, 1.0, 2.0, 4.0):
            cands.append(modulated_indicator(0.0, T / w.real, w.imag))
    return cands


def _random_signals(mu, budget, seed):
    rng = np.random.default_rng(seed)
    edges = _dyadic_edges(mu, 2)
    for _ in range(int(budget)):
        phases = rng.uniform(0.0, 2.0 * math.pi, edges.size - 1)
        yield grid_signal(edges, np.exp(1j * phases))


def _ratio(f, mu, q, space):
    nf = luxemburg_norm(f, space)
    if nf == 0:
        return 0.0
    return lq_mu_norm(f, mu, q) / nf


def embedding_lower_bound(mu, q, space=LINF, budget=0, seed=None, return_signal=False):
    """Certified lower bound for ``||L : X -> L^q(mu)||``.

    The maximum of ``||L g||_{L^q(mu)} / ||g||_X`` over the explicit test
    families and ``budget`` random unimodular dyadic grid signals drawn with
    ``seed``.
    """
    if not q >= 1:
        raise DomainError("q must be >= 1", "q")
    if budget and seed is None:
        raise DomainError("a seed is required when budget > 0", "seed")
    if not mu:
        return (0.0, None) if return_signal else 0.0
    best, arg = 0.0, None
    for g in _candidates(mu):
        r = _ratio(g, mu, q, space)
        if r > best:
            best, arg = r, g
    for g in _random_signals(mu, budget, seed):
        r = _ratio(g, mu, q, space)
        if r > best:
            best, arg = r, g
    return (best, arg) if return_signal else best


def mc_norm_estimate(mu, q, space=LINF, budget=0, seed=None, iterations=60, per_octave=4):
    """Improved lower estimate by ascent over unimodular step signals.

    Starts from the best candidate of :func:`embedding_lower_bound` (sampled on
    a geometric grid) and from phase-matched starts for the heaviest atoms,
    then iterates ``u <- phase(A^H (w |Au|^(q-2) Au))``, which never decreases
    ``sum w |Au|^q`` for ``q >= 1``.  Every iterate is an actual signal, so the
    result stays below the true norm.
    """
    lower, best_sig = embedding_lower_bound(mu, q, space, budget, seed, return_signal=True)
    if not mu:
        return 0.0
    edges = _dyadic_edges(mu, 4, per_octave)
    cells = InputSignal([Piece(a, b) for a, b in zip(edges[:-1], edges[1:])])
    A = np.stack([laplace(InputSignal([c]), mu.points) for c in cells.pieces], axis=1)
    w = mu.weights
    mids = 0.5 * (edges[1:] + edges[:-1])
    starts = [np.exp(1j * np.angle(best_sig(mids)))] if best_sig is not None else []
    for i in np.argsort(-w, kind="stable")[:4]:
        starts.append(np.exp(-1j * np.angle(A[i])))
    best = lower
    for u in starts:
        u = np.where(np.abs(u) > 0, u, 1.0)
        for _ in range(iterations):
            Au = A @ u
            grad = A.conj().T @ (w * np.abs(Au) ** (q - 2.0) * Au) if q != 2 else A.conj().T @ (w * Au)
            u_new = np.exp(1j * np.angle(grad))
            if np.allclose(u_new, u, rtol=0, atol=1e-13):
                break
            u = u_new
        sig = grid_signal(edges, u)
        best = max(best, _ratio(sig, mu, q, space))
    return best


# --- upper bounds -------------------------------------------------------------------


def as_composed(phi, q):
    """Write ``phi`` as ``Phi~(t^{q'})`` and return ``Phi~``; ``LINF`` maps to ``LINF``.

    Accepts composed functions with the right exponent, ``Phi_exp`` and
    ``Phi_alpha`` (``alpha >= 1``) when ``q' = 2``, and powers ``t^p`` with
    ``p >= q'``.
    """
    qp = q / (q - 1.0)
    if phi is LINF:
        return LINF
    if isinstance(phi, ComposedYoung) and math.isclose(phi.qprime, qp, rel_tol=1e-12):
        return phi.inner
    if math.isclose(qp, 2.0, rel_tol=1e-12):
        if isinstance(phi, ExpYoung):
            return ExpAlphaYoung(0.5)
        if isinstance(phi, ExpAlphaYoung) and phi.alpha >= 1:
            return ExpAlphaYoung(phi.alpha / 2.0)
    if isinstance(phi, PowerYoung) and phi.p >= qp:
        r = phi.p / qp
        return L1 if math.isclose(r, 1.0, rel_tol=1e-12) and phi.coef == 1 else PowerYoung(r, phi.coef)
    raise DomainError(f"Young function is not of the form Phi~(t^q') with q' = {qp}", "phi")


@dataclass
class UpperBound:
    """``value^q = kappa_C * HY^q * 2^(1+q) * kappa_H^(q-1) * sum_n terms[n]``.

    ``terms[n] = (2^n ||exp(-q' 2^{n-1} t)||_{Phi~^c})^(q-1) C_q[mu_n]``.  The
    factor ``2^(1+q)`` bounds ``C_1`` of the strip shifted left by
    ``2^{n-1}`` through ``C_q[mu_n]``; ``kappa_H`` is dropped for ``L^inf``.
    """

    value: float
    q: float
    terms: dict
    constants: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "value": self.value,
            "q": self.q,
            "terms": [{"n": n, "term": t} for n, t in sorted(self.terms.items())],
            "constants": self.constants,
        }


def upper_bound_terms(mu, q, phi=LINF, kappa_carleson=None, hausdorff_young=None, kappa_holder=None):
    if not q >= 2:
        raise DomainError(f"upper bound needs q >= 2, got {q}", "q")
    kc = KAPPA_CARLESON if kappa_carleson is None else float(kappa_carleson)
    hy = hausdorff_young_constant(q) if hausdorff_young is None else float(hausdorff_young)
    kh = KAPPA_HOLDER if kappa_holder is None else float(kappa_holder)
    inner = as_composed(phi, q)
    phic = complementary(inner) if inner is not LINF else L1
    qp = q / (q - 1.0)
    holder = 1.0 if phi is LINF else kh ** (q - 1.0)
    terms = {}
    for n, c in intensity_table(mu, q):
        norm = exp_function_norm(phic, qp * math.ldexp(1.0, n - 1))
        terms[n] = (math.ldexp(norm, n)) ** (q - 1.0) * c
    lemma = 2.0 ** (1.0 + q)
    total = kc * hy**q * lemma * holder * math.fsum(terms.values())
    constants = {
        "kappa_carleson": kc,
        "hausdorff_young": hy,
        "kappa_holder": kh if phi is not LINF else 1.0,
        "lemma_factor": lemma,
    }
    return UpperBound(total ** (1.0 / q), q, terms, constants)


def embedding_upper_bound(mu, q, phi=LINF, **constants):
    """Upper bound for ``||L : L^Phi -> L^q(mu)||`` (``LINF`` for ``L^inf``)."""
    return upper_bound_terms(mu, q, phi, **constants).value


@dataclass
class EmbeddingEstimate:
    q: float
    space: str
    lower_bound: float
    upper_bound: float
    functional_value: float
    decided_bounded: bool = True
    constants_used: dict = field(default_factory=dict)
    mc_estimate: float = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "q": self.q,
            "space": self.space,
            "lower_bound": self.lower_bound,
            "mc_estimate": self.mc_estimate,
            "upper_bound": self.upper_bound,
            "functional_value": self.functional_value,
            "decided_bounded": self.decided_bounded,
            "constants_used": self.constants_used,
            "metadata": self.metadata,
        }


def _space_name(space):
    return "Linfty" if space is LINF else space.kind


def embedding_estimate(mu, q, space=LINF, budget=0, seed=None, mc=True, **constants):
    """Lower bound, ascent estimate and upper bound with the unit functional."""
    lower = embedding_lower_bound(mu, q, space, budget, seed)
    est = mc_norm_estimate(mu, q, space, budget, seed) if mc else None
    ub = upper_bound_terms(mu, q, space, **constants)
    functional = summability_functionals(mu, q).value
    return EmbeddingEstimate(
        q, _space_name(space), lower, ub.value, functional, math.isfinite(functional),
        ub.constants, est,
    )


# --- decision functionals -------------------------------------------------------------


def strip_embedding_check(mu, p, q, strip=None):
    """``C_{q/p'}[mu]`` for a measure carried by a vertical strip.

    ``strip = (a1, a2)`` is checked when given; otherwise the tightest strip
    holding the atoms is reported.  ``p = inf`` means ``p' = 1``.
    """
    pp = 1.0 if p == math.inf else p / (p - 1.0)
    if not (1 <= pp <= q):
        raise DomainError("need 1 <= p' <= q", "p")
    if not q >= 2:
        raise DomainError("q must be >= 2", "q")
    if strip is not None:
        a1, a2 = strip
        out = np.flatnonzero((mu.re < a1) | (mu.re > a2))
        if out.size:
            i = out[0]
            raise DomainError(f"atom {mu.re[i]}{mu.im[i]:+}i lies outside the strip", "atoms")
    elif mu:
        a1, a2 = float(mu.re.min()), float(mu.re.max())
    else:
        a1 = a2 = float("nan")
    value = alpha_intensity(mu, q / pp)
    return EmbeddingEstimate(
        q, f"Lp({p})", float("nan"), float("nan"), value, True,
        metadata={"exponent": q / pp, "strip": [a1, a2], "strip_ratio": a2 / a1 if mu else None},
    )


def finite_time_check(mu, q, tau0):
    """Finite-horizon functional ``sum_{n >= -M} C_q[mu_n] + C_q[mu^M]``.

    ``M = floor(log2 tau0)`` and ``mu^M`` is the part of ``mu`` with
    ``Re z <= 2^{-M}``.  The decision does not depend on the horizon, which
    is recorded in the metadata.
    """
    if not tau0 > 0:
        raise DomainError("tau0 must be positive", "tau0")
    if not q >= 2:
        raise DomainError("q must be >= 2", "q")
    M = int(np.frexp(float(tau0))[1]) - 1
    fun = summability_functionals(mu, q, finite_time=M)
    return EmbeddingEstimate(
        q, "Linfty", float("nan"), float("nan"), fun.value, math.isfinite(fun.value),
        metadata={
            "M": M,
            "head_intensity": fun.extra,
            "strip_terms": [{"n": n, "intensity": c} for n, c, _, _ in fun.terms],
            "horizon_independent": True,
        },
    )


def exp_orlicz_embedding_check(mu, alpha=1.0):
    """``sum_{n>=1} n^(2/alpha) C_2[mu_n] + sup_{|I|=2} mu(Q_I)``; ``alpha = 1`` is ``Phi_exp``."""
    if not alpha >= 1:
        raise DomainError("alpha must be >= 1", "alpha")
    if alpha == 1:
        fun = summability_functionals(mu, 2.0, weights="n_squared")
    else:
        fun = summability_functionals(mu, 2.0, weights="n_pow", alpha=alpha)
    return EmbeddingEstimate(
        2.0, "LPhi_exp" if alpha == 1 else f"LPhi_alpha({alpha})", float("nan"), float("nan"),
        fun.value, math.isfinite(fun.value),
        metadata={"window_term": fun.extra, "terms": fun.to_dict()["terms"], "alpha": alpha},
    )


def psi_limit(B):
    """``4 (log 2)^2 / B``."""
    return 4.0 * math.log(2.0) ** 2 / B


def psi_integral_limit_check(B, n, fubini_corrected=False):
    """``4 int_{1/2}^{U} (log 2s)^2 2^{-n} log(2^{n+1}/(B n^2 s)) ds`` with ``U = 2^n/(B n^2)``.

    With ``fubini_corrected`` the last logarithm is ``log(2^n/(B n^2 s))``.
    Evaluated after ``v = log 2s`` as ``2^{1-n} int_0^V v^2 (Lam - v) e^v dv``.
    """
    if n < 4:
        raise DomainError("n must be >= 4", "n")
    ln2 = math.log(2.0)
    # 2^n exp(-2^n) / (B n^2) < 1/2 in log form; 2^n is capped to stay finite
    if not B > 0 or not (n + 1) * ln2 - math.ldexp(1.0, min(n, 1000)) - math.log(B * n * n) < 0:
        raise DomainError("B too small for the precondition", "B")
    V = (n + 1) * ln2 - math.log(B * n * n)
    if not V > 0:
        raise DomainError("upper limit 2^n/(B n^2) must exceed 1/2", "B")
    lam = V if fubini_corrected else V + ln2
    shift = (n - 1) * ln2

    def f(v):
        return v * v * (lam - v) * math.exp(v - shift)

    val, _ = integrate.quad(f, 0.0, V, limit=200, epsabs=0.0, epsrel=1e-13)
    return val


def zero_class_bound(mu, q, phi, tau, tau0, upper=None):
    """``||L||_{L^Phi -> L^q} * ||chi_(0,tau]||_Phi`` bounding the ``L^inf(0, tau)`` norm."""
    if not 0 < tau <= tau0:
        raise DomainError("need 0 < tau <= tau0", "tau")
    if upper is None:
        upper = embedding_upper_bound(mu, q, phi)
    return upper * indicator_norm(tau, phi)


def zero_class_curve(mu, q, phi, taus, tau0):
    """``[(tau, bound)]`` sorted by decreasing ``tau``."""
    upper = embedding_upper_bound(mu, q, phi)
    return [(float(t), zero_class_bound(mu, q, phi, t, tau0, upper)) for t in sorted(taus, reverse=True)]
