"""Admissibility of scalar control operators for diagonal semigroups.

The state space is ``l^q`` with the generator acting as ``A e_k = lambda_k e_k``
and the control operator given by the coefficients ``b_k``.  The input-to-state
map at horizon ``t0`` is

    (Theta_{t0} u)_k = b_k int_0^{t0} exp(lambda_k (t0 - s)) u(s) ds,

and at ``t0 = inf`` (strongly stable case) ``b_k int_0^inf exp(lambda_k s) u(s) ds``.
The latter equals ``b_k (L u)(-lambda_k)``, which ties admissibility to the
Laplace-Carleson embedding into ``L^q(mu)`` for
``mu = sum_k |b_k|^q delta_{-lambda_k}``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .embedding import (
    _candidates,
    _random_signals,
    exp_orlicz_embedding_check,
    finite_time_check,
    lq_mu_norm,
    upper_bound_terms,
)
from .errors import DomainError
from .measure import DiscreteMeasure, intensity_table, summability_functionals
from .orlicz import LINF, construct_witness_young, indicator_norm, luxemburg_norm, verify_witness
from .signals import modulated_indicator

__all__ = [
    "DiagonalSystem",
    "MultiInputOperator",
    "AdmissibilityReport",
    "StateResult",
    "ResolventResult",
    "WitnessResult",
    "to_measure",
    "shift_generator",
    "auto_shift",
    "input_to_state",
    "theta_norm_estimate",
    "decide_linf_admissible",
    "decide_finite_time_admissible",
    "decide_phi_exp_admissible",
    "gamma_rule",
    "witness_orlicz",
    "witness_details",
    "zero_class_report",
    "resolvent_condition",
    "extrapolation_norm",
    "multi_input_decide",
    "propequiv_crosscheck",
]

AUTO_SHIFT_MARGIN = 2.0**-4

_CLASSES = ("strongly_stable", "group_strip", "general")


class DiagonalSystem:
    """Finite diagonal system ``(q, [(lambda_k, b_k)])``.

    ``stability_class`` is inferred when omitted: ``strongly_stable`` if every
    ``Re lambda_k < 0``, otherwise ``group_strip`` (a finite spectrum always
    lies in a vertical strip).
    """

    __slots__ = ("q", "lambdas", "b", "stability_class")

    def __init__(self, q, lambdas, b, stability_class=None):
        if not q >= 1:
            raise DomainError(f"q must be >= 1, got {q}", "q")
        lam = np.array(lambdas, dtype=complex).ravel()
        bb = np.array(b, dtype=complex).ravel()
        if lam.shape != bb.shape:
            raise DomainError("lambda and b must have the same length", "b")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(bb))):
            raise DomainError("mode data must be finite", "modes")
        stable = bool(np.all(lam.real < 0))
        if stability_class is None:
            stability_class = "strongly_stable" if stable else "group_strip"
        if stability_class not in _CLASSES:
            raise DomainError(f"unknown stability class {stability_class!r}", "stability_class")
        if stability_class == "strongly_stable" and not stable:
            k = int(np.flatnonzero(lam.real >= 0)[0])
            raise DomainError(f"mode {k} has Re(lambda) >= 0 in a strongly stable system", "lambda")
        lam.flags.writeable = False
        bb.flags.writeable = False
        self.q = float(q)
        self.lambdas = lam
        self.b = bb
        self.stability_class = stability_class

    def __len__(self):
        return self.lambdas.size

    def __repr__(self):
        return f"DiagonalSystem(q={self.q}, modes={len(self)}, {self.stability_class})"

    def __eq__(self, other):
        if not isinstance(other, DiagonalSystem):
            return NotImplemented
        return (
            self.q == other.q
            and np.array_equal(self.lambdas, other.lambdas)
            and np.array_equal(self.b, other.b)
        )

    __hash__ = None

    @property
    def strongly_stable(self):
        return bool(np.all(self.lambdas.real < 0))

    def to_dict(self):
        return {
            "q": self.q,
            "modes": [
                {"lambda": [lam.real, lam.imag], "b": [b.real, b.imag]}
                for lam, b in zip(self.lambdas, self.b)
            ],
        }

    @classmethod
    def from_dict(cls, d):
        modes = d.get("modes", [])
        lam = [complex(*m["lambda"]) for m in modes]
        b = [complex(*m["b"]) for m in modes]
        return cls(d["q"], lam, b, d.get("stability_class"))


@dataclass
class MultiInputOperator:
    """Several control columns sharing one spectrum."""

    q: float
    lambdas: list
    columns: list

    def __post_init__(self):
        n = len(self.lambdas)
        for j, col in enumerate(self.columns):
            if len(col) != n:
                raise DomainError(f"column {j} has {len(col)} entries, expected {n}", "columns")

    def systems(self):
        return [DiagonalSystem(self.q, self.lambdas, col) for col in self.columns]


@dataclass
class AdmissibilityReport:
    criterion: str
    functional_value: float
    per_strip: object = None
    witness_phi: object = None
    zero_class_curve: list = field(default_factory=list)
    shift_applied: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "functional_value": self.functional_value,
            "per_strip": self.per_strip.to_dict() if self.per_strip is not None else None,
            "witness_phi": self.witness_phi.to_dict() if self.witness_phi is not None else None,
            "zero_class_curve": [[t, v] for t, v in self.zero_class_curve],
            "shift_applied": self.shift_applied,
            "metadata": self.metadata,
        }


def to_measure(sys, exponent=None):
    """``sum_k |b_k|^q delta_{-lambda_k}``, dropping modes with ``b_k = 0``."""
    q = sys.q if exponent is None else float(exponent)
    keep = sys.b != 0
    bad = np.flatnonzero(keep & (sys.lambdas.real >= 0))
    if bad.size:
        k = int(bad[0])
        raise DomainError(f"mode {k} has Re(lambda) = {sys.lambdas[k].real} >= 0", "lambda")
    pts = -sys.lambdas[keep]
    return DiscreteMeasure(pts, np.abs(sys.b[keep]) ** q)


def shift_generator(sys, c):
    """``A - cI``: every eigenvalue moves to ``lambda_k - c``."""
    return DiagonalSystem(sys.q, sys.lambdas - float(c), sys.b)


def auto_shift(sys, bound=-2.0, margin=AUTO_SHIFT_MARGIN):
    """Smallest listed shift ``c = max(0, max Re lambda - bound + margin)``."""
    if not len(sys):
        return 0.0
    return max(0.0, float(sys.lambdas.real.max()) - bound + margin)


@dataclass
class StateResult:
    x: np.ndarray
    norm: float


def _expm1_over(x):
    """``(exp(x) - 1) / x`` for complex arrays, accurate near ``0``."""
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    series = 1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0
    return np.where(small, series, np.expm1(safe) / safe)


def input_to_state(sys, u, t0):
    """``Theta_{t0} u`` in closed form; ``t0 = inf`` needs a strongly stable system."""
    lam = sys.lambdas
    x = np.zeros(lam.shape, dtype=complex)
    if t0 == math.inf:
        if not sys.strongly_stable:
            raise DomainError("infinite horizon needs a strongly stable system", "t0")
        for p in u.pieces:
            beta = lam + 1j * p.freq
            L = p.b - p.a
            # int_a^b exp(beta s) ds
            x += p.coef * np.exp(beta * p.a) * L * _expm1_over(beta * L)
        for e in u.exps:
            s = e.rate - lam
            if np.any(s.real <= 0):
                raise DomainError("input decays too slowly for this spectrum", "rate")
            x += e.coef / s
    else:
        if not t0 > 0:
            raise DomainError("t0 must be positive", "t0")
        for p in u.pieces:
            if p.a >= t0:
                continue
            b = min(p.b, t0)
            beta = lam - 1j * p.freq
            L = b - p.a
            # coef e^{i c t0} int_{t0-b}^{t0-a} exp(beta r) dr
            x += (
                p.coef * np.exp(1j * p.freq * t0) * np.exp(beta * (t0 - b)) * L * _expm1_over(beta * L)
            )
        for e in u.exps:
            kappa = lam + e.rate
            # coef int_0^{t0} exp(lam (t0 - s) - rate s) ds
            x += e.coef * np.exp(-e.rate * t0) * t0 * _expm1_over(kappa * t0)
    x = x * sys.b
    return StateResult(x, math.fsum(np.abs(x) ** sys.q) ** (1.0 / sys.q))


def _probe_measure(sys):
    """Measure whose test signals probe ``Theta``; unstable modes sit at ``Re = 1``."""
    keep = sys.b != 0
    lam = sys.lambdas[keep]
    x = np.where(lam.real < 0, -lam.real, 1.0)
    return DiscreteMeasure(x - 1j * lam.imag, np.abs(sys.b[keep]) ** sys.q)


def theta_norm_estimate(sys, space=LINF, t0=math.inf, budget=0, seed=None):
    """Lower estimate of ``||Theta_{t0}|| = sup ||Theta u|| / ||u||`` from explicit inputs.

    Inputs are the test families of the associated measure (time-reflected
    for finite ``t0``), the constant input on ``(0, t0)`` and ``budget`` random
    unimodular grid signals from ``seed``.
    """
    if budget and seed is None:
        raise DomainError("a seed is required when budget > 0", "seed")
    keep = sys.b != 0
    if not keep.any():
        return 0.0
    if t0 == math.inf and not sys.strongly_stable:
        raise DomainError("infinite horizon needs a strongly stable system", "t0")
    mu = _probe_measure(sys)
    inputs = list(_candidates(mu)) + list(_random_signals(mu, budget, seed))
    best = 0.0
    for u in inputs:
        if t0 != math.inf:
            u = u.restrict(t0)
            if u.is_zero:
                continue
            u = u.reflect(t0)
        n = luxemburg_norm(u, space)
        if n > 0:
            best = max(best, input_to_state(sys, u, t0).norm / n)
    if t0 != math.inf:
        one = modulated_indicator(0.0, t0)
        best = max(best, input_to_state(sys, one, t0).norm / luxemburg_norm(one, space))
    return best


def _growth(family, truncations, q, weights="unit"):
    out = []
    for N in truncations:
        mu = to_measure(family(N))
        out.append([int(N), summability_functionals(mu, q, weights).value])
    return out


def decide_linf_admissible(sys, family=None, truncations=()):
    """Functional ``sum_n C_q[mu_n]`` for infinite-time ``L^inf`` admissibility.

    ``family`` (``N -> DiagonalSystem``) with ``truncations`` adds the growth
    sequence of the functional to the metadata; a finite system is always
    admissible, so the tail behaviour of that sequence is what decides
    an infinite family.
    """
    if not sys.strongly_stable and (sys.b != 0).any():
        raise DomainError("infinite-time criteria need a strongly stable system", "lambda")
    mu = to_measure(sys)
    table = intensity_table(mu, sys.q)
    value = summability_functionals(mu, sys.q).value
    meta = {"q": sys.q, "modes": len(sys)}
    if family is not None:
        meta["growth"] = _growth(family, truncations, sys.q)
    return AdmissibilityReport("linf_infinite_time", value, table, metadata=meta)


def decide_finite_time_admissible(sys, tau0, auto=True):
    """Finite-horizon ``L^inf`` criterion, shifting the spectrum left if needed."""
    c = 0.0
    if not sys.strongly_stable:
        if not auto:
            raise DomainError("system is not strongly stable; enable the automatic shift", "lambda")
        c = auto_shift(sys, bound=0.0)
        sys = shift_generator(sys, c)
    mu = to_measure(sys)
    est = finite_time_check(mu, sys.q, tau0)
    meta = dict(est.metadata, q=sys.q, tau0=tau0)
    return AdmissibilityReport(
        "finite_time", est.functional_value, intensity_table(mu, sys.q), shift_applied=c, metadata=meta
    )


def decide_phi_exp_admissible(sys, extra_shift=0.0):
    """``sum_{n>=1} n^2 C_2[mu_n] + sup_{|I|=2} mu(Q_I)`` after moving ``Re lambda`` below ``-2``.

    The exponent is fixed at 2 whatever ``sys.q`` is; ``sys.q`` is echoed in
    the metadata.
    """
    c = auto_shift(sys) + float(extra_shift)
    shifted = shift_generator(sys, c)
    mu = to_measure(shifted, exponent=2.0)
    est = exp_orlicz_embedding_check(mu, 1.0)
    meta = {
        "system_q": sys.q,
        "exponent": 2.0,
        "window_term": est.metadata["window_term"],
        "horizon_shift_invariant": True,
    }
    return AdmissibilityReport(
        "phi_exp", est.functional_value, intensity_table(mu, 2.0), shift_applied=c, metadata=meta
    )


def gamma_rule(intensities, q):
    """``gamma_n = max(1, R_n^(-1/(2(q-1))))`` with ``R_n = sum_{|m| >= |n|} C_m``.

    For ``q = 1`` every ``gamma_n`` is ``1``.
    """
    items = {int(n): float(c) for n, c in dict(intensities).items()}
    if q == 1:
        return {n: 1.0 for n in items}
    by_level = {}
    for n, c in items.items():
        by_level[abs(n)] = by_level.get(abs(n), 0.0) + c
    tails, acc = {}, 0.0
    for lvl in sorted(by_level, reverse=True):
        acc += by_level[lvl]
        tails[lvl] = acc
    out = {}
    for n in items:
        R = tails[abs(n)]
        out[n] = max(1.0, R ** (-1.0 / (2.0 * (q - 1.0)))) if R > 0 else 1.0
    return out


@dataclass
class WitnessResult:
    phi: object
    gammas: dict
    intensities: dict
    weighted_sum: float
    sqrt_bound: float
    check: object

    @property
    def ok(self):
        return self.check.ok

    def to_dict(self):
        return {
            "phi": self.phi.to_dict(),
            "gammas": [{"n": n, "gamma": g} for n, g in sorted(self.gammas.items())],
            "weighted_sum": self.weighted_sum,
            "sqrt_bound": self.sqrt_bound,
            "verification": self.check.to_dict(),
        }


def witness_details(sys, intensities=None, window=None):
    """Witness construction with the ``gamma`` sequence and its verification."""
    q = sys.q
    if intensities is None:
        intensities = dict(intensity_table(to_measure(sys), q))
    intensities = {int(n): float(c) for n, c in intensities.items() if c > 0}
    if not intensities:
        raise DomainError("no strip carries mass; nothing to construct", "b")
    gammas = gamma_rule(intensities, q)
    phi = construct_witness_young(gammas, q, window)
    check = verify_witness(phi, gammas, q)
    if not check.ok:
        raise AssertionError("witness Young function failed its verification")
    weighted = math.fsum(gammas[n] ** (q - 1.0) * c for n, c in intensities.items())
    bound = 2.0 * math.sqrt(math.fsum(intensities.values()))
    return WitnessResult(phi, gammas, intensities, weighted, bound, check)


def witness_orlicz(sys, intensities=None, window=None):
    """Young function ``Phi(t) = Phi~(t^{q'})`` for which the system is ``L^Phi``-admissible."""
    return witness_details(sys, intensities, window).phi


def zero_class_report(sys, phi=None, taus=(1.0, 1e-1, 1e-2, 1e-3, 1e-4), tau0=1.0, **constants):
    """``L^inf`` report with the witness and the curve ``tau -> ||L||_Phi ||chi_(0,tau]||_Phi``.

    ``constants`` are passed on to :func:`~carleson_admit.embedding.upper_bound_terms`.
    """
    report = decide_linf_admissible(sys)
    if phi is None:
        phi = witness_orlicz(sys)
    mu = to_measure(sys)
    ub = upper_bound_terms(mu, sys.q, phi, **constants)
    curve = []
    for t in sorted(taus, reverse=True):
        if not 0 < t <= tau0:
            raise DomainError("need 0 < tau <= tau0", "tau")
        curve.append((float(t), ub.value * indicator_norm(t, phi)))
    report.witness_phi = phi
    report.zero_class_curve = curve
    report.metadata["upper_bound"] = ub.value
    report.metadata["constants"] = ub.constants
    return report


@dataclass
class ResolventResult:
    grid_max: float
    analytic: float = None
    argmax: complex = None


def resolvent_condition(sys, alpha, grid):
    """``max_grid (sum_k |b_k / (lambda - lambda_k)|^q)^(1/q)`` over ``Re lambda > alpha``.

    For one mode the supremum over the half-plane is also returned,
    ``|b| / (alpha - Re lambda_1)``, approached at the boundary point level
    with ``lambda_1``.
    """
    g = np.asarray(grid, dtype=complex).ravel()
    if g.size and not np.all(g.real > alpha):
        raise DomainError("every grid point needs Re(lambda) > alpha", "grid")
    if not (sys.b != 0).any():
        return ResolventResult(0.0, 0.0 if len(sys) == 1 else None)
    vals = np.abs(sys.b[None, :] / (g[:, None] - sys.lambdas[None, :])) ** sys.q
    norms = vals.sum(axis=1) ** (1.0 / sys.q)
    i = int(np.argmax(norms)) if g.size else None
    analytic = None
    if len(sys) == 1:
        gap = alpha - sys.lambdas[0].real
        analytic = abs(sys.b[0]) / gap if gap > 0 else math.inf
    return ResolventResult(float(norms[i]) if g.size else 0.0, analytic, complex(g[i]) if g.size else None)


def extrapolation_norm(sys, lam):
    """``||(b_k / (lambda_k - lam))_k||_q``, the norm of ``b`` in ``X_{-1}`` at ``lam``.

    ``lam`` must lie in the resolvent set.  Finite systems always give a
    finite value; the helper validates a supplied ``lam`` and reports it.
    """
    lam = complex(lam)
    gap = sys.lambdas - lam
    if np.any(gap == 0):
        raise DomainError(f"{lam} is an eigenvalue of the generator", "lambda")
    return math.fsum(np.abs(sys.b / gap) ** sys.q) ** (1.0 / sys.q)


_DECIDERS = {
    "linf_infinite_time": decide_linf_admissible,
    "phi_exp": decide_phi_exp_admissible,
}


def multi_input_decide(op, criterion="linf_infinite_time", **kwargs):
    """Apply a decider to every column; the overall value is the maximum."""
    if criterion == "finite_time":
        fn = decide_finite_time_admissible
    elif criterion in _DECIDERS:
        fn = _DECIDERS[criterion]
    else:
        raise DomainError(f"unsupported criterion {criterion!r}", "criterion")
    reports = [fn(s, **kwargs) for s in op.systems()]
    overall = max((r.functional_value for r in reports), default=0.0)
    return reports, overall


@dataclass
class CrosscheckResult:
    max_discrepancy: float
    count: int
    rows: list = field(default_factory=list)

    def to_dict(self):
        return {"max_relative_discrepancy": self.max_discrepancy, "inputs": self.count, "rows": self.rows}


def propequiv_crosscheck(sys, space=LINF, budget=0, seed=None, inputs=None, horizons=()):
    """Compare ``||Theta u||_{l^q}`` with ``||L u||_{L^q(mu)}`` on test inputs.

    At ``t0 = inf`` the identity is ``(Theta u)_k = b_k (L u)(-lambda_k)``.  For
    finite horizons in ``horizons`` the input is reflected,
    ``||Theta_{t0} u|| = ||L u~||_{L^q(mu)}`` with ``u~(s) = u(t0 - s)``.  The
    two sides use independent closed forms.  Returns the largest relative
    discrepancy.
    """
    if not sys.strongly_stable:
        raise DomainError("the identity needs a strongly stable system", "lambda")
    if budget and seed is None:
        raise DomainError("a seed is required when budget > 0", "seed")
    mu = to_measure(sys)
    q = sys.q
    if inputs is None:
        inputs = (list(_candidates(mu)) if mu else []) + list(_random_signals(mu, budget, seed) if mu else [])
    rows, worst = [], 0.0
    for i, u in enumerate(inputs):
        lhs = input_to_state(sys, u, math.inf).norm
        rhs = lq_mu_norm(u, mu, q)
        d = abs(lhs - rhs) / max(rhs, lhs, 1e-300) if (lhs or rhs) else 0.0
        rows.append({"input": i, "horizon": None, "theta": lhs, "embedding": rhs, "discrepancy": d})
        worst = max(worst, d)
        for t0 in horizons:
            ur = u.restrict(t0) if not u.exps else None
            if ur is None or ur.is_zero:
                continue
            lhs = input_to_state(sys, ur, t0).norm
            rhs = lq_mu_norm(ur.reflect(t0), mu, q)
            d = abs(lhs - rhs) / max(rhs, lhs, 1e-300) if (lhs or rhs) else 0.0
            rows.append({"input": i, "horizon": t0, "theta": lhs, "embedding": rhs, "discrepancy": d})
            worst = max(worst, d)
    return CrosscheckResult(worst, len(rows), rows)
