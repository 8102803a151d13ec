"""
Analytic bounds of the verification protocol.

Hoeffding tails, the correctness and robustness errors, and the security error
``p_d = min_φ max(ν(φ), ε(φ))``. Exponentials are combined in log space and every
probability is clamped to [0, 1]; a clamp only ever makes a bound vacuous.
"""
from dataclasses import asdict, dataclass, field
from gettext import gettext as _
from types import SimpleNamespace
from typing import Dict
import logging
import math

import numpy as np

from magic_blind.app.exceptions import ContractError


log = logging.getLogger(__name__)


DELTA_CONVENTION = SimpleNamespace(
    RANGE='range',
    SPLIT='split',
    ITEM9='item9',
)
DELTA_CONVENTIONS = (DELTA_CONVENTION.RANGE, DELTA_CONVENTION.SPLIT, DELTA_CONVENTION.ITEM9)

# 'item9' is the command-line name of the split reading.
SPLIT_CONVENTIONS = (DELTA_CONVENTION.SPLIT, DELTA_CONVENTION.ITEM9)

LATTICE_RESOLUTION = 256

SIDE = SimpleNamespace(UPPER='upper', LOWER='lower')


@dataclass(frozen=True)
class BoundParams:
    """
    Parameters of the security bounds.

    Fields:
        d (int): Computation rounds.
        s (int): Test rounds.
        w (int): Tolerated trap failures.
        k (int): Number of trap types, n + t.
        c (float): Error of the honest computation, below 1/2.
        p_err (float): Noise rate.
        delta_convention (str): ``'range'`` for Δ = α − (w/s)·k, ``'split'`` or
            ``'item9'`` for Δ = α − w/(s·k).
    """

    d: int
    s: int
    w: int
    k: int
    c: float = 0.0
    p_err: float = 0.0
    delta_convention: str = DELTA_CONVENTION.RANGE

    def __post_init__(self):
        if self.d < 1 or self.s < 1 or self.k < 1:
            raise ContractError(_('Bounds need d, s, k >= 1, got d={d} s={s} k={k}').format(
                d=self.d, s=self.s, k=self.k))
        if not 0 <= self.w <= self.s:
            raise ContractError(_('Need 0 <= w <= s, got w={w} s={s}').format(w=self.w, s=self.s))
        if not 0 <= self.c < 0.5:
            raise ContractError(_('Need 0 <= c < 1/2, got c={c}').format(c=self.c))
        if not 0 <= self.p_err <= 1:
            raise ContractError(_('Need p_err in [0, 1], got {p}').format(p=self.p_err))
        if self.delta_convention not in DELTA_CONVENTIONS:
            raise ContractError(_('Unknown Δ convention "{c}"').format(c=self.delta_convention))

    @property
    def N(self):
        """Total rounds."""
        return self.d + self.s

    @property
    def alpha(self):
        """``(1 − 2c) / (2 − 2c)``."""
        return (1 - 2 * self.c) / (2 - 2 * self.c)

    @property
    def delta(self):
        """The security margin Δ under the chosen convention."""
        if self.delta_convention in SPLIT_CONVENTIONS:
            return self.alpha - self.w / (self.s * self.k)
        return self.alpha - (self.w / self.s) * self.k


def _clamped(log_value, name):
    if log_value > 0:
        log.debug(_('{n}: bound clamped to 1').format(n=name))
        return 0.0
    return log_value


def _exp(log_value):
    return float(math.exp(log_value))


def binom_upper_tail(n, p, k):
    """
    ``P[X ≥ k] ≤ exp(−2(np − k)²/n)`` for X ~ Binomial(n, p).

    Raises:
        ContractError: If k < np.

    """
    if k < n * p:
        raise ContractError(_('Upper tail needs k >= np, got k={k} np={m}').format(k=k, m=n * p))
    return _exp(_clamped(-2 * (n * p - k) ** 2 / n, 'binom_upper_tail'))


def binom_lower_tail(n, p, k):
    """
    ``P[X ≤ k] ≤ exp(−2(np − k)²/n)`` for X ~ Binomial(n, p).

    Raises:
        ContractError: If k > np.

    """
    if k > n * p:
        raise ContractError(_('Lower tail needs k <= np, got k={k} np={m}').format(k=k, m=n * p))
    return _exp(_clamped(-2 * (n * p - k) ** 2 / n, 'binom_lower_tail'))


def hypergeom_tail(N, K, n, chi, side=SIDE.UPPER):
    """
    Tail of the marked count when drawing n of N items, K marked, at slack chi:
    ``exp(−2 chi² n)``.

    Raises:
        ContractError: If chi is negative or ``K/N ± chi`` leaves [0, 1].

    """
    if chi < 0:
        raise ContractError(_('Slack must be non-negative, got {c}').format(c=chi))
    if not 0 <= K <= N or not 0 <= n <= N:
        raise ContractError(_('Need 0 <= K, n <= N, got N={N} K={K} n={n}').format(N=N, K=K, n=n))
    ratio = K / N
    if side == SIDE.UPPER:
        inside = ratio + chi <= 1
    elif side == SIDE.LOWER:
        inside = ratio - chi >= 0
    else:
        raise ContractError(_('Unknown tail side "{s}"').format(s=side))
    if not inside:
        raise ContractError(_('Slack {c} leaves [0, 1] from K/N={r} on the {s} side').format(
            c=chi, r=ratio, s=side))
    return _exp(-2 * chi ** 2 * n)


def eps_cor(d, c):
    """
    Probability that the majority of d computation rounds is wrong: ``exp(−2d(1/2 − c)²)``.

    Raises:
        ContractError: If c >= 1/2.

    """
    if c >= 0.5:
        raise ContractError(_('Correctness needs c < 1/2, got {c}').format(c=c))
    return _exp(-2 * d * (0.5 - c) ** 2)


def eps_rob(d, s, w, c, p_err):
    """
    Robustness errors of an honest but noisy Server.

    Returns:
        tuple: ``(reject bound, wrong-output bound)``.

    Raises:
        ContractError: Unless ``p_err < w/s`` and ``p_err + c < 1/2``.

    """
    if not p_err < w / s:
        raise ContractError(_('Robustness needs p_err < w/s, got p_err={p} w/s={r}').format(
            p=p_err, r=w / s))
    if not p_err + c < 0.5:
        raise ContractError(_('Robustness needs p_err + c < 1/2, got {v}').format(v=p_err + c))
    return _exp(-2 * (p_err - w / s) ** 2 * s), _exp(-2 * d * (0.5 - (c + p_err)) ** 2)


def _log_eps_terms(params, phi, chi):
    """Log of the two ε terms, elementwise over broadcast arrays."""
    phi, chi = np.broadcast_arrays(np.asarray(phi, dtype=float), np.asarray(chi, dtype=float))
    first = -2 * chi ** 2 * params.s
    u = params.alpha - phi - chi
    ratio = params.w / params.s
    with np.errstate(divide='ignore', invalid='ignore'):
        margin = u / params.k - ratio
        second = np.where((u > 0) & (margin >= 0), -2 * margin ** 2 / u * params.s, 0.0)
    return first, second


def _log_nu_terms(params, phi, chi):
    """Log of the two ν terms, elementwise over broadcast arrays."""
    phi, chi = np.broadcast_arrays(np.asarray(phi, dtype=float), np.asarray(chi, dtype=float))
    first = -2 * chi ** 2 * params.d
    v = 1 - (params.alpha - phi) - chi
    with np.errstate(divide='ignore', invalid='ignore'):
        margin = v * (1 - params.c) - 0.5
        second = np.where((v > 0) & (margin >= 0), -2 * margin ** 2 / v * params.d, 0.0)
    return first, second


def _log_sum(first, second, name):
    total = np.logaddexp(first, second)
    if np.any(total > 0):
        log.debug(_('{n}: {c} grid points clamped to 1').format(n=name, c=int(np.sum(total > 0))))
    return np.minimum(total, 0.0)


def _feasible(grid, low, high):
    grid = np.asarray(sorted(set(float(g) for g in grid)))
    return grid[(grid >= low - 1e-15) & (grid <= high + 1e-15)]


def eps_of_phi(params, phi, chi_grid):
    """
    ``min_χ exp(−2χ²s) + exp(−2((m₀/N − χ)/k − w/s)² / (m₀/N − χ) · s)`` with m₀/N = α − φ.

    Raises:
        ContractError: If φ is outside [0, Δ] or no grid point lies in [0, Δ − φ].

    """
    delta = params.delta
    if not 0 <= phi <= delta + 1e-15:
        raise ContractError(_('φ={p} is outside [0, Δ={d}]').format(p=phi, d=delta))
    chis = _feasible(chi_grid, 0, delta - phi)
    if not chis.size:
        raise ContractError(_('No χ grid point lies in [0, {h}]').format(h=delta - phi))
    return _exp(float(np.min(_log_sum(*_log_eps_terms(params, phi, chis), 'eps_of_phi'))))


def nu_of_phi(params, phi, chi_grid):
    """
    ``min_χ exp(−2χ²d) + exp(−2((1 − m₀/N − χ)(1 − c) − 1/2)² / (1 − m₀/N − χ) · d)``.

    Raises:
        ContractError: If no grid point lies in [0, φ].

    """
    chis = _feasible(chi_grid, 0, phi)
    if not chis.size:
        raise ContractError(_('No χ grid point lies in [0, {h}]').format(h=phi))
    return _exp(float(np.min(_log_sum(*_log_nu_terms(params, phi, chis), 'nu_of_phi'))))


@dataclass
class SecurityBreakdown:
    """
    The security error and how it was reached.

    Fields:
        alpha (float): ``(1 − 2c)/(2 − 2c)``.
        delta (float): Security margin Δ.
        phi (float): φ at the minimum.
        chi_eps (float): χ chosen for ε at that φ.
        chi_nu (float): χ chosen for ν at that φ.
        m0_over_N (float): ``α − φ``.
        eps_phi (float): ε(φ) at the minimum.
        nu_phi (float): ν(φ) at the minimum.
        p_d (float): The security error, the tighter of the grid and closed-form values.
        p_closed (float): Closed-form value at φ = Δ/2, χ = Δ/4.
        closed_terms (dict): The four closed-form terms.
        neg_log2_p_d (float): ``−log₂ p_d``.
        vacuous (bool): True when Δ ≤ 0.
        delta_convention (str): How Δ was computed.
    """

    alpha: float
    delta: float
    phi: float
    chi_eps: float
    chi_nu: float
    m0_over_N: float
    eps_phi: float
    nu_phi: float
    p_d: float
    p_closed: float
    closed_terms: Dict[str, float] = field(default_factory=dict)
    neg_log2_p_d: float = 0.0
    vacuous: bool = False
    delta_convention: str = DELTA_CONVENTION.RANGE

    def as_dict(self):
        """Plain-dict form for JSON."""
        return asdict(self)


def _closed_form(params):
    delta = params.delta
    phi, chi = delta / 2, delta / 4
    eps_first, eps_second = _log_eps_terms(params, phi, chi)
    nu_first, nu_second = _log_nu_terms(params, phi, chi)
    terms = {
        'eps_hypergeom': _exp(float(eps_first)),
        'eps_binom': _exp(float(eps_second)),
        'nu_hypergeom': _exp(float(nu_first)),
        'nu_binom': _exp(float(nu_second)),
    }
    log_eps = float(_log_sum(eps_first, eps_second, 'closed eps'))
    log_nu = float(_log_sum(nu_first, nu_second, 'closed nu'))
    return max(log_eps, log_nu), log_eps, log_nu, terms


def _grid_search(params, phis, chis):
    delta = params.delta
    phi_column, chi_row = phis[:, None], chis[None, :]
    log_eps = _log_sum(*_log_eps_terms(params, phi_column, chi_row), 'security_error eps')
    log_eps = np.where(chi_row <= delta - phi_column + 1e-15, log_eps, np.inf)
    log_nu = _log_sum(*_log_nu_terms(params, phi_column, chi_row), 'security_error nu')
    log_nu = np.where(chi_row <= phi_column + 1e-15, log_nu, np.inf)
    eps_index = np.argmin(log_eps, axis=1)
    nu_index = np.argmin(log_nu, axis=1)
    rows = np.arange(len(phis))
    best_eps = log_eps[rows, eps_index]
    best_nu = log_nu[rows, nu_index]
    return np.maximum(best_eps, best_nu), eps_index, nu_index, best_eps, best_nu


def _refined(phis, best):
    """The coarse grid with four steps per interval next to the coarse optimum."""
    low, high = phis[max(best - 1, 0)], phis[min(best + 1, len(phis) - 1)]
    steps = 4 * (min(best + 1, len(phis) - 1) - max(best - 1, 0))
    if not steps:
        return phis
    return np.union1d(phis, np.linspace(low, high, steps + 1))


def security_error(params, phi_grid=None, chi_grid_resolution=LATTICE_RESOLUTION):
    """
    Upper bound on accepting a wrong output: ``min_φ max(ν(φ), ε(φ))``.

    χ ranges over the lattice ``α·j/chi_grid_resolution`` cut to its feasible range. Without
    ``phi_grid``, φ ranges over the same lattice cut to [0, Δ]; the lattice only depends on α,
    so the result is nonincreasing in d and s. A given ``phi_grid`` is searched, then refined
    fourfold around its best point. The closed-form point φ = Δ/2, χ = Δ/4 is always included.

    Args:
        params (BoundParams): The protocol parameters.
        phi_grid (list): φ values to search, each within [0, Δ].
        chi_grid_resolution (int): Lattice steps per α for χ, and for φ without ``phi_grid``.

    Returns:
        SecurityBreakdown: Grid optimum, closed form and their minimum.

    Raises:
        ContractError: If ``phi_grid`` is empty or leaves [0, Δ], or the resolution is not
            positive.

    """
    alpha, delta = params.alpha, params.delta
    if int(chi_grid_resolution) != chi_grid_resolution or chi_grid_resolution < 1:
        raise ContractError(_('The χ grid resolution must be a positive integer, got {r}').format(
            r=chi_grid_resolution))
    if delta <= 0:
        log.warning(_('No security margin: Δ={d} <= 0 (w too large for s·α/k)').format(d=delta))
        return SecurityBreakdown(alpha, delta, 0.0, 0.0, 0.0, alpha, 1.0, 1.0, 1.0, 1.0, {}, 0.0,
                                 True, params.delta_convention)
    lattice = alpha * np.arange(chi_grid_resolution + 1) / chi_grid_resolution
    chis = np.append(lattice, delta / 4)
    if phi_grid is None:
        phis = np.append(lattice[lattice <= delta], delta / 2)
    else:
        phis = np.unique(np.asarray(phi_grid, dtype=float))
        if not phis.size:
            raise ContractError(_('The φ grid is empty'))
        if phis[0] < 0 or phis[-1] > delta + 1e-15:
            raise ContractError(_('The φ grid must lie in [0, Δ={d}], got [{lo}, {hi}]').format(
                d=delta, lo=phis[0], hi=phis[-1]))
        coarse = _grid_search(params, phis, chis)[0]
        phis = np.union1d(_refined(phis, int(np.argmin(coarse))), [delta / 2])
        log.debug(_('security_error: searching {c} refined φ points').format(c=len(phis)))

    objective, eps_index, nu_index, best_eps, best_nu = _grid_search(params, phis, chis)
    best = int(np.argmin(objective))

    log_closed, _log_eps_closed, _log_nu_closed, terms = _closed_form(params)
    log_p = min(float(objective[best]), log_closed)
    p_d = _exp(log_p)
    log.debug(_('security_error: grid {g:.3e}, closed form {c:.3e}').format(
        g=_exp(float(objective[best])), c=_exp(log_closed)))
    return SecurityBreakdown(
        alpha=alpha,
        delta=delta,
        phi=float(phis[best]),
        chi_eps=float(chis[eps_index[best]]),
        chi_nu=float(chis[nu_index[best]]),
        m0_over_N=float(alpha - phis[best]),
        eps_phi=_exp(float(best_eps[best])),
        nu_phi=_exp(float(best_nu[best])),
        p_d=p_d,
        p_closed=_exp(log_closed),
        closed_terms=terms,
        neg_log2_p_d=float(-log_p / math.log(2)),
        vacuous=False,
        delta_convention=params.delta_convention,
    )
