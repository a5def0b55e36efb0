"""Exact moments of the composite gain and the moment-matched SNR PDF fit.

The first four moments of Z are polynomials in pi with rational coefficients;
they are carried exactly and pi is substituted at 50+ digits only when the
fitted parameters are assembled.  This matters: the fit formulas difference
nearly equal O(N) quantities (at N=4 the a3 numerator is an O(1e-2) residue of
O(10) terms), so double precision would lose most significant digits here.

For N <= 3 the radicand inside a7 is negative (the four-moment match has no
real solution in this family) and the fit raises DegenerateFitError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .exceptions import DegenerateFitError
from .specfun import MeijerGSpec, _meijer_g_mp

_FIT_DPS = 60  # >= 50 digits carried through the cancelling differences


def _moment_pi_polys(n: int):
    """Moments mu1..mu4 of Z as {pi-power: Fraction} maps, exactly as printed
    (mu3 has three branches, mu4 four)."""
    N = n
    mu1 = {1: Fraction(N, 2)}
    mu2 = {0: Fraction(4 * N), 2: Fraction(N * (N - 1), 4)}
    if N >= 3:
        mu3 = {1: Fraction(9 * N, 2) + Fraction(6 * N * (N - 1)),
               3: Fraction(N * (N - 1) * (N - 2), 8)}
    elif N == 2:
        mu3 = {1: Fraction(21)}
    else:
        mu3 = {1: Fraction(9, 2)}
    if N >= 4:
        mu4 = {0: Fraction(64 * N + 48 * N * (N - 1)),
               2: Fraction(9 * N * (N - 1) + 6 * N * (N - 1) * (N - 2)),
               4: Fraction(N * (N - 1) * (N - 2) * (N - 3), 16)}
    elif N == 3:
        mu4 = {0: Fraction(480), 2: Fraction(90)}
    elif N == 2:
        mu4 = {0: Fraction(224), 2: Fraction(18)}
    else:
        mu4 = {0: Fraction(64)}
    return mu1, mu2, mu3, mu4


def _poly_eval_mp(poly) -> mp.mpf:
    pi = mp.pi
    acc = mp.mpf(0)
    for k, c in poly.items():
        acc += mp.mpf(c.numerator) / c.denominator * pi ** k
    return acc


@dataclass(frozen=True)
class MomentSet:
    """First four moments of Z (= sqrt(gamma) at gamma_bar = 1) for N elements."""

    mu1: float
    mu2: float
    mu3: float
    mu4: float
    n_elements: int

    def __post_init__(self):
        mus = (self.mu1, self.mu2, self.mu3, self.mu4)
        if any(not (m > 0 and math.isfinite(m)) for m in mus):
            raise ValueError(f"moments must be positive and finite, got {mus}")
        if self.mu2 < self.mu1 ** 2 * (1 - 1e-12):
            raise ValueError("mu2 >= mu1^2 violated")
        if self.mu4 * self.mu2 < self.mu3 ** 2 * (1 - 1e-12):
            raise ValueError("mu4*mu2 >= mu3^2 violated")


def moments(n_elements: int) -> MomentSet:
    """Closed-form mu1..mu4 for N reflecting elements."""
    if n_elements < 1:
        raise ValueError(f"n_elements must be >= 1, got {n_elements}")
    with mp.workdps(_FIT_DPS):
        vals = [float(_poly_eval_mp(p)) for p in _moment_pi_polys(n_elements)]
    return MomentSet(*vals, n_elements=n_elements)


@dataclass(frozen=True)
class PdfParams:
    """Parameters of the moment-matched Meijer-G SNR density.

    ``a1`` satisfies a1 = Gamma(a3+1)/(a2*Gamma(a4+1)*Gamma(a5+1)); its natural
    log is kept as well because a1 under/overflows doubles for very large N.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float
    varphi1: float
    varphi2: float
    varphi3: float
    varphi4: float
    log_a1: float
    n_elements: int


def fit_pdf_params(moment_set: MomentSet) -> PdfParams:
    """Fit a2..a7 (and a1) so the density reproduces mu1..mu4.

    Intermediate differences are taken at >= 50 significant digits; only the
    final parameters are rounded to doubles.  Raises DegenerateFitError when
    the radicand of a7 is negative (N <= 3) or a2/a3/a5 leave their domain.
    """
    with mp.workdps(_FIT_DPS):
        m1, m2, m3, m4 = [_poly_eval_mp(p) for p in _moment_pi_polys(moment_set.n_elements)]
        phi2, phi3, phi4 = m2 / m1, m3 / m2, m4 / m3
        a3 = (4 * phi4 - 9 * phi3 + 6 * phi2 - m1) / (-phi4 + 3 * phi3 - 3 * phi2 + m1)
        a2 = a3 / 2 * (phi4 - 2 * phi3 + phi2) + 2 * phi4 - 3 * phi3 + phi2
        if not a2 > 0:
            raise DegenerateFitError(
                f"a2 = {mp.nstr(a2, 12)} <= 0 for N={moment_set.n_elements} (a3 = {mp.nstr(a3, 12)})")
        if not a3 > -1:
            raise DegenerateFitError(
                f"a3 = {mp.nstr(a3, 12)} <= -1 for N={moment_set.n_elements}")
        core = (a3 * (phi2 - m1) + 2 * phi2 - m1) / a2
        a6 = core - 3
        radicand = (core - 1) ** 2 - 4 * m1 * (a3 + 1) / a2
        if radicand < 0:
            raise DegenerateFitError(
                f"negative radicand in a7 for N={moment_set.n_elements}: "
                f"radicand = {mp.nstr(radicand, 12)} with a2 = {mp.nstr(a2, 12)}, "
                f"a3 = {mp.nstr(a3, 12)}, a6 = {mp.nstr(a6, 12)} "
                "(the four-moment match has no real parameters here)")
        a7 = mp.sqrt(radicand)
        a4 = (a6 + a7) / 2
        a5 = (a6 - a7) / 2
        if not a5 > -1:
            raise DegenerateFitError(
                f"a5 = {mp.nstr(a5, 12)} <= -1 for N={moment_set.n_elements}")
        log_a1 = mp.loggamma(a3 + 1) - mp.log(a2) - mp.loggamma(a4 + 1) - mp.loggamma(a5 + 1)
        a1 = mp.exp(log_a1)
        return PdfParams(
            a1=float(a1), a2=float(a2), a3=float(a3), a4=float(a4), a5=float(a5),
            a6=float(a6), a7=float(a7),
            varphi1=float(m1), varphi2=float(phi2), varphi3=float(phi3), varphi4=float(phi4),
            log_a1=float(log_a1), n_elements=moment_set.n_elements,
        )


def _pdf_spec(params: PdfParams) -> MeijerGSpec:
    return MeijerGSpec(m=2, n=0, a=(params.a3 + 1.0,), b=(params.a5 + 1.0, params.a4 + 1.0))


def snr_pdf(params: PdfParams, gamma: float, gamma_bar: float) -> float:
    """Moment-matched density of the instantaneous SNR at ``gamma``.

    The gamma = 0 endpoint is defined as 0 by right-continuity (the G-factor
    vanishes faster than the 1/gamma prefactor blows up).
    """
    if gamma_bar <= 0:
        raise ValueError(f"gamma_bar must be positive, got {gamma_bar}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return 0.0
    z = math.sqrt(gamma / gamma_bar) / params.a2
    g = _meijer_g_mp(_pdf_spec(params), z, 1e-10, "auto")
    # a1*a2 = Gamma(a3+1)/(Gamma(a4+1)Gamma(a5+1)) can underflow doubles for
    # large N, so the product is assembled in mp before rounding
    with mp.workdps(40):
        ln_pref = (mp.loggamma(params.a3 + 1) - mp.loggamma(params.a4 + 1)
                   - mp.loggamma(params.a5 + 1))
        val = mp.exp(ln_pref) / (2 * gamma) * g
    return float(val)
