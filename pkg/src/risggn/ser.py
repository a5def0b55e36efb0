"""Closed-form symbol error rates, their high-SNR expansions, and diversity.

The generic SER is a single Meijer G-function of order (2k, 2l; k+2l, 2k+l)
for noise shaping parameter alpha = l/k in lowest terms.  The three named
cases (gamma-like alpha=1/2, Laplacian alpha=1, Gaussian alpha=2) are also
provided as directly-constructed specializations, which the generic form must
reproduce to 1e-8; the test suite leans on that equality.

Constant conventions (all cross-checked against quadrature of the averaged
conditional SER and against Monte Carlo):

* the Q-function prefactor is 1/(2*Gamma(1/alpha)); a stray power of Lambda0
  sometimes seen multiplying it is dimensionally inconsistent and fails the
  Q(0) = 1/2 sanity check, so it appears nowhere here;
* the Gaussian-case prefactor is A*a1*a2 * 2^(a5+a4-a3-1) / pi, rederived
  mechanically from the generic form at (l, k) = (2, 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .exceptions import AsymptoticPoleError
from .ggn import lambda0
from .snr_stats import PdfParams
from .specfun import MeijerGSpec, _meijer_g_mp, generalized_q

_ORDER_CAP = 8        # largest supported k + l in the generic closed form
_SER_DPS = 50


class ApproximationWarning(RuntimeWarning):
    """Raw closed-form SER fell outside [0, 1]; the moment-matched PDF is
    breaking down at these parameters and the value was clamped."""


# ---------------------------------------------------------------------------
# modulation and noise-case descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Modulation:
    """Modulation constants of the conditional SER A*Q_alpha(sqrt(B*gamma))."""

    name: str
    A: float
    B: float


def bpsk() -> Modulation:
    return Modulation("bpsk", 1.0, 1.0)


def qpsk() -> Modulation:
    return Modulation("qpsk", 2.0, 2.0)


def _check_order(M: int):
    if M < 4 or (M & (M - 1)) != 0:
        raise ValueError(f"modulation order must be a power of two >= 4, got {M}")


def mpsk(M: int) -> Modulation:
    _check_order(M)
    return Modulation(f"{M}psk", 2.0, 2.0 * math.sin(math.pi / M) ** 2)


def rect_mqam(M: int) -> Modulation:
    _check_order(M)
    r = math.sqrt(M)
    return Modulation(f"{M}qam", 4.0 * (r - 1.0) / r, 3.0 / (r - 1.0))


@dataclass(frozen=True)
class NoiseCase:
    """Noise shaping parameter as an exact reduced fraction alpha = l/k."""

    name: str
    l: int
    k: int

    def __post_init__(self):
        if self.l < 1 or self.k < 1:
            raise ValueError(f"l and k must be positive integers, got l={self.l}, k={self.k}")
        if math.gcd(self.l, self.k) != 1:
            raise ValueError(f"l/k must be in lowest terms, got {self.l}/{self.k}")

    @property
    def alpha(self) -> float:
        return self.l / self.k


GAMMA_NOISE = NoiseCase("gamma", 1, 2)
LAPLACIAN = NoiseCase("laplacian", 1, 1)
GAUSSIAN = NoiseCase("gaussian", 2, 1)
_SPECIAL = {c.name: c for c in (GAMMA_NOISE, LAPLACIAN, GAUSSIAN)}


def general(l: int, k: int) -> NoiseCase:
    return NoiseCase(f"general({l}/{k})", l, k)


def noise_case(name: str) -> NoiseCase:
    try:
        return _SPECIAL[name]
    except KeyError:
        raise ValueError(f"unknown noise case {name!r}; choose from {sorted(_SPECIAL)}") from None


# ---------------------------------------------------------------------------
# conditional SER
# ---------------------------------------------------------------------------

def conditional_ser(mod: Modulation, alpha: float, gamma):
    """A * Q_alpha(sqrt(B*gamma)), clamped to [0, 1].  Vectorized over gamma."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("gamma must be >= 0")
    out = np.clip(mod.A * generalized_q(alpha, np.sqrt(mod.B * g)), 0.0, 1.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# generic closed form and its specializations
# ---------------------------------------------------------------------------

def _log_a1a2(params: PdfParams) -> mp.mpf:
    # log(a1*a2) rebuilt from the stored parameters; a1 itself may be out of
    # double range for very large N
    return (mp.loggamma(params.a3 + 1) - mp.loggamma(params.a4 + 1)
            - mp.loggamma(params.a5 + 1))


def _eq13_parts(mod: Modulation, case: NoiseCase, params: PdfParams, gamma_bar: float):
    """(spec, z, log-prefactor) of the generic SER expression."""
    l, k = case.l, case.k
    alpha = case.alpha
    a3, a4, a5 = params.a3, params.a4, params.a5
    a_upper = tuple((-a5 + j) / l for j in range(l)) + tuple((-a4 + j) / l for j in range(l)) \
        + tuple((1.0 + j) / k for j in range(k))
    b_lower = tuple(j / k for j in range(k)) + tuple((1.0 / alpha + j) / k for j in range(k)) \
        + tuple((-a3 + j) / l for j in range(l))
    spec = MeijerGSpec(m=2 * k, n=2 * l, a=a_upper, b=b_lower)
    z = (l ** l / k ** k) * lambda0(alpha) ** (alpha * k) * mod.B ** (alpha * k / 2.0) \
        * params.a2 ** l * gamma_bar ** (l / 2.0)
    ln_pref = (mp.log(mod.A) + _log_a1a2(params)
               + (1.0 / alpha - 0.5) * mp.log(k)
               + (mp.mpf(a5) + a4 - a3 + 0.5) * mp.log(l)
               - mp.log(2) - mp.loggamma(1.0 / alpha)
               - (mp.mpf(l - 1) / 2 + mp.mpf(k - 1) / 2) * mp.log(2 * mp.pi))
    return spec, z, ln_pref


def _special_parts(mod: Modulation, case: NoiseCase, params: PdfParams, gamma_bar: float):
    """Directly-constructed spec/argument/prefactor of the three named cases."""
    a3, a4, a5 = params.a3, params.a4, params.a5
    lnA = mp.log(mod.A) + _log_a1a2(params)
    if case.name == "gamma":
        spec = MeijerGSpec(m=4, n=2, a=(-a5, -a4, 0.5, 1.0), b=(0.0, 0.5, 1.0, 1.5, -a3))
        z = params.a2 * math.sqrt(mod.B * gamma_bar * 120.0) / 4.0
        ln_pref = lnA - 0.5 * mp.log(mp.pi)
    elif case.name == "laplacian":
        spec = MeijerGSpec(m=2, n=2, a=(-a5, -a4, 1.0), b=(0.0, 1.0, -a3))
        z = params.a2 * math.sqrt(2.0 * mod.B * gamma_bar)
        ln_pref = lnA - mp.log(2)
    elif case.name == "gaussian":
        spec = MeijerGSpec(m=2, n=4,
                           a=(-a5 / 2, (-a5 + 1) / 2, -a4 / 2, (-a4 + 1) / 2, 1.0),
                           b=(0.0, 0.5, -a3 / 2, (-a3 + 1) / 2))
        z = 2.0 * params.a2 ** 2 * mod.B * gamma_bar
        ln_pref = lnA + (mp.mpf(a5) + a4 - a3 - 1) * mp.log(2) - mp.log(mp.pi)
    else:
        raise ValueError(f"no special-case formula for noise case {case.name!r}")
    return spec, z, ln_pref


def _clamp(raw: float, warn: bool) -> float:
    if raw < 0.0 or raw > 1.0:
        if warn and (raw < -1e-12 or raw > 1.0 + 1e-12):
            warnings.warn(
                f"closed-form SER {raw!r} outside [0, 1]; clamped (moment-matched PDF "
                "breaking down at these parameters)", ApproximationWarning, stacklevel=3)
        return min(max(raw, 0.0), 1.0)
    return raw


def ser_closed_form(mod: Modulation, case: NoiseCase, params: PdfParams,
                    gamma_bar: float, tol: float = 1e-10) -> float:
    """Average SER from the generic Meijer-G expression."""
    if gamma_bar <= 0:
        raise ValueError(f"gamma_bar must be positive, got {gamma_bar}")
    if case.k + case.l > _ORDER_CAP:
        raise ValueError(f"k + l = {case.k + case.l} exceeds the engine order cap {_ORDER_CAP}")
    with mp.workdps(_SER_DPS):
        spec, z, ln_pref = _eq13_parts(mod, case, params, gamma_bar)
        g = _meijer_g_mp(spec, z, tol, "auto")
        raw = float(mp.exp(ln_pref) * g)
    return _clamp(raw, warn=True)


def ser_special(case: NoiseCase, mod: Modulation, params: PdfParams,
                gamma_bar: float, tol: float = 1e-10) -> float:
    """Average SER from the named special-case formulas (gamma/laplacian/gaussian)."""
    if gamma_bar <= 0:
        raise ValueError(f"gamma_bar must be positive, got {gamma_bar}")
    with mp.workdps(_SER_DPS):
        spec, z, ln_pref = _special_parts(mod, case, params, gamma_bar)
        g = _meijer_g_mp(spec, z, tol, "auto")
        raw = float(mp.exp(ln_pref) * g)
    return _clamp(raw, warn=True)


def _near_nonpositive_int(x: float) -> bool:
    return x < 0.5 and abs(x - round(x)) <= 1e-9


def ser_asymptotic(case: NoiseCase, mod: Modulation, params: PdfParams,
                   gamma_bar: float) -> float:
    """Leading high-SNR expansion of the special-case SER.

    One residue per left pole family: two gamma-ratio terms for the gamma-like
    and Laplacian cases, four for the Gaussian case.  The caller is
    responsible for gamma_bar being large enough; outside the asymptotic
    regime the raw value is returned unclamped (it can even be negative, the
    subdominant term enters with a negative gamma factor).
    """
    if gamma_bar <= 0:
        raise ValueError(f"gamma_bar must be positive, got {gamma_bar}")
    if case.name not in _SPECIAL:
        raise ValueError(f"asymptotic form only for the named cases, got {case.name!r}")
    with mp.workdps(_SER_DPS):
        spec, z, ln_pref = _special_parts(mod, case, params, gamma_bar)
        a, b, m, n = spec.a, spec.b, spec.m, spec.n
        zm = mp.mpf(z)
        total = mp.mpf(0)
        for h in range(n):
            ah = a[h]
            num = mp.mpf(1)
            for j in range(m):
                arg = 1.0 + b[j] - ah
                if _near_nonpositive_int(arg):
                    raise AsymptoticPoleError(
                        f"gamma factor at nonpositive integer {arg} in term {h + 1} "
                        f"({case.name}, N={params.n_elements})")
                num *= mp.gamma(arg)
            for i in range(n):
                if i != h:
                    arg = ah - a[i]
                    if _near_nonpositive_int(arg):
                        raise AsymptoticPoleError(
                            f"gamma factor at nonpositive integer {arg} in term {h + 1} "
                            f"({case.name}, N={params.n_elements})")
                    num *= mp.gamma(arg)
            den = mp.mpf(1)
            for j in range(m, spec.q):
                den *= mp.rgamma(ah - b[j])
            for i in range(n, spec.p):
                den *= mp.rgamma(1.0 + a[i] - ah)
            total += num * den * zm ** (mp.mpf(ah) - 1)
        return float(mp.exp(ln_pref) * total)


# ---------------------------------------------------------------------------
# diversity order
# ---------------------------------------------------------------------------

def diversity_asymptotic(params: PdfParams, case: NoiseCase | None = None) -> float:
    """min[(a5+1)/2, (a4+1)/2]; identical for every noise case by construction
    (equals (a5+1)/2 under the a5 <= a4 ordering the fit guarantees)."""
    return min((params.a5 + 1.0) / 2.0, (params.a4 + 1.0) / 2.0)


def diversity_empirical(curve):
    """Local log-log slopes -dlogP/dlog(gamma_bar) of an SER curve.

    ``curve`` is a sequence of (gamma_bar, ser) points with strictly increasing
    abscissae and positive SER; centered differences inside, one-sided at the
    ends.  Returns a list of (gamma_bar, slope) pairs.
    """
    pts = list(curve)
    if len(pts) < 2:
        raise ValueError("need at least 2 curve points")
    g = np.array([p[0] for p in pts], dtype=float)
    s = np.array([p[1] for p in pts], dtype=float)
    if np.any(np.diff(g) <= 0):
        raise ValueError("gamma_bar abscissae must be strictly increasing")
    if np.any(s <= 0):
        raise ValueError("SER values must be strictly positive")
    lg, ls = np.log(g), np.log(s)
    slopes = np.empty_like(lg)
    slopes[0] = -(ls[1] - ls[0]) / (lg[1] - lg[0])
    slopes[-1] = -(ls[-1] - ls[-2]) / (lg[-1] - lg[-2])
    if len(pts) > 2:
        slopes[1:-1] = -(ls[2:] - ls[:-2]) / (lg[2:] - lg[:-2])
    return list(zip(g.tolist(), slopes.tolist()))
