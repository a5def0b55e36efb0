"""Gamma-family helpers, the generalized Gaussian Q-function, and a numerical
Meijer G-function evaluator.

The G-function engine has two independent evaluation paths:

* a residue (Slater) series over the right pole families, usable when the
  poles of the Gamma(b_j - s) factors (j <= m) are all simple, i.e. no pair of
  the first m lower parameters is separated by an integer;
* numerical quadrature of the Mellin-Barnes integral along a vertical line
  through the midpoint of the pole-free strip, which handles coincident poles
  exactly (no epsilon-perturbation of parameters anywhere);

plus the order-swapping identity G^{m,n}_{p,q}(z | a; b) =
G^{n,m}_{q,p}(1/z | 1-b; 1-a) when the series in powers of z diverges
(p > q, or p == q with z >= 1).

All internal arithmetic runs in mpmath software floats at >= 30 significant
digits; the working precision is raised automatically when cancellation
between huge terms is detected.  Public entry points return ordinary floats.
Every function here is pure and results are bit-reproducible, so the module
is safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import special as sp

from .exceptions import MeijerConvergenceError, PoleCollisionError
from .ggn import lambda0

_INT_SEP_TOL = 1e-9      # closer than this to an integer separation counts as coincident
_MAX_DPS = 400
_MAX_SERIES_TERMS = 200_000
_MAX_PANELS = 40


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    if not (x > 0) or not math.isfinite(x):
        raise ValueError(f"ln_gamma requires finite x > 0, got {x}")
    return float(sp.gammaln(x))


# ---------------------------------------------------------------------------
# generalized Gaussian Q-function
# ---------------------------------------------------------------------------

def generalized_q(alpha: float, x):
    """Tail probability Q_alpha(x) of the unit-variance generalized Gaussian.

    Q_alpha(x) = alpha*Lambda0/(2*Gamma(1/alpha)) * int_x^inf exp(-(Lambda0 t)^alpha) dt,
    evaluated through the regularized upper incomplete gamma function of order
    1/alpha at argument (Lambda0*x)^alpha.  Vectorized over ``x``.
    """
    if not (alpha > 0) or not math.isfinite(alpha):
        raise ValueError(f"alpha must be positive and finite, got {alpha}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or not np.all(np.isfinite(xa)):
        raise ValueError("x must be finite and >= 0")
    out = 0.5 * sp.gammaincc(1.0 / alpha, (lambda0(alpha) * xa) ** alpha)
    return out if out.ndim else float(out)


def generalized_q_meijer(l: int, k: int, x: float) -> float:
    """Q_{l/k}(x) through the Meijer-G representation of the incomplete gamma.

    Exists as a cross-validation path for the G-function engine; agrees with
    :func:`generalized_q` at alpha = l/k.  Requires gcd(l, k) = 1.
    """
    if l < 1 or k < 1:
        raise ValueError("l and k must be positive integers")
    if math.gcd(l, k) != 1:
        raise ValueError(f"l/k must be in lowest terms, got {l}/{k}")
    if x < 0:
        raise ValueError("x must be >= 0")
    alpha = l / k
    if x == 0.0:
        return 0.5  # G argument hits 0; the limit is half by symmetry
    spec = MeijerGSpec(m=2, n=0, a=(1.0,), b=(0.0, 1.0 / alpha))
    z = (lambda0(alpha) * x) ** alpha
    g = _meijer_g_mp(spec, z, 1e-9, "auto")
    with mp.workdps(30):
        val = g / (2 * mp.gamma(mp.mpf(k) / l))
    return float(val)


# ---------------------------------------------------------------------------
# Meijer G
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeijerGSpec:
    """Orders and parameters of G^{m,n}_{p,q}[z | a_1..a_p ; b_1..b_q].

    The first ``m`` entries of ``b`` and the first ``n`` entries of ``a`` are
    the "left" groups that generate the two pole families of the integrand.
    """

    m: int
    n: int
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError(f"need 0 <= m <= q and 0 <= n <= p, got m={self.m} n={self.n} p={self.p} q={self.q}")
        if self.p + self.q < 1:
            raise ValueError("p + q must be >= 1")
        if not all(math.isfinite(v) for v in self.a + self.b):
            raise ValueError("parameters must be finite")
        for i in range(self.n):
            for j in range(self.m):
                d = self.a[i] - self.b[j]
                if d >= 0.5 and abs(d - round(d)) <= _INT_SEP_TOL and round(d) >= 1:
                    raise PoleCollisionError(
                        f"a[{i}]={self.a[i]} exceeds b[{j}]={self.b[j]} by the positive integer {round(d)}; "
                        "left and right pole families collide and no separating contour exists")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    @property
    def delta(self) -> float:
        """m + n - (p+q)/2; a vertical-line contour converges iff > 0 (real z > 0)."""
        return self.m + self.n - 0.5 * (self.p + self.q)


def _swap(spec: MeijerGSpec) -> MeijerGSpec:
    """Order-swapped spec: G_spec(z) == G_swap(1/z)."""
    return MeijerGSpec(
        m=spec.n, n=spec.m,
        a=tuple(1.0 - bj for bj in spec.b),
        b=tuple(1.0 - ai for ai in spec.a),
    )


def _near_int(d: float) -> bool:
    return abs(d - round(d)) <= _INT_SEP_TOL


def _series_legal(spec: MeijerGSpec, w: float) -> bool:
    """True if the Slater series converges for this spec at argument w."""
    if spec.m < 1:
        return False
    # for p == q the series is geometric in w; keep a margin away from w = 1
    if spec.p > spec.q or (spec.p == spec.q and w > 0.9):
        return False
    # coincident right poles: two of b[:m] separated by an integer
    for i in range(spec.m):
        for j in range(i + 1, spec.m):
            if _near_int(spec.b[i] - spec.b[j]):
                return False
    # a lower parameter of the right group exceeding b_h by a positive integer
    # puts a pole into every series term
    for j in range(spec.m, spec.q):
        for h in range(spec.m):
            d = spec.b[j] - spec.b[h]
            if d >= 0.5 and _near_int(d) and round(d) >= 1:
                return False
    return True


def _plan(spec: MeijerGSpec, z: float, strategy: str):
    """Deterministic strategy choice: (method, spec_used, argument)."""
    swapped = _swap(spec)
    zin = 1.0 / z
    if strategy == "contour":
        return ("contour", spec, z)
    if strategy == "series":
        if z <= 1.0 and _series_legal(spec, z):
            return ("series", spec, z)
        if _series_legal(swapped, zin):
            return ("series", swapped, zin)
        if _series_legal(spec, z):
            return ("series", spec, z)
        raise MeijerConvergenceError(
            f"no convergent residue series for this spec at z={z} (coincident poles or diverging expansion)")
    # auto: prefer the series with argument <= 1, then any series, then contour
    if z <= 1.0:
        order = [(spec, z), (swapped, zin)]
    else:
        order = [(swapped, zin), (spec, z)]
    for sp_, w in order:
        if _series_legal(sp_, w):
            return ("series", sp_, w)
    return ("contour", spec, z)


def meijer_g(spec: MeijerGSpec, z: float, tol: float = 1e-10, strategy: str = "auto") -> float:
    """Evaluate the Meijer G-function at real z > 0 to relative tolerance ``tol``.

    ``strategy`` is "auto" (default policy), or "series"/"contour" to force one
    path; the two paths agree wherever both apply, which is used by the test
    suite as an internal cross-check.
    """
    return float(_meijer_g_mp(spec, z, tol, strategy))


@lru_cache(maxsize=8192)
def _meijer_g_mp(spec: MeijerGSpec, z: float, tol: float, strategy: str):
    """mpmath-precision engine entry (cached; all arguments hashable)."""
    if not (z > 0) or not math.isfinite(z):
        raise ValueError(f"z must be positive and finite, got {z}")
    if not (0 < tol < 1):
        raise ValueError(f"tol must be in (0, 1), got {tol}")
    if strategy not in ("auto", "series", "contour"):
        raise ValueError(f"unknown strategy {strategy!r}")
    method, sp_used, w = _plan(spec, z, strategy)
    if method == "series":
        return _series_eval(sp_used, w, tol)
    return _contour_eval(sp_used, w, tol)


# -- residue (Slater) series ------------------------------------------------

def _series_once(spec: MeijerGSpec, z, tol):
    """One series pass at the current precision.

    Returns (total, lost_digits): ``lost_digits`` estimates the cancellation
    between the h-contributions and within each hypergeometric sum.
    """
    m, n, p, q = spec.m, spec.n, spec.p, spec.q
    a = [mp.mpf(v) for v in spec.a]
    b = [mp.mpf(v) for v in spec.b]
    sign = -1.0 if (p - m - n) % 2 else 1.0
    w = sign * z
    total = mp.mpf(0)
    biggest = mp.mpf(0)
    for h in range(m):
        bh = b[h]
        coef = mp.mpf(1)
        for j in range(m):
            if j != h:
                coef *= mp.gamma(b[j] - bh)
        for i in range(n):
            coef *= mp.gamma(1 + bh - a[i])
        for j in range(m, q):
            coef *= mp.rgamma(1 + bh - b[j])
        for i in range(n, p):
            coef *= mp.rgamma(a[i] - bh)
        upper = [1 + bh - a[i] for i in range(p)]
        lower = [1 + bh - b[j] for j in range(q) if j != h]
        term = mp.mpf(1)
        ssum = mp.mpf(1)
        maxt = mp.mpf(1)
        small_streak = 0
        k = 0
        while True:
            num = mp.mpf(1)
            for u in upper:
                num *= (u + k)
            den = mp.mpf(k + 1)
            for v in lower:
                den *= (v + k)
            term = term * num / den * w
            if term == 0:
                break  # terminating series (an upper parameter hit a nonpositive integer)
            ssum += term
            at = abs(term)
            if at > maxt:
                maxt = at
                small_streak = 0
            elif at <= mp.eps * max(abs(ssum), maxt):
                # below the roundoff floor of the partial sum twice in a row
                small_streak += 1
                if small_streak >= 2:
                    break
            else:
                small_streak = 0
            k += 1
            if k > _MAX_SERIES_TERMS:
                raise MeijerConvergenceError(
                    f"residue series did not converge within {_MAX_SERIES_TERMS} terms (|z|={float(z)})")
        piece = coef * mp.power(z, bh)
        total += piece * ssum
        biggest = max(biggest, abs(piece) * maxt, abs(piece * ssum))
    if total == 0:
        return total, None
    lost = float(mp.log10(biggest / abs(total))) if biggest > abs(total) else 0.0
    return total, lost


def _series_eval(spec: MeijerGSpec, z: float, tol: float):
    target = -math.log10(tol)
    dps = max(30, int(target) + 12)
    while True:
        with mp.workdps(dps):
            total, lost = _series_once(spec, mp.mpf(z), tol)
        if lost is not None and dps - lost >= target + 5:
            return total
        needed = int((lost if lost is not None else dps) + target + 15)
        if needed <= dps:
            needed = dps + 20
        if needed > _MAX_DPS:
            raise MeijerConvergenceError(
                f"residue series cancellation exceeds precision ceiling ({_MAX_DPS} digits) at z={z}")
        dps = needed


# -- Mellin-Barnes contour quadrature ----------------------------------------

def _contour_abscissa(spec: MeijerGSpec) -> float:
    """Midpoint of the pole-free strip between the left and right families."""
    if spec.m < 1:
        raise MeijerConvergenceError("contour path needs m >= 1")
    right = min(spec.b[: spec.m])
    if spec.n:
        left = max(spec.a[: spec.n]) - 1.0
    else:
        left = right - 1.0
    if not left < right - 1e-12:
        raise MeijerConvergenceError(
            f"empty pole-free strip (left {left} >= right {right}); a deformed contour would be "
            "needed, which is outside the supported parameter family")
    return 0.5 * (left + right)


def _contour_eval(spec: MeijerGSpec, z: float, tol: float):
    if spec.delta <= 0:
        raise MeijerConvergenceError(
            f"vertical-line contour diverges for these orders (delta={spec.delta})")
    c = _contour_abscissa(spec)
    m, n, p, q = spec.m, spec.n, spec.p, spec.q
    target = -math.log10(tol)
    dps = max(30, int(target) + 12)
    retries = 0
    while True:
        with mp.workdps(dps):
            a = [mp.mpf(v) for v in spec.a]
            b = [mp.mpf(v) for v in spec.b]
            lnz = mp.log(mp.mpf(z))
            cc = mp.mpf(c)

            def integrand(t):
                s = mp.mpc(cc, t)
                w = s * lnz
                for j in range(m):
                    w += mp.loggamma(b[j] - s)
                for i in range(n):
                    w += mp.loggamma(1 - a[i] + s)
                for j in range(m, q):
                    w -= mp.loggamma(1 - b[j] + s)
                for i in range(n, p):
                    w -= mp.loggamma(a[i] - s)
                return mp.re(mp.exp(w))

            peak = abs(integrand(mp.mpf(0)))
            acc = mp.mpf(0)
            err_acc = mp.mpf(0)
            t0 = mp.mpf(0)
            width = mp.mpf(1)
            panels = 0
            while True:
                t1 = t0 + width
                val, est = mp.quad(integrand, [t0, t1], error=True)
                acc += val
                err_acc += est
                panels += 1
                # deterministic truncation: stop once the freshest panel is
                # negligible against the accumulated integral
                if panels >= 3 and abs(val) <= mp.mpf(tol) / 10 * abs(acc):
                    break
                if panels >= _MAX_PANELS:
                    raise MeijerConvergenceError(
                        f"contour truncation bound reached (abscissa c={c}, t up to {float(t1)}, "
                        f"{panels} panels) without meeting tol={tol}")
                t0 = t1
                if panels >= 2:
                    width *= 2
            result = acc / mp.pi
        if result != 0:
            lost = float(mp.log10(peak / abs(result))) if peak > abs(result) else 0.0
            quad_ok = err_acc <= abs(acc) * mp.mpf(tol) / 4 + mp.mpf(10) ** (-dps + 3)
            if dps - lost >= target + 5 and quad_ok:
                return result
        retries += 1
        if retries > 6:
            raise MeijerConvergenceError(
                f"contour quadrature failed to stabilize (abscissa c={c}, dps={dps}, z={z})")
        bump = int(lost + target + 15) if result != 0 else dps + 25
        dps = max(dps + 15, bump)
        if dps > _MAX_DPS:
            raise MeijerConvergenceError(
                f"contour cancellation exceeds precision ceiling ({_MAX_DPS} digits) at z={z} (abscissa c={c})")
