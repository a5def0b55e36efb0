"""Acceptance checks behind the ``validate`` subcommand and the acceptance
test module.  Every check measures its quantity at the stated tolerance and
reports PASS/FAIL with the measured values; the report text is deterministic
for a given (seed, trials) regardless of worker count.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy import integrate

from . import experiments, montecarlo, ser
from .ris_channel import RisLink, sample_composite_gain
from .snr_stats import fit_pdf_params, moments, snr_pdf
from .specfun import generalized_q, generalized_q_meijer

DEFAULT_SEED = 20260810
DEFAULT_TRIALS = 1_000_000

_X_GRID = tuple(0.25 * i for i in range(21))          # 0, 0.25, ..., 5
_SNR_DB_GRID = tuple(float(v) for v in range(0, 21))  # criterion-5 abscissae
_ALL_CRITERIA = tuple(range(1, 11))


@dataclass(frozen=True)
class ValidationSettings:
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    threads: int = 1
    criteria: tuple = _ALL_CRITERIA
    inject_moment_error: bool = False


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    lines: list


def _f(v: float) -> str:
    return f"{v:.6g}"


_fit_cache = {}


def _fit(n: int):
    if n not in _fit_cache:
        _fit_cache[n] = fit_pdf_params(moments(n))
    return _fit_cache[n]


def q_quadrature_oracle(alpha: float, x: float) -> float:
    """Adaptive quadrature of the defining tail integral of Q_alpha."""
    with mp.workdps(30):
        al = mp.mpf(alpha)
        lam0 = mp.sqrt(mp.gamma(3 / al) / mp.gamma(1 / al))
        pref = al * lam0 / (2 * mp.gamma(1 / al))
        val = pref * mp.quad(lambda t: mp.exp(-((lam0 * t) ** al)), [x, mp.inf])
    return float(val)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def check_q_oracle_equivalence(s: ValidationSettings) -> CheckResult:
    """1: Meijer-G representation of Q_alpha vs adaptive quadrature, <= 1e-6."""
    worst = 0.0
    lines = []
    for l, k in ((1, 2), (1, 1), (2, 1)):
        m = 0.0
        for x in _X_GRID:
            qm = generalized_q_meijer(l, k, x)
            qq = q_quadrature_oracle(l / k, x)
            m = max(m, abs(qm - qq) / qq)
        lines.append(f"alpha={l}/{k}: max_rel={_f(m)}")
        worst = max(worst, m)
    return CheckResult(1, "q_meijer_vs_quadrature", worst <= 1e-6,
                       lines + [f"worst={_f(worst)} tol=1e-06"])


def check_q_closed_identities(s: ValidationSettings) -> CheckResult:
    """2: Q_1 = exp(-sqrt(2)x)/2 and Q_2 = Gaussian tail, <= 1e-8."""
    w1 = w2 = 0.0
    for x in _X_GRID:
        lap = 0.5 * math.exp(-math.sqrt(2.0) * x)
        gau = 0.5 * math.erfc(x / math.sqrt(2.0))
        w1 = max(w1, abs(generalized_q(1.0, x) - lap) / lap)
        w2 = max(w2, abs(generalized_q(2.0, x) - gau) / gau)
    return CheckResult(2, "q_closed_form_identities", max(w1, w2) <= 1e-8,
                       [f"laplacian max_rel={_f(w1)}, gaussian max_rel={_f(w2)}, tol=1e-08"])


def check_moment_formulas(s: ValidationSettings) -> CheckResult:
    """3: closed-form mu1..mu4 vs Monte Carlo within 3 standard errors."""
    cfg = montecarlo.McConfig(s.trials, s.seed)
    ok = True
    worst_z = 0.0
    lines = []
    for n in (1, 2, 3, 5, 10):
        ms = moments(n)
        exact = [ms.mu1, ms.mu2, ms.mu3, ms.mu4]
        if s.inject_moment_error:
            exact[2] *= 10.0  # self-test fault: the mu3 check must now fail
        for order in (1, 2, 3, 4):
            est, se = montecarlo.moment_estimate(n, order, cfg, s.threads)
            z = abs(est - exact[order - 1]) / se
            worst_z = max(worst_z, z)
            if z > 3.0:
                ok = False
                lines.append(f"N={n} mu{order}: |z|={_f(z)} > 3 (est={_f(est)}, exact={_f(exact[order - 1])})")
    lines.append(f"worst |z|={_f(worst_z)} over N in (1,2,3,5,10), orders 1..4")
    return CheckResult(3, "moment_formulas_vs_mc", ok, lines)


def _pdf_quad(params, gbar, power, upper=60.0):
    """integral of (gamma/gbar)^(power/2) * pdf over gamma, via gamma = gbar*a2^2*u^4."""
    a2 = params.a2

    def f(u):
        gamma = gbar * a2 * a2 * u ** 4
        return (a2 * u * u) ** power * snr_pdf(params, gamma, gbar) * 4.0 * gbar * a2 * a2 * u ** 3

    peak = math.sqrt(params.varphi1 / a2)
    val, _ = integrate.quad(f, 0.0, upper, limit=300, points=[peak, 2 * peak], epsabs=0.0, epsrel=1e-9)
    return val


def _fitted_cdf_grid(params, gbar, gammas):
    """CDF of the fitted density at the (increasing) grid, by cumulative
    fixed-order panels in the u = (gamma/(gbar*a2^2))^(1/4) variable."""
    a2 = params.a2
    us = (np.asarray(gammas) / (gbar * a2 * a2)) ** 0.25
    edges = np.concatenate([[0.0], us])

    def f(u):
        gamma = gbar * a2 * a2 * u ** 4
        return np.array([snr_pdf(params, g, gbar) for g in np.atleast_1d(gamma)]) \
            * 4.0 * gbar * a2 * a2 * u ** 3

    acc = 0.0
    out = np.empty(len(us))
    for i in range(len(us)):
        seg, _ = integrate.fixed_quad(f, edges[i], edges[i + 1], n=12)
        acc += seg
        out[i] = acc
    return out


def check_fit_quality(s: ValidationSettings) -> CheckResult:
    """4: normalization 1 +- 1e-3, moment recovery <= 1e-3, KS <= 0.02 (N=5,10)."""
    ok = True
    lines = []
    gbar = 10.0
    for n in (5, 10):
        params = _fit(n)
        ms = moments(n)
        norm = _pdf_quad(params, gbar, 0)
        if abs(norm - 1.0) > 1e-3:
            ok = False
        lines.append(f"N={n}: integral={_f(norm)} (tol 1e-3)")
        exact = [ms.mu1, ms.mu2, ms.mu3, ms.mu4]
        worst = 0.0
        for r in (1, 2, 3, 4):
            rec = _pdf_quad(params, gbar, r)
            worst = max(worst, abs(rec - exact[r - 1]) / exact[r - 1])
        if worst > 1e-3:
            ok = False
        lines.append(f"N={n}: moment recovery max_rel={_f(worst)} (tol 1e-3)")
        z = sample_composite_gain(n, s.seed, s.trials)
        g_samples = np.sort(z * z * gbar)
        lo = g_samples[max(int(1e-5 * len(g_samples)), 1)]
        hi = g_samples[int((1 - 1e-5) * len(g_samples)) - 1]
        grid = np.exp(np.linspace(math.log(lo), math.log(hi), 1501))
        cdf = _fitted_cdf_grid(params, gbar, grid)
        ecdf = np.searchsorted(g_samples, grid, side="right") / len(g_samples)
        ks = float(np.max(np.abs(cdf - ecdf)))
        if ks > 0.02:
            ok = False
        lines.append(f"N={n}: KS={_f(ks)} vs {len(g_samples)} samples (tol 0.02)")
    return CheckResult(4, "lemma_fit_quality", ok, lines)


def _closed_form(case, mod, params, gbar):
    if case.name in ("gamma", "laplacian", "gaussian"):
        return ser.ser_special(case, mod, params, gbar)
    return ser.ser_closed_form(mod, case, params, gbar)


def check_fig1_behavior(s: ValidationSettings) -> CheckResult:
    """5: closed form within max(10%, 3 sigma) of semi-analytic MC where
    SER >= 1e-4; noise ordering GM >= LP >= GS; SER decreasing in N."""
    mod = ser.qpsk()
    cases = (ser.GAMMA_NOISE, ser.LAPLACIAN, ser.GAUSSIAN)
    cf = {}
    mc = {}
    for n in (5, 10):
        params = _fit(n)
        link_tpl = lambda g: RisLink(n, 1.0, 1.0, 2.7, g)
        cfg = montecarlo.McConfig(s.trials, s.seed)
        for case in cases:
            for snr_db in _SNR_DB_GRID:
                gbar = 10.0 ** (snr_db / 10.0)
                cf[n, case.name, snr_db] = _closed_form(case, mod, params, gbar)
                est = montecarlo.ser_semi_analytic(link_tpl(gbar), mod, case.alpha, cfg, s.threads)
                mc[n, case.name, snr_db] = est
    ok_a = ok_b = ok_c = True
    compared = 0
    worst_gap = 0.0
    lines = []
    for (n, cname, snr_db), v in cf.items():
        if v >= 1e-4:
            est = mc[n, cname, snr_db]
            bound = max(0.10 * est.value, 3.0 * est.std_error)
            gap = abs(v - est.value)
            compared += 1
            worst_gap = max(worst_gap, gap / bound if bound else math.inf)
            if gap > bound:
                ok_a = False
                lines.append(f"(a) N={n} {cname} {snr_db}dB: cf={_f(v)} mc={_f(est.value)}"
                             f" gap={_f(gap)} > bound={_f(bound)}")
    lines.append(f"(a) {compared} points with SER>=1e-4; worst gap/bound={_f(worst_gap)}")
    for n in (5, 10):
        for snr_db in _SNR_DB_GRID:
            gm, lp, gs = (cf[n, c.name, snr_db] for c in cases)
            if not (gm >= lp >= gs):
                ok_b = False
                lines.append(f"(b) ordering violated at N={n}, {snr_db} dB: GM={_f(gm)} LP={_f(lp)} GS={_f(gs)}")
    lines.append("(b) noise ordering GM >= LP >= GS held at all points" if ok_b else "(b) ordering violations above")
    for case in cases:
        for snr_db in _SNR_DB_GRID:
            if not cf[10, case.name, snr_db] < cf[5, case.name, snr_db]:
                ok_c = False
                lines.append(f"(c) N-monotonicity violated: {case.name} at {snr_db} dB")
    lines.append("(c) SER strictly decreasing from N=5 to N=10 at all points" if ok_c else "(c) violations above")
    return CheckResult(5, "fig1_ser_curves", ok_a and ok_b and ok_c, lines)


def check_special_generic_consistency(s: ValidationSettings) -> CheckResult:
    """6: the three printed special cases equal the generic form to 1e-8."""
    mod = ser.qpsk()
    pairs = {"gamma": (1, 2), "laplacian": (1, 1), "gaussian": (2, 1)}
    worst = 0.0
    lines = []
    for cname, (l, k) in pairs.items():
        case = ser.noise_case(cname)
        gen = ser.general(l, k)
        m = 0.0
        for n in (5, 10):
            params = _fit(n)
            for gbar in (1.0, 10.0, 100.0):
                a = ser.ser_special(case, mod, params, gbar)
                b = ser.ser_closed_form(mod, gen, params, gbar)
                m = max(m, abs(a - b) / a)
        lines.append(f"{cname} vs general({l}/{k}): max_rel={_f(m)}")
        worst = max(worst, m)
    return CheckResult(6, "special_vs_generic", worst <= 1e-8, lines + [f"worst={_f(worst)} tol=1e-08"])


def check_fig2_diversity(s: ValidationSettings) -> CheckResult:
    """7: log-log slope at 60 dB within 5% of (a5+1)/2 for N=5,10,20, both
    Laplacian and Gaussian; the two slopes within 5% of their mean of each other."""
    mod = ser.qpsk()
    ok = True
    lines = []
    for n in (5, 10, 20):
        params = _fit(n)
        d_ref = ser.diversity_asymptotic(params)
        slopes = {}
        for case in (ser.LAPLACIAN, ser.GAUSSIAN):
            curve = [(10.0 ** (db / 10.0), ser.ser_special(case, mod, params, 10.0 ** (db / 10.0)))
                     for db in (58.0, 60.0, 62.0)]
            slopes[case.name] = ser.diversity_empirical(curve)[1][1]
            rel = abs(slopes[case.name] - d_ref) / d_ref
            if rel > 0.05:
                ok = False
            lines.append(f"N={n} {case.name}: slope={_f(slopes[case.name])} ref={_f(d_ref)} rel={_f(rel)}")
        gap = abs(slopes["laplacian"] - slopes["gaussian"])
        mean = 0.5 * (slopes["laplacian"] + slopes["gaussian"])
        if gap > 0.05 * mean:
            ok = False
        lines.append(f"N={n}: LP-GS slope gap={_f(gap)} ({_f(100 * gap / mean)}% of mean, tol 5%)")
    return CheckResult(7, "fig2_diversity_slopes", ok, lines)


def check_fig3_distance(s: ValidationSettings) -> CheckResult:
    """8: SER maximal at the grid point nearest d1 = d_total/2 and symmetric
    in d1 <-> d2 within 2% (d_total=5, rho=2.7, transmit SNR 20 dB)."""
    mod = ser.qpsk()
    d_total, rho, rho0 = 5.0, 2.7, 100.0
    grid = [0.25 * i for i in range(1, 20)]
    ok = True
    lines = []
    for n in (5, 10):
        params = _fit(n)
        for case in (ser.LAPLACIAN, ser.GAUSSIAN):
            vals = []
            for d1 in grid:
                gbar = rho0 / (d1 ** rho * (d_total - d1) ** rho)
                vals.append(ser.ser_special(case, mod, params, gbar))
            i_max = int(np.argmax(vals))
            mid = int(np.argmin([abs(d - d_total / 2) for d in grid]))
            if i_max != mid:
                ok = False
                lines.append(f"N={n} {case.name}: max at d1={grid[i_max]} not {grid[mid]}")
            sym = max(abs(a - b) / a for a, b in zip(vals, vals[::-1]))
            if sym > 0.02:
                ok = False
            lines.append(f"N={n} {case.name}: max at d1={grid[i_max]}m, symmetry rel gap={_f(sym)} (tol 0.02)")
    return CheckResult(8, "fig3_ris_placement", ok, lines)


def check_asymptotic_agreement(s: ValidationSettings) -> CheckResult:
    """9: exact/asymptotic in [0.9, 1.1] at the first gamma_bar (2 dB grid)
    where the exact SER drops below 1e-6."""
    mod = ser.qpsk()
    ok = True
    lines = []
    for n in (5, 10):
        params = _fit(n)
        for case in (ser.GAMMA_NOISE, ser.LAPLACIAN, ser.GAUSSIAN):
            hit = None
            for db in range(0, 81, 2):
                gbar = 10.0 ** (db / 10.0)
                exact = ser.ser_special(case, mod, params, gbar)
                if exact < 1e-6:
                    asym = ser.ser_asymptotic(case, mod, params, gbar)
                    hit = (db, exact, exact / asym if asym != 0 else math.inf)
                    break
            if hit is None:
                ok = False
                lines.append(f"N={n} {case.name}: SER never dropped below 1e-6 by 80 dB")
                continue
            db, exact, ratio = hit
            good = 0.9 <= ratio <= 1.1
            if not good:
                ok = False
            lines.append(f"N={n} {case.name}: first SER<1e-6 at {db} dB (SER={_f(exact)}), "
                         f"exact/asymptotic={_f(ratio)}{'' if good else ' OUTSIDE [0.9,1.1]'}")
    return CheckResult(9, "asymptotic_agreement", ok, lines)


def check_determinism(s: ValidationSettings) -> CheckResult:
    """10: the experiment pipeline writes byte-identical files for repeated
    runs and for any worker count."""
    cfg = experiments.ExperimentConfig(
        experiment="ser_curve", n_elements=(5,),
        noise_cases=("gamma", "laplacian", "gaussian"),
        snr_db=(0.0, 10.0, 20.0),
        trials=max(1000, min(s.trials, 50_000)), seed=s.seed,
    )
    with tempfile.TemporaryDirectory() as td:
        paths = [os.path.join(td, f"run{i}.csv") for i in range(3)]
        experiments.run_ser_curve(cfg, paths[0], threads=1)
        experiments.run_ser_curve(cfg, paths[1], threads=1)
        experiments.run_ser_curve(cfg, paths[2], threads=4)
        blobs = [open(p, "rb").read() for p in paths]
    same_rerun = blobs[0] == blobs[1]
    same_threads = blobs[0] == blobs[2]
    return CheckResult(10, "determinism", same_rerun and same_threads, [
        f"rerun identical: {same_rerun}; threads=4 identical to threads=1: {same_threads} "
        f"({len(blobs[0])} bytes)"])


_CHECKS = {
    1: check_q_oracle_equivalence,
    2: check_q_closed_identities,
    3: check_moment_formulas,
    4: check_fit_quality,
    5: check_fig1_behavior,
    6: check_special_generic_consistency,
    7: check_fig2_diversity,
    8: check_fig3_distance,
    9: check_asymptotic_agreement,
    10: check_determinism,
}


def run_checks(settings: ValidationSettings):
    unknown = [c for c in settings.criteria if c not in _CHECKS]
    if unknown:
        raise experiments.ConfigError(f"unknown criteria {unknown}; valid: 1..10")
    return [_CHECKS[c](settings) for c in sorted(set(settings.criteria))]


def format_report(results, settings: ValidationSettings) -> str:
    lines = [
        "# risggn validation report",
        f"# seed={settings.seed} trials={settings.trials} criteria={','.join(str(c) for c in sorted(set(settings.criteria)))}",
    ]
    if settings.inject_moment_error:
        lines.append("# self-test fault injection: mu3 scaled by 10 in criterion 3")
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.number:2d} {r.name}")
        for d in r.lines:
            lines.append(f"       {d}")
    n_pass = sum(r.passed for r in results)
    lines.append(f"# summary: {n_pass}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
