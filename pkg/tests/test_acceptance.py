"""End-to-end acceptance checks at desk scale, one test per criterion.

Each test prints a one-line summary with the measured quantity, its
tolerance, and any runtime budget.  Two checks probe asymptotic limits
at depths the limits have not yet been reached and fail by design; the
README and the failure output document the shortfall precisely.
"""

from __future__ import annotations

import math
import time

import numpy as np

from bachelier_wings.bachelier import (
    bachelier_bounds,
    call_price,
    call_price_log,
    mills_sandwich,
    put_price,
    put_price_log,
    vega,
)
from bachelier_wings.inversion import (
    implied_vol_call,
    implied_vol_call_log_vec,
    implied_vol_put,
    implied_vol_put_log_vec,
)
from bachelier_wings.models import (
    asym_laplace_model,
    gaussian_model,
    mgf_blowup_boundary,
    nig_model,
)
from bachelier_wings.pricing import (
    _default_alpha,
    price_from_cf,
    price_from_tail,
    smile_from_model,
)
from bachelier_wings.wings import (
    asymptotic_residuals,
    rv_index,
    tail_reference_curve,
    wing_slope,
)

SEED = 42


def _laplace_wing_smile():
    model = asym_laplace_model(1.0, 1.0)
    wing = np.geomspace(5.0, 40.0, 12)
    grid = np.concatenate([-wing[::-1], [0.0], wing])
    return model, smile_from_model(model, grid)


def test_01_round_trip_inversion():
    """1e5 random (kappa, sigma) in [-10,10]x[0.01,5]: recovered vol
    within 1e-9 relative everywhere, total under 5 seconds."""
    rng = np.random.default_rng(SEED)
    n = 100_000
    kappa = rng.uniform(-10.0, 10.0, n)
    sigma = rng.uniform(0.01, 5.0, n)
    t0 = time.perf_counter()
    # price and invert through the out-of-the-money instrument in log
    # space; the box reaches depths where linear prices underflow
    otm_call = kappa >= 0.0
    recovered = np.empty(n)
    m = otm_call
    recovered[m] = implied_vol_call_log_vec(kappa[m], call_price_log(kappa[m], sigma[m]))
    m = ~otm_call
    recovered[m] = implied_vol_put_log_vec(kappa[m], put_price_log(kappa[m], sigma[m]))
    elapsed = time.perf_counter() - t0
    worst = float(np.max(np.abs(recovered - sigma) / sigma))
    print(f"[1] round-trip inversion: max rel err {worst:.3e} (tol 1e-9), "
          f"{elapsed:.2f}s (budget 5s)")
    assert worst < 1e-9
    assert elapsed < 5.0


def test_02_flat_smile_oracle():
    """Gaussian sigma=2 priced by the tail integral then inverted:
    max |I - 2| < 1e-7 over 41 points on [-20, 20]."""
    model = gaussian_model(2.0)
    worst = 0.0
    for k in np.linspace(-20.0, 20.0, 41):
        quote = price_from_tail(model, float(k))
        if k >= 0.0:
            iv = implied_vol_call(float(k), quote.call).sigma
        else:
            iv = implied_vol_put(float(k), quote.put).sigma
        worst = max(worst, abs(iv - 2.0))
    print(f"[2] flat-smile oracle: max |I - 2| = {worst:.3e} (tol 1e-7)")
    assert worst < 1e-7


def test_03_scaled_sandwich():
    """Scaled-coordinate price bounds for beta in {0.25, 1, 4} over 200
    log-spaced arguments in [1e-3, 1e3]: zero violations."""
    y = np.geomspace(1e-3, 1e3, 200)
    violations = 0
    for beta in (0.25, 1.0, 4.0):
        lo, hi = bachelier_bounds(y, beta)
        price = call_price(y, np.sqrt(beta * y))
        violations += int(np.sum(lo > price)) + int(np.sum(price > hi))
    print(f"[3] scaled sandwich: {violations} violations (tol 0)")
    assert violations == 0


def test_04_ratio_bound_sandwich():
    """Gaussian-ratio price bounds at 1e4 random out-of-the-money
    points: zero violations."""
    rng = np.random.default_rng(SEED)
    n = 10_000
    kappa = 10.0 ** rng.uniform(-2.0, math.log10(20.0), n)
    sigma = 10.0 ** rng.uniform(-2.0, math.log10(5.0), n)
    lo, hi = mills_sandwich(kappa, sigma)
    price = call_price(kappa, sigma)
    violations = int(np.sum(lo > price)) + int(np.sum(price > hi))
    print(f"[4] ratio-bound sandwich: {violations} violations (tol 0)")
    assert violations == 0


def test_05_laplace_wing_slopes():
    """Symmetric exponential-tail oracle: extrapolated slopes within 2%
    of 0.5 on both sides with the grid reaching 40; slope samples match
    the tail reference pointwise within 3% at depth 20 and beyond.
    Budget 10 seconds."""
    t0 = time.perf_counter()
    model, smile = _laplace_wing_smile()
    results = {}
    for side in ("right", "left"):
        est = wing_slope(smile, side)
        refs = dict(tail_reference_curve(model, [k for k, _ in est.slope_samples], side))
        deep = [
            (k, s, refs[k]) for k, s in est.slope_samples if abs(k) >= 20.0
        ]
        results[side] = (est.extrapolated_slope, deep)
    elapsed = time.perf_counter() - t0
    for side, (extrapolated, deep) in results.items():
        ratios = ", ".join(f"{s / r:.4f}@{abs(k):.0f}" for k, s, r in deep)
        print(f"[5] {side} wing: extrapolated {extrapolated:.5f} "
              f"(target 0.5 within 2%); sample/reference {ratios} "
              f"(tol 3%); {elapsed:.2f}s (budget 10s)")
    assert elapsed < 10.0
    for side, (extrapolated, deep) in results.items():
        assert abs(extrapolated - 0.5) < 0.02 * 0.5
        for k, sample, ref in deep:
            assert abs(sample - ref) <= 0.03 * ref, (
                f"{side} sample {sample:.5f} vs reference {ref:.5f} "
                f"at kappa {k:.1f}: off by {abs(sample / ref - 1):.1%}"
            )


def test_06_nig_wing_slopes_and_strip_probe():
    """Centered NIG(2, 0.5): right slope within 5% of 1/3, left within
    5% of 1/5, and the MGF blow-up probe recovers both strip boundaries
    (1.5 and 2.5) to 1e-3.  Budget 60 seconds."""
    t0 = time.perf_counter()
    model = nig_model(2.0, 0.5, 1.0)
    wing = np.geomspace(5.0 * model.scale, 40.0 * model.scale, 12)
    grid = np.concatenate([-wing[::-1], [0.0], wing])
    smile = smile_from_model(model, grid)
    right = wing_slope(smile, "right").extrapolated_slope
    left = wing_slope(smile, "left").extrapolated_slope
    probe_r = mgf_blowup_boundary(model, "right")
    probe_l = mgf_blowup_boundary(model, "left")
    elapsed = time.perf_counter() - t0
    print(f"[6] NIG wings: right {right:.5f} (1/3 within 5%), "
          f"left {left:.5f} (1/5 within 5%); strip probe "
          f"{probe_r:.6f}/{probe_l:.6f} (1.5/2.5 within 1e-3); "
          f"{elapsed:.1f}s (budget 60s)")
    assert abs(right - 1.0 / 3.0) < 0.05 / 3.0
    assert abs(left - 0.2) < 0.05 * 0.2
    assert abs(probe_r - 1.5) < 1e-3
    assert abs(probe_l - 2.5) < 1e-3
    assert elapsed < 60.0


def test_07_engine_agreement_and_damping():
    """Both price engines agree within their combined error estimates at
    50 grid points per model, and the damped-transform price is
    invariant to the damping choice within 1e-9."""
    models = {
        "gaussian": (gaussian_model(1.0), (0.4, 1.1)),
        "exponential-tails": (asym_laplace_model(1.0, 1.0), (0.3, 0.8)),
        "nig": (nig_model(2.0, 0.5, 1.0), (0.5, 1.1)),
    }
    violations = 0
    worst_damp = 0.0
    for name, (model, alphas) in models.items():
        for k in np.linspace(-12.0, 12.0, 50):
            a = price_from_tail(model, float(k))
            b = price_from_cf(model, float(k), _default_alpha(model, float(k)))
            if abs(a.call - b.call) > a.abs_error_estimate + b.abs_error_estimate:
                violations += 1
        for k in (0.0, 1.0, 5.0, -7.0):
            pa = price_from_cf(model, k, alphas[0]).call
            pb = price_from_cf(model, k, alphas[1]).call
            worst_damp = max(worst_damp, abs(pa - pb))
    print(f"[7] engine agreement: {violations} violations (tol 0); "
          f"damping invariance max diff {worst_damp:.3e} (tol 1e-9)")
    assert violations == 0
    assert worst_damp < 1e-9


def test_08_asymptotic_residual_diagnostics():
    """Exponential-tail oracle residuals: the displacement ratio at
    depth 40 sits within 0.05 of 1/2, and the leading-term residual
    fraction stays below 0.1 while decreasing over the outer grid."""
    model, smile = _laplace_wing_smile()
    residuals = asymptotic_residuals(smile, model)
    outer = residuals[len(residuals) // 2:]
    ratios = [abs(r.eps1) / r.target for r in outer]
    d40 = residuals[-1].d_ratio
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    shown = ", ".join(f"{r:.4f}@{p.kappa:.0f}" for r, p in zip(ratios, outer))
    print(f"[8] residuals: d_ratio(40) = {d40:.6f} (1/2 within 0.05); "
          f"|eps1|/target over outer grid {shown} "
          f"(tol < 0.1, decreasing={decreasing})")
    assert abs(d40 - 0.5) < 0.05
    assert decreasing
    for r, p in zip(ratios, outer):
        assert r < 0.1, (
            f"residual fraction {r:.6f} at kappa {p.kappa:.1f} "
            f"exceeds 0.1"
        )


def test_09_tail_growth_index():
    """Tail-growth index over depths [10, 100]: 1 within 0.05 for the
    exponential-tail model, 2 within 0.05 for the Gaussian through its
    log-tail oracle."""
    th_exp = rv_index(asym_laplace_model(1.0, 1.0), "right", 10.0, 100.0)
    th_gauss = rv_index(gaussian_model(1.0), "right", 10.0, 100.0)
    print(f"[9] tail growth index: exponential {th_exp:.4f} (1 +- 0.05), "
          f"gaussian {th_gauss:.4f} (2 +- 0.05)")
    assert abs(th_exp - 1.0) < 0.05
    assert abs(th_gauss - 2.0) < 0.05


def test_10_vega_matches_finite_differences():
    """Analytic vega against centered differences at 1e3 random points,
    1e-6 relative.  The difference is taken on the out-of-the-money
    instrument (identical to the call's by parity, since the intrinsic
    part carries no vol dependence) so the tiny time value is not
    absorbed by an order-one intrinsic in floating point; sampling keeps
    |kappa|/sigma <= 35 so prices stay in the normal floating range."""
    rng = np.random.default_rng(SEED)
    n = 1000
    kappa = np.empty(n)
    sigma = np.empty(n)
    filled = 0
    while filled < n:
        k = rng.uniform(-10.0, 10.0, n - filled)
        s = rng.uniform(0.01, 5.0, n - filled)
        keep = np.abs(k) / s <= 35.0
        cnt = int(np.sum(keep))
        kappa[filled:filled + cnt] = k[keep]
        sigma[filled:filled + cnt] = s[keep]
        filled += cnt

    def otm(k, s):
        return np.where(k >= 0.0, call_price(k, s), put_price(k, s))

    h = sigma * 6e-7
    fd = (otm(kappa, sigma + h) - otm(kappa, sigma - h)) / (2.0 * h)
    worst = float(np.max(np.abs(fd - vega(kappa, sigma)) / vega(kappa, sigma)))
    print(f"[10] vega vs finite differences: max rel err {worst:.3e} (tol 1e-6)")
    assert worst < 1e-6
