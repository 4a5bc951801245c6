#!/usr/bin/env python3
"""How far out can a price round-trip survive?

Linear double-precision prices die twice out in the wings: out of the
money they underflow to 0.0 (all information gone), and in the money the
time value drops below one ulp of the intrinsic, so price == intrinsic
exactly and inversion has nothing to chew on.

The log-price channel sidesteps both. Here we push a flat vol of 0.25
to strikes hundreds of vols out and recover it.
"""

import math

from bachelier_wings import (
    call_price,
    call_price_log,
    implied_vol_call_log,
    put_price,
)

SIGMA = 0.25

print(f"flat vol {SIGMA}, pushing the strike out")
print(f"{'kappa':>7} {'d=k/sigma':>9} {'linear call':>12} {'log call':>12} "
      f"{'recovered':>12} {'rel err':>9}")

for kappa in (1.0, 5.0, 9.0, 20.0, 50.0, 120.0):
    d = kappa / SIGMA
    lin = call_price(kappa, SIGMA)
    logp = call_price_log(kappa, SIGMA)
    rec = implied_vol_call_log(kappa, logp).sigma
    rel = abs(rec - SIGMA) / SIGMA
    lin_txt = f"{lin:.4e}" if lin > 0.0 else "0.0 (dead)"
    print(f"{kappa:7.1f} {d:9.0f} {lin_txt:>12} {logp:12.2f} {rec:12.10f} {rel:9.1e}")

print()
# the ITM half of the same coin: intrinsic swallows the time value
kappa = -9.0
itm = put_price(kappa, SIGMA)
intrinsic = -kappa
print(f"in the money at kappa={kappa}: put price {itm!r}")
print(f"price - intrinsic = {itm - intrinsic!r}  "
      f"(time value ~ {math.exp(call_price_log(-kappa, SIGMA)):.1e}, below one ulp of {intrinsic})")
print("so round trips must always ride the out-of-the-money leg,")
print("and past ~38 vols out, its log price rather than the linear one")
