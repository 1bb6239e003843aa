"""Wigner 3j/6j symbols via Racah sums with exact rational arithmetic."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ..errors import ConfigError

_F = math.factorial


def _as_twice(j, name="argument"):
    """Validate a nonnegative half-integer and return 2j as an int."""
    t = 2.0 * float(j)
    r = round(t)
    if abs(t - r) > 1e-9 or r < 0:
        raise ConfigError(f"{name} must be a nonnegative half-integer, got {j}")
    return int(r)


def _tri2(ta, tb, tc):
    """Squared triangle coefficient as a Fraction, or None if forbidden.

    Arguments are doubled angular momenta; the triad must close and have
    integer perimeter.
    """
    if (ta + tb + tc) % 2:
        return None
    s1 = (ta + tb - tc) // 2
    s2 = (ta - tb + tc) // 2
    s3 = (-ta + tb + tc) // 2
    if s1 < 0 or s2 < 0 or s3 < 0:
        return None
    return Fraction(_F(s1) * _F(s2) * _F(s3), _F((ta + tb + tc) // 2 + 1))


@lru_cache(maxsize=100_000)
def _wigner6j_twice(t1, t2, t3, t4, t5, t6):
    tris = (
        _tri2(t1, t2, t3),
        _tri2(t1, t5, t6),
        _tri2(t4, t2, t6),
        _tri2(t4, t5, t3),
    )
    if any(t is None for t in tris):
        return 0.0
    a1 = (t1 + t2 + t3) // 2
    a2 = (t1 + t5 + t6) // 2
    a3 = (t4 + t2 + t6) // 2
    a4 = (t4 + t5 + t3) // 2
    b1 = (t1 + t2 + t4 + t5) // 2
    b2 = (t2 + t3 + t5 + t6) // 2
    b3 = (t3 + t1 + t6 + t4) // 2
    total = Fraction(0)
    for z in range(max(a1, a2, a3, a4), min(b1, b2, b3) + 1):
        term = Fraction(
            _F(z + 1),
            _F(z - a1) * _F(z - a2) * _F(z - a3) * _F(z - a4)
            * _F(b1 - z) * _F(b2 - z) * _F(b3 - z),
        )
        total += -term if z % 2 else term
    if total == 0:
        return 0.0
    pref = tris[0] * tris[1] * tris[2] * tris[3]
    mag = math.sqrt(float(pref)) * abs(float(total))
    return mag if total > 0 else -mag


def wigner6j(j1, j2, j3, j4, j5, j6):
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.

    Arguments are nonnegative half-integers; any violated triangle condition
    yields exactly 0.  The Racah single sum is evaluated in exact rationals
    before the final square root, so results are accurate to float round-off.
    """
    t = tuple(_as_twice(j, f"j{i + 1}") for i, j in
              enumerate((j1, j2, j3, j4, j5, j6)))
    return _wigner6j_twice(*t)


@lru_cache(maxsize=100_000)
def _wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3):
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if abs(tm) > tj or (tj + tm) % 2:
            return 0.0
    tri = _tri2(tj1, tj2, tj3)
    if tri is None:
        return 0.0
    # Racah sum over z with factorial arguments in half-integer combinations.
    j1pm1 = (tj1 + tm1) // 2
    j1mm1 = (tj1 - tm1) // 2
    j2pm2 = (tj2 + tm2) // 2
    j2mm2 = (tj2 - tm2) // 2
    j3pm3 = (tj3 + tm3) // 2
    j3mm3 = (tj3 - tm3) // 2
    a1 = (tj1 + tj2 - tj3) // 2
    a2 = (tj3 - tj2 + tm1) // 2
    a3 = (tj3 - tj1 - tm2) // 2
    zmin = max(0, -a2, -a3)
    zmax = min(a1, j1mm1, j2pm2)
    if zmax < zmin:
        return 0.0
    total = Fraction(0)
    for z in range(zmin, zmax + 1):
        term = Fraction(
            1,
            _F(z) * _F(a1 - z) * _F(j1mm1 - z) * _F(j2pm2 - z)
            * _F(a2 + z) * _F(a3 + z),
        )
        total += -term if z % 2 else term
    if total == 0:
        return 0.0
    pref = tri * Fraction(
        _F(j1pm1) * _F(j1mm1) * _F(j2pm2) * _F(j2mm2) * _F(j3pm3) * _F(j3mm3))
    sign = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    mag = math.sqrt(float(pref)) * abs(float(total))
    return sign * (mag if total > 0 else -mag)


def wigner3j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3); zero outside selection rules."""
    targs = []
    for i, v in enumerate((j1, j2, j3)):
        targs.append(_as_twice(v, f"j{i + 1}"))
    for i, v in enumerate((m1, m2, m3)):
        t = round(2.0 * float(v))
        if abs(2.0 * float(v) - t) > 1e-9:
            raise ConfigError(f"m{i + 1} must be a half-integer, got {v}")
        targs.append(int(t))
    return _wigner3j_twice(*targs)
