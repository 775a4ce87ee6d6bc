"""Small-sample hypothesis tests: Mann-Whitney U and Barnard's exact test.

Both tests are implemented from first principles so that every reported
number is auditable: the Mann-Whitney exact method counts group
assignments directly, and Barnard's test maximizes the rejection-region
probability over a dense nuisance-parameter grid with a local
golden-section refinement.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .roles import ContingencyTable2x2

DEFAULT_EXACT_CAP = 25
DEFAULT_GRID_RESOLUTION = 1e-4
_REGION_EPS = 1e-12


def _norm_sf(x: float) -> float:
    """Survival function of the standard normal."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _midranks(values: Sequence[float]) -> list[float]:
    """Fractional ranks, 1-based; tied values share the mean of their ranks."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _u_first(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """U statistic of sample_a: the number of (a, b) pairs with a < b, ties half."""
    n1, n2 = len(sample_a), len(sample_b)
    ranks = _midranks(list(sample_a) + list(sample_b))
    r1 = sum(ranks[:n1])
    return n1 * n2 + n1 * (n1 + 1) / 2 - r1


def u_from_samples(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Mann-Whitney U via midranks, reported with the min(U_a, U_b) convention."""
    if not sample_a or not sample_b:
        raise ValueError("both samples must be nonempty")
    u_a = _u_first(sample_a, sample_b)
    return min(u_a, len(sample_a) * len(sample_b) - u_a)


def _tie_corrected_sd(pooled: Sequence[float], n1: int, n2: int) -> float:
    """Standard deviation of U under the null, with the tie correction."""
    n = n1 + n2
    tie_term = 0.0
    for _, group in itertools.groupby(sorted(pooled)):
        t = len(list(group))
        tie_term += t**3 - t
    var = (n1 * n2 / 12.0) * ((n + 1) - tie_term / (n * (n - 1)))
    return math.sqrt(var) if var > 0 else 0.0


def exact_u_distribution(n1: int, n2: int) -> dict[int, int]:
    """Null distribution of U for tie-free samples, as {u: assignment count}.

    Counts subsets by a subset-sum recurrence over rank positions, so the
    result is exact; the counts sum to C(n1+n2, n1).
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("both group sizes must be at least 1")
    n = n1 + n2
    max_sum = sum(range(n - n1 + 1, n + 1))
    ways = [[0] * (max_sum + 1) for _ in range(n1 + 1)]
    ways[0][0] = 1
    for pos in range(1, n + 1):
        for m in range(min(pos, n1), 0, -1):
            row, prev = ways[m], ways[m - 1]
            for t in range(max_sum, pos - 1, -1):
                if prev[t - pos]:
                    row[t] += prev[t - pos]
    base = n1 * (n1 + 1) // 2
    return {t - base: c for t, c in enumerate(ways[n1]) if c}


def _doubled_u_counts_with_ties(pooled: Sequence[float], n1: int) -> dict[int, int]:
    """Null distribution over all assignments, keyed by 2*U_a (ties allowed).

    With ties the distribution need not be symmetric, so the keying must
    match the first-sample convention of _u_first exactly.
    """
    doubled = [int(round(2 * r)) for r in _midranks(pooled)]
    n2 = len(pooled) - n1
    base = 2 * n1 * n2 + n1 * (n1 + 1)
    counts: dict[int, int] = {}
    for combo in itertools.combinations(doubled, n1):
        key = base - sum(combo)
        counts[key] = counts.get(key, 0) + 1
    return counts


def _exact_tail_fractions(u_a: float, n1: int, n2: int,
                          pooled: Sequence[float]) -> tuple[Fraction, Fraction]:
    """P(U* <= u_a) and P(U* >= u_a) over all C(n1+n2, n1) assignments."""
    has_ties = len(set(pooled)) != len(pooled)
    if has_ties:
        doubled_counts = _doubled_u_counts_with_ties(pooled, n1)
    else:
        doubled_counts = {2 * u: c for u, c in exact_u_distribution(n1, n2).items()}
    total = math.comb(n1 + n2, n1)
    du = int(round(2 * u_a))
    lower = sum(c for k, c in doubled_counts.items() if k <= du)
    upper = sum(c for k, c in doubled_counts.items() if k >= du)
    return Fraction(lower, total), Fraction(upper, total)


@dataclass(frozen=True)
class MwuResult:
    """Mann-Whitney outcome with full method metadata.

    u is reported with the min(U_a, U_b) convention; z keeps the sign of
    sample_a's statistic so that swapping the samples negates it. Both
    one- and two-sided p-values are retained; p echoes the configured tails.
    """

    u: float
    z: float
    p: float
    r: float
    n1: int
    n2: int
    method: str
    tails: str
    continuity_correction: bool
    p_one_sided: float
    p_two_sided: float

    def to_dict(self) -> dict:
        return {
            "test": "mann_whitney_u",
            "u": self.u,
            "z": self.z,
            "p": self.p,
            "r": self.r,
            "n1": self.n1,
            "n2": self.n2,
            "method": self.method,
            "tails": self.tails,
            "continuity_correction": self.continuity_correction,
            "p_one_sided": self.p_one_sided,
            "p_two_sided": self.p_two_sided,
        }


def _check_tails(tails: str) -> str:
    if tails not in ("one", "two"):
        raise ValueError(f"tails must be 'one' or 'two', got {tails!r}")
    return tails


def _z_score(u_a: float, mu: float, sd: float, continuity_correction: bool) -> float:
    if sd == 0.0:
        return 0.0
    delta = u_a - mu
    if continuity_correction:
        delta = math.copysign(max(abs(delta) - 0.5, 0.0), delta)
    return delta / sd


def mann_whitney_u(sample_a: Sequence[float], sample_b: Sequence[float], *,
                   tails: str = "one", continuity_correction: bool = False,
                   method: str = "normal", exact_cap: int = DEFAULT_EXACT_CAP) -> MwuResult:
    """Two-sample Mann-Whitney U test with midrank tie handling.

    Parameters
    ----------
    sample_a, sample_b : sequences of reals, both nonempty
    tails : 'one' (default) or 'two'; selects which p-value the `p` field echoes
    continuity_correction : shrink |U - mean| by 0.5 before the normal score
    method : 'normal' for the tie-corrected normal approximation, 'exact' to
        count all C(n1+n2, n1) group assignments (tie-free samples use a
        subset-sum recurrence, tied samples full enumeration)
    exact_cap : refuse 'exact' above this pooled size (enumeration cost)

    The effect size r is |z| / sqrt(n1 + n2) in every mode.
    """
    if not sample_a or not sample_b:
        raise ValueError("both samples must be nonempty")
    _check_tails(tails)
    if method not in ("normal", "exact"):
        raise ValueError(f"method must be 'normal' or 'exact', got {method!r}")
    n1, n2 = len(sample_a), len(sample_b)
    n = n1 + n2
    pooled = list(sample_a) + list(sample_b)
    u_a = _u_first(sample_a, sample_b)
    mu = n1 * n2 / 2.0
    sd = _tie_corrected_sd(pooled, n1, n2)
    z = _z_score(u_a, mu, sd, continuity_correction)

    if method == "exact":
        if n > exact_cap:
            raise ValueError(f"exact method capped at pooled size {exact_cap}, got {n}")
        lower, upper = _exact_tail_fractions(u_a, n1, n2, pooled)
        p_one = float(lower if u_a <= mu else upper)
        p_two = float(min(1, 2 * min(lower, upper)))
    else:
        p_one = _norm_sf(abs(z))
        p_two = min(1.0, 2.0 * p_one)

    return MwuResult(
        u=min(u_a, n1 * n2 - u_a),
        z=z,
        p=p_one if tails == "one" else p_two,
        r=abs(z) / math.sqrt(n),
        n1=n1,
        n2=n2,
        method=method,
        tails=tails,
        continuity_correction=continuity_correction,
        p_one_sided=p_one,
        p_two_sided=p_two,
    )


def mann_whitney_from_u(u: float, n1: int, n2: int, *, tails: str = "one",
                        continuity_correction: bool = False) -> MwuResult:
    """Normal-approximation result from a reported U and the group sizes alone.

    No raw data means no tie correction; z carries the sign of (u - mean),
    which is nonpositive when u follows the min convention.
    """
    _check_tails(tails)
    if n1 < 1 or n2 < 1:
        raise ValueError("both group sizes must be at least 1")
    if not (0 <= u <= n1 * n2):
        raise ValueError(f"u must be in [0, {n1 * n2}], got {u}")
    n = n1 + n2
    mu = n1 * n2 / 2.0
    sd = math.sqrt(n1 * n2 * (n + 1) / 12.0)
    z = _z_score(u, mu, sd, continuity_correction)
    p_one = _norm_sf(abs(z))
    p_two = min(1.0, 2.0 * p_one)
    return MwuResult(
        u=min(u, n1 * n2 - u),
        z=z,
        p=p_one if tails == "one" else p_two,
        r=abs(z) / math.sqrt(n),
        n1=n1,
        n2=n2,
        method="normal",
        tails=tails,
        continuity_correction=continuity_correction,
        p_one_sided=p_one,
        p_two_sided=p_two,
    )


# ---------------------------------------------------------------------------
# Barnard's exact unconditional test
# ---------------------------------------------------------------------------

def wald_pooled_statistic(table: ContingencyTable2x2) -> float:
    """Pooled-variance score statistic for a 2x2 table of two proportions.

    Rows are the two binomial samples (sizes a+b and c+d). Degenerate pooled
    proportions (0 or 1) return 0 so such tables never look extreme.
    """
    a, b, c, d = table.cells()
    m1, m2 = a + b, c + d
    if m1 == 0 or m2 == 0:
        raise ValueError("both row sums must be positive")
    pooled = (a + c) / (m1 + m2)
    if pooled in (0.0, 1.0):
        return 0.0
    p1, p2 = a / m1, c / m2
    return (p1 - p2) / math.sqrt(pooled * (1 - pooled) * (1 / m1 + 1 / m2))


@dataclass(frozen=True)
class BarnardResult:
    """Barnard outcome: statistic, maximized p, and the maximizing nuisance."""

    t: float
    p: float
    nuisance_argmax: float
    grid_resolution: float
    tails: str
    table: tuple[int, int, int, int]
    p_one_sided: float
    p_two_sided: float

    def to_dict(self) -> dict:
        return {
            "test": "barnard",
            "t": self.t,
            "p": self.p,
            "nuisance_argmax": self.nuisance_argmax,
            "grid_resolution": self.grid_resolution,
            "tails": self.tails,
            "table": list(self.table),
            "p_one_sided": self.p_one_sided,
            "p_two_sided": self.p_two_sided,
        }


def _region_weights(m1: int, m2: int, t_obs: float, tails: str) -> np.ndarray:
    """Sum C(m1,x1)*C(m2,x2) of rejection tables, indexed by x1+x2."""
    weights = np.zeros(m1 + m2 + 1)
    for x1 in range(m1 + 1):
        for x2 in range(m2 + 1):
            t = wald_pooled_statistic(ContingencyTable2x2(x1, m1 - x1, x2, m2 - x2))
            if tails == "two":
                hit = abs(t) >= abs(t_obs) - _REGION_EPS
            elif t_obs >= 0:
                hit = t >= t_obs - _REGION_EPS
            else:
                hit = t <= t_obs + _REGION_EPS
            if hit:
                weights[x1 + x2] += math.comb(m1, x1) * math.comb(m2, x2)
    return weights


def _region_probability(weights: np.ndarray, total: int, pis: np.ndarray) -> np.ndarray:
    """P(table in region | nuisance pi) for a vector of pi values."""
    ss = np.nonzero(weights)[0]
    pis = np.atleast_1d(np.asarray(pis, dtype=float))
    probs = (weights[ss][None, :]
             * pis[:, None] ** ss[None, :]
             * (1.0 - pis)[:, None] ** (total - ss)[None, :]).sum(axis=1)
    return probs


def _golden_max(f, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    xm = 0.5 * (lo + hi)
    return xm, f(xm)


def _max_region_probability(weights: np.ndarray, total: int,
                            step: float) -> tuple[float, float]:
    """Maximize the region probability over the nuisance grid, then refine."""
    k = int(round(1.0 / step))
    pis = np.arange(1, k) * step
    probs = _region_probability(weights, total, pis)
    best = int(np.argmax(probs))
    best_pi, best_p = float(pis[best]), float(probs[best])

    def scalar(pi: float) -> float:
        return float(_region_probability(weights, total, np.array([pi]))[0])

    lo = max(best_pi - step, step * 1e-6)
    hi = min(best_pi + step, 1.0 - step * 1e-6)
    refined_pi, refined_p = _golden_max(scalar, lo, hi)
    if refined_p > best_p:
        best_pi, best_p = refined_pi, refined_p
    return min(best_p, 1.0), best_pi


def barnard_test(table: ContingencyTable2x2, *, tails: str = "two",
                 grid_resolution: float = DEFAULT_GRID_RESOLUTION) -> BarnardResult:
    """Barnard's exact unconditional test for a 2x2 table.

    For every nuisance value pi on a grid over (0, 1), sums the probability
    of all tables at least as extreme as the observed one (by the pooled
    score statistic, absolute for two-sided, signed for one-sided) under
    independent Binomial(m1, pi) and Binomial(m2, pi) rows. The p-value is
    the maximum over the grid, sharpened by one golden-section refinement
    around the grid argmax.

    grid_resolution is the grid step; the default 1e-4 places 9999 interior
    points, enough for two-digit reproducibility on desk-scale tables.
    """
    _check_tails(tails)
    if not (0.0 < grid_resolution <= 0.1):
        raise ValueError(f"grid_resolution must be in (0, 0.1], got {grid_resolution}")
    a, b, c, d = table.cells()
    m1, m2 = a + b, c + d
    if m1 == 0 or m2 == 0:
        raise ValueError("both row sums must be at least 1")
    t_obs = wald_pooled_statistic(table)
    total = m1 + m2

    results = {}
    for side in ("one", "two"):
        weights = _region_weights(m1, m2, t_obs, side)
        results[side] = _max_region_probability(weights, total, grid_resolution)
    p_one, argmax_one = results["one"]
    p_two, argmax_two = results["two"]
    p, argmax = (p_one, argmax_one) if tails == "one" else (p_two, argmax_two)
    return BarnardResult(
        t=t_obs,
        p=p,
        nuisance_argmax=argmax,
        grid_resolution=grid_resolution,
        tails=tails,
        table=(a, b, c, d),
        p_one_sided=p_one,
        p_two_sided=p_two,
    )
