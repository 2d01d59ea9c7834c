"""Sample sizing, paired significance testing, and monotone trend testing.

The significance question is always one-sided: do points inside a candidate
region show a larger gap than their immediate outside neighbors? Pairing by
reflection across the nearest facet keeps the two samples dependent, which
is what the signed-rank test is for.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .analyzer import EPS_MEM
from .rng import substream
from .sampling import SamplingFailure, sample_region, stacked_rows

__all__ = [
    "AllZero",
    "SamplingFailure",
    "SignificanceReport",
    "check_significance",
    "dkw_samples",
    "kendall_trend",
    "wilcoxon_signed_rank",
]

WILCOXON_EXACT_LIMIT = 20   # enumerate sign patterns up to this many pairs
KENDALL_EXACT_LIMIT = 10    # permute gap values up to this many points
ALTERNATIVES = ("greater", "less", "two-sided")


class AllZero(ValueError):
    """Every paired difference is zero; the test carries no information."""


def dkw_samples(epsilon, delta):
    """Samples needed for an empirical CDF within epsilon at confidence 1-delta."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return int(math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon)))


def _midranks(magnitudes):
    mag = np.asarray(magnitudes, dtype=float)
    order = np.argsort(mag, kind="stable")
    ranks = np.empty(len(mag))
    i = 0
    while i < len(mag):
        j = i
        while j + 1 < len(mag) and mag[order[j + 1]] == mag[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_wilcoxon_p(ranks, w, alternative):
    # doubled ranks are integers even with midrank ties, so the null
    # distribution of 2W is a small integer convolution
    ranks2 = np.rint(2.0 * np.asarray(ranks)).astype(int)
    w2 = int(round(2.0 * w))
    top = int(ranks2.sum())
    counts = np.zeros(top + 1, dtype=np.int64)
    counts[0] = 1
    for r in ranks2:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:top + 1 - r]
        counts += shifted
    total = float(2 ** len(ranks2))
    p_ge = float(counts[min(w2, top):].sum()) / total if w2 <= top else 0.0
    p_le = float(counts[:max(w2, 0) + 1].sum()) / total if w2 >= 0 else 0.0
    if alternative == "greater":
        return p_ge
    if alternative == "less":
        return p_le
    return min(1.0, 2.0 * min(p_ge, p_le))


def _upper_tail(z):
    # survival function of the standard normal, stable far into the tail
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _normal_wilcoxon_p(ranks, w, alternative):
    n = len(ranks)
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(np.asarray(ranks), return_counts=True)
    var -= float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
    sd = math.sqrt(var) if var > 0 else 0.0
    if sd == 0.0:
        return 1.0
    p_ge = _upper_tail((w - mu - 0.5) / sd)
    p_le = _upper_tail(-(w - mu + 0.5) / sd)
    if alternative == "greater":
        return p_ge
    if alternative == "less":
        return p_le
    return min(1.0, 2.0 * min(p_ge, p_le))


def wilcoxon_signed_rank(differences, alternative="greater", method="auto"):
    """Signed-rank test on paired differences.

    Zeros are dropped, tied magnitudes get midranks, and W is the sum of
    the ranks of the positive differences. Exact enumeration of the 2^n
    sign patterns up to n = 20, a tie-corrected normal approximation with
    continuity correction beyond. Returns (W, p, method).
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    if method not in ("auto", "exact", "normal"):
        raise ValueError(f"unknown method {method!r}")
    d = np.asarray(differences, dtype=float)
    d = d[d != 0.0]
    if len(d) == 0:
        raise AllZero("all differences are zero")
    ranks = _midranks(np.abs(d))
    w = float(ranks[d > 0].sum())
    if method == "auto":
        method = "exact" if len(d) <= WILCOXON_EXACT_LIMIT else "normal"
    if method == "exact":
        return w, _exact_wilcoxon_p(ranks, w, alternative), "exact"
    return w, _normal_wilcoxon_p(ranks, w, alternative), "normal-approx"


@dataclass(frozen=True)
class SignificanceReport:
    """Outcome of the inside-versus-outside gap comparison."""

    n: int
    W: float
    p: float
    method: str
    keep: bool
    alpha: float


def _outside_partner(x, rows, rhs, space, margin):
    """Reflect x across its nearest facet that clipping cannot undo.

    `margin` is a fraction of the range projected on the facet normal, so
    the partner sits strictly outside rather than on the boundary.
    """
    norms = np.linalg.norm(rows, axis=1)
    usable = norms > 0
    if not np.any(usable):
        return None
    slack = np.full(len(rows), np.inf)
    slack[usable] = (rhs[usable] - rows[usable] @ x) / norms[usable]
    scale = np.zeros(len(rows))
    scale[usable] = margin * (np.abs(rows[usable]) @ space.ranges) / norms[usable]
    for r in np.argsort(slack, kind="stable"):
        if not usable[r]:
            continue
        y = space.clip(x + (slack[r] + scale[r]) * rows[r] / norms[r])
        if rows[r] @ y > rhs[r] + EPS_MEM:
            return y
    return None


def check_significance(subspace, gap_fn, space, n_pairs=None, margin=0.025,
                       alpha=0.05, seed=0):
    """Paired one-sided test: inside gaps exceed immediate-outside gaps.

    Draws n_pairs points uniformly inside the region, pairs each with its
    reflection just outside the nearest facet (clipped to the space), and
    runs the one-sided signed-rank test on the inside-minus-outside
    differences. All-zero differences yield keep=False rather than an
    error; a region too thin to sample raises SamplingFailure.
    """
    if n_pairs is None:
        n_pairs = dkw_samples(0.1, 0.05)
    rng = substream(seed, "significance")
    inside = sample_region(subspace, space, n_pairs, rng)
    rows, rhs = stacked_rows(subspace, space.n)
    diffs = np.zeros(n_pairs)
    for k, x in enumerate(inside):
        partner = _outside_partner(x, rows, rhs, space, margin)
        if partner is None:
            continue
        diffs[k] = float(gap_fn(x)) - float(gap_fn(partner))
    try:
        w, p, method = wilcoxon_signed_rank(diffs, "greater")
    except AllZero:
        return SignificanceReport(n=0, W=0.0, p=1.0, method="degenerate",
                                  keep=False, alpha=alpha)
    n_used = int(np.count_nonzero(diffs))
    return SignificanceReport(n=n_used, W=w, p=p, method=method,
                              keep=p < alpha, alpha=alpha)


def _kendall_s(sx, sy):
    return int(np.sum(sx * sy))


def kendall_trend(pairs, alternative="greater"):
    """Kendall tau-b between feature values and gaps. Returns (tau, p).

    Exact permutation null up to KENDALL_EXACT_LIMIT points, normal
    approximation with tie correction beyond. Fully tied data carries no
    trend information and reports (0, 1).
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    pts = [(float(a), float(b)) for a, b in pairs]
    if len(pts) < 2:
        raise ValueError("need at least two observations")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    n = len(x)
    iu, ju = np.triu_indices(n, 1)
    sx = np.sign(x[ju] - x[iu])
    sy = np.sign(y[ju] - y[iu])
    s_obs = _kendall_s(sx, sy)

    def tie_sizes(v):
        _, counts = np.unique(v, return_counts=True)
        return counts.astype(float)

    tx, ty = tie_sizes(x), tie_sizes(y)
    n0 = n * (n - 1) / 2.0
    n1 = float(np.sum(tx * (tx - 1) / 2.0))
    n2 = float(np.sum(ty * (ty - 1) / 2.0))
    den = math.sqrt((n0 - n1) * (n0 - n2))
    if den == 0.0:
        return 0.0, 1.0
    tau = s_obs / den

    if n <= KENDALL_EXACT_LIMIT:
        ge = le = total = 0
        perms = itertools.permutations(range(n))
        while True:
            block = list(itertools.islice(perms, 100_000))
            if not block:
                break
            P = np.array(block)
            s_perm = np.zeros(len(P), dtype=np.int64)
            for k in range(len(iu)):
                s_perm += np.sign(y[P[:, ju[k]]] - y[P[:, iu[k]]]).astype(
                    np.int64) * int(sx[k])
            ge += int(np.count_nonzero(s_perm >= s_obs))
            le += int(np.count_nonzero(s_perm <= s_obs))
            total += len(P)
        p_ge, p_le = ge / total, le / total
    else:
        v0 = n * (n - 1) * (2 * n + 5)
        vt = float(np.sum(tx * (tx - 1) * (2 * tx + 5)))
        vu = float(np.sum(ty * (ty - 1) * (2 * ty + 5)))
        v1 = (np.sum(tx * (tx - 1)) * np.sum(ty * (ty - 1))) / (
            2.0 * n * (n - 1))
        v2 = (np.sum(tx * (tx - 1) * (tx - 2)) *
              np.sum(ty * (ty - 1) * (ty - 2))) / (
            9.0 * n * (n - 1) * (n - 2))
        var = (v0 - vt - vu) / 18.0 + v1 + v2
        sd = math.sqrt(var) if var > 0 else 0.0
        if sd == 0.0:
            return tau, 1.0
        p_ge = _upper_tail((s_obs - 1) / sd)
        p_le = _upper_tail(-(s_obs + 1) / sd)
    if alternative == "greater":
        return tau, p_ge
    if alternative == "less":
        return tau, p_le
    return tau, min(1.0, 2.0 * min(p_ge, p_le))
