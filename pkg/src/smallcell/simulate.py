"""Monte Carlo simulation of the typical UE in a finite Poisson network.

APs (density 1) and UEs (density ``ratio``) are dropped in a disk, UEs attach
to their nearest AP, every cell runs the access scheme on its own UEs and the
typical UE, pinned at the origin, measures its SIR on its subchannel. This
path makes no use of the load pmf or of the i.i.d. mark assumption, so it
checks the analytic model.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.spatial import cKDTree

from ._validation import check_positive, check_random_state
from .analytic import CdfCurve
from .exceptions import DegenerateRealization, EmptySamples, InvalidParameter
from .schemes import Scheme, allocate, sample_mtilde

MAX_RESAMPLES = 1000


@dataclass(frozen=True)
class SimWindow:
    """Disk of ``radius`` (in units of the mean AP spacing ``1/sqrt(lambda_a)``).

    Samples whose serving AP lies beyond ``guard_fraction * radius`` are
    discarded and redrawn.
    """

    radius: float = 20.0
    guard_fraction: float = 0.5

    def __post_init__(self):
        if not self.radius >= 10:
            raise InvalidParameter("window radius must be at least 10")
        if not 0 < self.guard_fraction < 1:
            raise InvalidParameter("guard_fraction must lie in (0, 1)")

    @property
    def area(self):
        return math.pi * self.radius ** 2

    @property
    def guard_radius(self):
        return self.guard_fraction * self.radius


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    """One drop of APs and UEs. UE 0 is the typical UE at the origin and AP 0
    is its serving AP."""

    ap_positions: np.ndarray
    ue_positions: np.ndarray
    association: np.ndarray
    cell_counts: np.ndarray
    resampled: int = 0

    @property
    def n_aps(self):
        return len(self.ap_positions)

    def scaled(self, factor):
        return NetworkRealization(self.ap_positions * factor, self.ue_positions * factor,
                                  self.association, self.cell_counts, self.resampled)


@dataclass(frozen=True)
class FadingDraw:
    g0: float
    gi: np.ndarray


def _uniform_disk(count, radius, rng):
    r = radius * np.sqrt(rng.random(count))
    angle = 2 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(angle), r * np.sin(angle)))


def nearest_ap(ap_positions, points):
    """Index of the closest AP to each point; ties go to the lowest index."""
    tree = cKDTree(ap_positions, balanced_tree=False, compact_nodes=False)
    if len(ap_positions) == 1:
        return np.zeros(len(points), dtype=np.int64)
    dist, idx = tree.query(points, k=2)
    tie = dist[:, 0] == dist[:, 1]
    best = idx[:, 0].copy()
    best[tie] = np.minimum(idx[tie, 0], idx[tie, 1])
    return best


def sample_network(ratio, window=SimWindow(), rng=None, with_ues=True):
    """Drop a realization; empty AP draws are redrawn and counted.

    ``with_ues=False`` skips the UE process (enough for full-buffer runs where
    cell loads are irrelevant).
    """
    ratio = check_positive(ratio, "ratio")
    rng = check_random_state(rng)
    resampled = 0
    n_aps = rng.poisson(window.area)
    while n_aps == 0:
        resampled += 1
        if resampled > MAX_RESAMPLES:
            raise DegenerateRealization("no AP after repeated draws")
        n_aps = rng.poisson(window.area)
    aps = _uniform_disk(n_aps, window.radius, rng)

    if with_ues:
        others = _uniform_disk(rng.poisson(window.area * ratio), window.radius, rng)
        ues = np.vstack((np.zeros((1, 2)), others))
    else:
        ues = np.zeros((1, 2))
    assoc = nearest_ap(aps, ues)

    # relabel so the typical UE's serving AP is AP 0
    serving = assoc[0]
    perm = np.arange(n_aps)
    perm[[0, serving]] = perm[[serving, 0]]
    aps = aps[perm]
    inverse = np.empty_like(perm)
    inverse[perm] = np.arange(n_aps)
    assoc = inverse[assoc]
    counts = np.bincount(assoc, minlength=n_aps)
    return NetworkRealization(aps, ues, assoc, counts, resampled)


def interferer_marks(real, scheme, n, m_max, channel, rng, sdma_rule="min"):
    """SDMA count of every AP on ``channel``; entry 0 (the serving AP) is 0.

    Cells are independent, so all cells with equal load are run as one batch.
    """
    marks = np.zeros(real.n_aps, dtype=np.int64)
    counts = real.cell_counts.copy()
    counts[0] = 0
    for k in np.unique(counts):
        if k == 0:
            continue
        where = np.nonzero(counts == k)[0]
        where = where[where != 0]
        marks[where] = sample_mtilde(scheme, int(k), n, m_max, channel, where.size, rng,
                                     sdma_rule)
    return marks


def draw_fading(marks, rng):
    """Unit-mean exponential useful gain; ``Gamma(M~_i, 1)`` for active interferers."""
    active = marks > 0
    gi = np.zeros(marks.shape)
    gi[active] = rng.gamma(marks[active].astype(float), 1.0)
    return FadingDraw(float(rng.exponential(1.0)), gi)


def sir_from_marks(real, m, marks, fading, alpha):
    """Evaluate the SIR given group size, interferer marks and fading."""
    dist = np.hypot(real.ap_positions[:, 0], real.ap_positions[:, 1])
    signal = fading.g0 * dist[0] ** -alpha / m
    active = np.nonzero(marks > 0)[0]
    active = active[active != 0]
    if active.size == 0:
        return math.inf
    interference = np.sum(fading.gi[active] * dist[active] ** -alpha / marks[active])
    return float(signal / interference)


def sample_typical_sir(real, scheme, n, m_max, params, rng=None, sdma_rule="min",
                       full_buffer=False):
    """Run the scheme everywhere and return the typical UE's ``(sir, k0, m)``.

    ``full_buffer`` makes every AP serve ``m_max`` UEs on every subchannel,
    ignoring the realised loads.
    """
    rng = check_random_state(rng)
    scheme = Scheme.parse(scheme)
    if full_buffer:
        marks = np.full(real.n_aps, m_max, dtype=np.int64)
        marks[0] = 0
        k0 = m = m_max
    else:
        cell = allocate(scheme, int(real.cell_counts[0]), n, m_max, rng, sdma_rule)
        channel = int(cell.subchannel[0])
        k0 = int(cell.counts()[channel])
        m = int(cell.sdma_group_size[0])
        marks = interferer_marks(real, scheme, n, m_max, channel, rng, sdma_rule)
    fading = draw_fading(marks, rng)
    return sir_from_marks(real, m, marks, fading, params.alpha), k0, m


def rate_from_sir(sir, k0, m, n, theta0):
    """Achieved rate: zero in SIR outage, else the time-shared channel rate."""
    if sir < theta0:
        return 0.0
    if sir == math.inf:
        return math.inf
    return math.log2(1.0 + sir) * m / (n * k0)


def sample_typical_rate(real, scheme, n, m_max, params, rng=None, sdma_rule="min"):
    sir, k0, m = sample_typical_sir(real, scheme, n, m_max, params, rng, sdma_rule)
    return rate_from_sir(sir, k0, m, n, params.theta0)


def empirical_cdf(samples, grid):
    """Fraction of samples ``<= x`` for each ``x`` in ``grid``.

    Infinite samples (no interferer) count as larger than every grid point.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise EmptySamples("empirical cdf of an empty sample")
    grid = np.asarray(grid, dtype=float)
    ordered = np.sort(samples)
    values = np.searchsorted(ordered, grid, side="right") / samples.size
    return CdfCurve(grid, values)


def wilson_interval(successes, trials, z=1.959963984540054):
    """Wilson score interval for a binomial proportion."""
    successes = np.asarray(successes, dtype=float)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return centre - half, centre + half


# --------------------------------------------------------------------------
# campaigns


@dataclass
class CampaignResult:
    sir_curve: CdfCurve
    rate_curve: CdfCurve
    activity_estimate: float
    diagnostics: dict = field(default_factory=dict)
    records: np.ndarray = None

    def rate_interval(self):
        trials = len(self.records)
        return wilson_interval(self.rate_curve.values * trials, trials)


RECORD_DTYPE = np.dtype([("seed", np.uint64), ("sir", float), ("k0", np.int64),
                         ("m", np.int64), ("rate", float), ("active", np.int8),
                         ("resampled", np.int64), ("edge_rejects", np.int64)])


def sample_seeds(base_seed, n_samples):
    """Per-sample seeds: the first ``n_samples`` 64-bit words of
    ``SeedSequence(base_seed)``. Sample ``i`` uses ``default_rng(seeds[i])``."""
    return np.random.SeedSequence(base_seed).generate_state(n_samples, dtype=np.uint64)


def run_sample(seed, scheme, n, m_max, ratio, params, window, sdma_rule="min",
               full_buffer=False):
    """One independent measurement of the typical UE."""
    rng = np.random.default_rng(int(seed))
    rejects = resampled = 0
    while True:
        real = sample_network(ratio, window, rng, with_ues=not full_buffer)
        resampled += real.resampled
        if np.hypot(*real.ap_positions[0]) <= window.guard_radius:
            break
        rejects += 1
    sir, k0, m = sample_typical_sir(real, scheme, n, m_max, params, rng, sdma_rule,
                                    full_buffer)
    rate = rate_from_sir(sir, k0, m, n, params.theta0)
    # activity probe: one uniformly chosen AP inside the guard disk other than AP 0
    dist = np.hypot(real.ap_positions[:, 0], real.ap_positions[:, 1])
    inner = np.nonzero(dist <= window.guard_radius)[0]
    inner = inner[inner != 0]
    active = -1
    if inner.size and not full_buffer:
        probe = inner[rng.integers(inner.size)]
        k = int(real.cell_counts[probe])
        channel = rng.integers(n)
        active = int(sample_mtilde(scheme, k, n, m_max, channel, 1, rng, sdma_rule)[0] > 0)
    return (seed, sir, k0, m, rate, active, resampled, rejects)


def _run_chunk(seeds, *args):
    return [run_sample(s, *args) for s in seeds]


def simulate_records(n_samples, base_seed, scheme, n, m_max, ratio, params,
                     window=SimWindow(), sdma_rule="min", full_buffer=False, jobs=1):
    """Raw per-sample records; identical for any ``jobs`` value."""
    seeds = sample_seeds(base_seed, n_samples)
    args = (Scheme.parse(scheme), n, m_max, ratio, params, window, sdma_rule, full_buffer)
    if jobs == 1:
        rows = _run_chunk(seeds, *args)
    else:
        chunks = np.array_split(seeds, max(1, 4 * abs(jobs)))
        parts = Parallel(n_jobs=jobs)(delayed(_run_chunk)(c, *args) for c in chunks)
        rows = [row for part in parts for row in part]
    return np.array(rows, dtype=RECORD_DTYPE)


def run_campaign(config, n_samples=None, base_seed=None, jobs=1):
    """Empirical SIR and rate cdfs for ``config`` (a ``SystemConfig``)."""
    n_samples = config.mc_samples if n_samples is None else n_samples
    base_seed = config.base_seed if base_seed is None else base_seed
    if n_samples < 100:
        raise InvalidParameter("a campaign needs at least 100 samples")
    records = simulate_records(n_samples, base_seed, config.scheme, config.n, config.m_max,
                               config.ratio, config.params, config.window,
                               config.sdma_rule, config.full_buffer, jobs)
    probes = records["active"][records["active"] >= 0]
    activity = float(probes.mean()) if probes.size else float("nan")
    diagnostics = {
        "samples": int(n_samples),
        "infinite_sir": int(np.isinf(records["sir"]).sum()),
        "degenerate_resamples": int(records["resampled"].sum()),
        "edge_rejects": int(records["edge_rejects"].sum()),
        "activity_probes": int(probes.size),
    }
    return CampaignResult(
        sir_curve=empirical_cdf(records["sir"], config.sir_grid_linear()),
        rate_curve=empirical_cdf(records["rate"], config.rate_grid()),
        activity_estimate=activity,
        diagnostics=diagnostics,
        records=records,
    )
