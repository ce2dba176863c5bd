"""Subchannel allocation schemes and the SDMA/TDMA statistics they induce.

Two non-cooperative schemes share ``n`` subchannels and ``m_max`` antennas
among the ``k`` UEs of a cell:

* ``Scheme.SCHEME1`` spreads UEs over subchannels in rounds of distinct random
  subchannels; UEs that share a subchannel are served by SDMA, with TDMA on
  top once more than ``m_max`` of them collide.
* ``Scheme.SCHEME2`` first packs UEs into random SDMA groups of ``m_max`` (the
  last group may be smaller) and spreads the groups by the same round rule;
  groups sharing a subchannel are time-multiplexed.

Subchannel indices are 0-based throughout.

How many UEs are served concurrently on a subchannel carrying ``K0`` UEs is
set by ``sdma_rule``:

* ``"min"`` (default): ``min(K0, m_max)`` in every resource block, the same
  SDMA/TDMA mix for both schemes. The typical UE gets the time share
  ``M / K0``.
* ``"group"``: Scheme 2 keeps its constructed groups, so the SDMA count is
  the size of the group owning the slot (slots are shared equally among the
  groups on a subchannel) and the typical UE's ``M`` is its own group size.

Both rules coincide for Scheme 1 and whenever no two Scheme 2 groups share a
subchannel.

Three routes produce the per-cell distributions consumed by the analytic
model: ``"exact"`` (closed-form combinatorics, the default), ``"enumerate"``
(brute force over every allocation outcome) and ``"monte-carlo"``.
"""

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_random_state
from .exceptions import EnumerationTooLarge, InvalidParameter
from .load import LoadPmf

ENUMERATION_LIMIT = 1_000_000
SDMA_RULES = ("min", "group")
DEFAULT_MC_SAMPLES = 1_000_000
_MC_CHUNK = 50_000


class Scheme(str, enum.Enum):
    SCHEME1 = "scheme1"
    SCHEME2 = "scheme2"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace(" ", "").replace("_", "")
        aliases = {"1": cls.SCHEME1, "scheme1": cls.SCHEME1,
                   "2": cls.SCHEME2, "scheme2": cls.SCHEME2}
        try:
            return aliases[key]
        except KeyError:
            raise InvalidParameter(f"unknown scheme {value!r}") from None


@dataclass(frozen=True, eq=False)
class CellAllocation:
    """Outcome of running a scheme in one cell.

    ``subchannel[u]`` is UE ``u``'s subchannel, ``group[u]`` its SDMA group
    (for Scheme 1 the group is the subchannel itself) and
    ``sdma_group_size[u]`` the number of UEs served concurrently with it.
    """

    scheme: Scheme
    n: int
    m_max: int
    subchannel: np.ndarray
    group: np.ndarray
    sdma_group_size: np.ndarray
    sdma_rule: str = "min"

    @property
    def k(self):
        return self.subchannel.size

    def counts(self):
        """Number of UEs assigned to each subchannel."""
        return np.bincount(self.subchannel, minlength=self.n)

    def group_sizes_on(self, channel):
        """Sizes of the SDMA groups time-sharing ``channel``."""
        on = self.subchannel == channel
        if not on.any():
            return np.zeros(0, dtype=int)
        if self.scheme is Scheme.SCHEME1 or self.sdma_rule == "min":
            return np.array([min(int(on.sum()), self.m_max)])
        groups, sizes = np.unique(self.group[on], return_counts=True)
        return sizes

    def active_sdma_count(self, channel, rng=None):
        """SDMA count on ``channel`` in a resource block; 0 when idle.

        Under the ``"group"`` rule with several Scheme 2 groups on the
        subchannel, the slot owner is drawn uniformly.
        """
        sizes = self.group_sizes_on(channel)
        if sizes.size == 0:
            return 0
        if sizes.size == 1:
            return int(sizes[0])
        return int(sizes[check_random_state(rng).integers(sizes.size)])


# --------------------------------------------------------------------------
# allocation


def _round_assign(n_items, n, rng, size):
    """Round-based assignment for ``size`` independent cells of ``n_items`` items.

    Items are put in random order; the order is cut into rounds of ``n`` and
    every round draws distinct subchannels uniformly from the full set.
    Returns an int array of shape ``(size, n_items)`` with each item's
    subchannel.
    """
    chan = np.empty((size, n_items), dtype=np.int64)
    if n_items == 0:
        return chan
    order = np.argsort(rng.random((size, n_items)), axis=1)
    by_position = np.empty((size, n_items), dtype=np.int64)
    for start in range(0, n_items, n):
        stop = min(start + n, n_items)
        perm = np.argsort(rng.random((size, n)), axis=1)
        by_position[:, start:stop] = perm[:, : stop - start]
    rows = np.arange(size)[:, None]
    chan[rows, order] = by_position
    return chan


def _group_sizes(k, m_max):
    full, rest = divmod(k, m_max)
    return np.array([m_max] * full + ([rest] if rest else []), dtype=np.int64)


def _check_dims(k, n, m_max):
    return (check_int(k, "k", 0), check_int(n, "n", 1), check_int(m_max, "m_max", 1))


def _check_rule(sdma_rule):
    if sdma_rule not in SDMA_RULES:
        raise InvalidParameter(f"sdma_rule must be one of {SDMA_RULES}, got {sdma_rule!r}")
    return sdma_rule


def allocate_scheme1(k, n, m_max, rng=None):
    """Run Scheme 1 (FDMA first) on a cell with ``k`` UEs."""
    k, n, m_max = _check_dims(k, n, m_max)
    rng = check_random_state(rng)
    chan = _round_assign(k, n, rng, 1)[0]
    counts = np.bincount(chan, minlength=n)
    return CellAllocation(Scheme.SCHEME1, n, m_max, chan, chan.copy(),
                          np.minimum(counts[chan], m_max))


def allocate_scheme2(k, n, m_max, rng=None, sdma_rule="min"):
    """Run Scheme 2 (SDMA groups first) on a cell with ``k`` UEs."""
    k, n, m_max = _check_dims(k, n, m_max)
    sdma_rule = _check_rule(sdma_rule)
    rng = check_random_state(rng)
    sizes = _group_sizes(k, m_max)
    position = rng.permutation(k)
    group = position // m_max
    group_chan = _round_assign(sizes.size, n, rng, 1)[0]
    chan = group_chan[group]
    if sdma_rule == "group":
        served = sizes[group]
    else:
        served = np.minimum(np.bincount(chan, minlength=n)[chan], m_max)
    return CellAllocation(Scheme.SCHEME2, n, m_max, chan, group, served, sdma_rule)


def allocate(scheme, k, n, m_max, rng=None, sdma_rule="min"):
    if Scheme.parse(scheme) is Scheme.SCHEME1:
        return allocate_scheme1(k, n, m_max, rng)
    return allocate_scheme2(k, n, m_max, rng, sdma_rule)


def sample_mtilde(scheme, k, n, m_max, channel, size, rng, sdma_rule="min"):
    """Vectorised SDMA count on ``channel`` for ``size`` independent cells of
    ``k`` UEs each; same law as ``allocate(...).active_sdma_count(channel)``."""
    scheme = Scheme.parse(scheme)
    if k == 0:
        return np.zeros(size, dtype=np.int64)
    if scheme is Scheme.SCHEME1:
        chan = _round_assign(k, n, rng, size)
        return np.minimum((chan == channel).sum(axis=1), m_max)
    sizes = _group_sizes(k, m_max)
    on = _round_assign(sizes.size, n, rng, size) == channel
    if sdma_rule == "min":
        return np.minimum((on * sizes).sum(axis=1), m_max)
    keys = np.where(on, rng.random(on.shape), -1.0)
    active = np.argmax(keys, axis=1)
    return np.where(on.any(axis=1), sizes[active], 0)


def sample_typical(scheme, k_total, n, m_max, size, rng, sdma_rule="min"):
    """Vectorised ``(k0, m)`` of UE 0 in ``size`` cells of ``k_total`` UEs."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.SCHEME1:
        chan = _round_assign(k_total, n, rng, size)
        k0 = (chan == chan[:, :1]).sum(axis=1)
        return k0, np.minimum(k0, m_max)
    sizes = _group_sizes(k_total, m_max)
    own = rng.integers(k_total, size=size) // m_max
    gchan = _round_assign(sizes.size, n, rng, size)
    mine = gchan[np.arange(size), own]
    k0 = ((gchan == mine[:, None]) * sizes).sum(axis=1)
    if sdma_rule == "min":
        return k0, np.minimum(k0, m_max)
    return k0, sizes[own]


# --------------------------------------------------------------------------
# closed-form combinatorics, conditioned on the cell load


def activity_given_load(scheme, k, n, m_max):
    """Probability that a fixed subchannel carries at least one UE."""
    units = k if Scheme.parse(scheme) is Scheme.SCHEME1 else -(-k // m_max)
    return min(units, n) / n


def mtilde_given_load(scheme, k, n, m_max, sdma_rule="min"):
    """Exact pmf over ``0..m_max`` of the SDMA count on a fixed subchannel."""
    scheme = Scheme.parse(scheme)
    pmf = np.zeros(m_max + 1)
    if k == 0:
        pmf[0] = 1.0
        return pmf
    if scheme is Scheme.SCHEME1:
        # full rounds put `full` UEs on every subchannel; the partial round
        # adds one more with probability rest / n
        full, rest = divmod(k, n)
        pmf[min(full + 1, m_max)] += rest / n
        pmf[min(full, m_max)] += 1 - rest / n
        return pmf
    n_groups = -(-k // m_max)
    ragged = k % m_max
    active = min(n_groups, n) / n
    pmf[0] = 1 - active
    if not ragged:
        pmf[m_max] += active
        return pmf
    # the groups on a subchannel are a uniform subset of all groups
    if sdma_rule == "group":
        # slot owner uniform among them: the ragged group owns it w.p. 1/G
        pmf[ragged] += active / n_groups
        pmf[m_max] += active * (1 - 1 / n_groups)
        return pmf
    # only a lone ragged group serves fewer than m_max UEs
    full, rest = divmod(n_groups, n)
    lone = rest / n if full == 0 else (1 - rest / n if full == 1 else 0.0)
    pmf[ragged] += lone / n_groups
    pmf[m_max] += active - lone / n_groups
    return pmf


def typical_given_load(scheme, k_total, n, m_max, sdma_rule="min"):
    """Exact joint pmf of ``(K0, M)`` for a marked UE in a cell of
    ``k_total >= 1`` UEs, as an array indexed ``[k0, m]``."""
    scheme = Scheme.parse(scheme)
    joint = np.zeros((k_total + 1, m_max + 1))
    if scheme is Scheme.SCHEME1:
        full, rest = divmod(k_total, n)
        # the marked UE sits at a uniform position of the random order
        if rest:
            joint[full + 1, min(full + 1, m_max)] += rest * (full + 1) / k_total
        if full:
            joint[full, min(full, m_max)] += full * (n - rest) / k_total
        return joint

    n_groups = -(-k_total // m_max)
    ragged = k_total % m_max
    full, rest = divmod(n_groups, n)
    share = {}
    if rest:
        share[full + 1] = rest * (full + 1) / n_groups
    if full:
        share[full] = full * (n - rest) / n_groups
    p_ragged = ragged / k_total
    for g, pg in share.items():
        if ragged:
            joint[ragged + (g - 1) * m_max, ragged] += pg * p_ragged
        p_own_full = pg * (1 - p_ragged)
        if p_own_full == 0:
            continue
        if ragged and n_groups > 1:
            with_ragged = (g - 1) / (n_groups - 1)
            if with_ragged:
                joint[g * m_max - (m_max - ragged), m_max] += p_own_full * with_ragged
            if with_ragged < 1:
                joint[g * m_max, m_max] += p_own_full * (1 - with_ragged)
        else:
            joint[g * m_max, m_max] += p_own_full
    if sdma_rule == "min":
        return _fold_min(joint, m_max)
    return joint


def _fold_min(joint, m_max):
    """Re-index a ``[k0, m]`` pmf to ``m = min(k0, m_max)``."""
    folded = np.zeros_like(joint)
    for k0 in range(joint.shape[0]):
        folded[k0, min(k0, m_max)] += joint[k0].sum()
    return folded


# --------------------------------------------------------------------------
# brute-force enumeration


def _n_round_outcomes(n_items, n):
    total = 1
    for start in range(0, n_items, n):
        total *= math.perm(n, min(n, n_items - start))
    return total


def _round_outcomes(n_items, n):
    """Every equally likely per-position subchannel sequence of the round rule."""
    rounds = [itertools.permutations(range(n), min(n, n_items - s))
              for s in range(0, n_items, n)]
    for combo in itertools.product(*[list(r) for r in rounds]):
        yield tuple(itertools.chain.from_iterable(combo))


def _enumeration_size(scheme, k, n, m_max, marked):
    if scheme is Scheme.SCHEME1:
        return (k if marked else 1) * _n_round_outcomes(k, n)
    g = -(-k // m_max)
    return (k if marked else 1) * math.factorial(g) * _n_round_outcomes(g, n)


def enumerate_mtilde_given_load(scheme, k, n, m_max, sdma_rule="min"):
    """Brute-force version of ``mtilde_given_load``."""
    scheme = Scheme.parse(scheme)
    pmf = np.zeros(m_max + 1)
    if k == 0:
        pmf[0] = 1.0
        return pmf
    if scheme is Scheme.SCHEME1:
        outcomes = list(_round_outcomes(k, n))
        for chans in outcomes:
            pmf[min(chans.count(0), m_max)] += 1
        return pmf / len(outcomes)
    sizes = list(_group_sizes(k, m_max))
    total = 0
    for order in itertools.permutations(range(len(sizes))):
        for chans in _round_outcomes(len(sizes), n):
            total += 1
            on = [sizes[order[p]] for p, c in enumerate(chans) if c == 0]
            if not on:
                pmf[0] += 1
            elif sdma_rule == "min":
                pmf[min(sum(on), m_max)] += 1
            else:
                for s in on:
                    pmf[s] += 1 / len(on)
    return pmf / total


def enumerate_typical_given_load(scheme, k_total, n, m_max, sdma_rule="min"):
    """Brute-force version of ``typical_given_load``."""
    scheme = Scheme.parse(scheme)
    joint = np.zeros((k_total + 1, m_max + 1))
    total = 0
    if scheme is Scheme.SCHEME1:
        for chans in _round_outcomes(k_total, n):
            for pos in range(k_total):
                k0 = chans.count(chans[pos])
                joint[k0, min(k0, m_max)] += 1
                total += 1
        return joint / total
    sizes = list(_group_sizes(k_total, m_max))
    for pos in range(k_total):
        own = pos // m_max
        for order in itertools.permutations(range(len(sizes))):
            place = order.index(own)
            for chans in _round_outcomes(len(sizes), n):
                k0 = sum(sizes[order[p]] for p, c in enumerate(chans)
                         if c == chans[place])
                m = min(k0, m_max) if sdma_rule == "min" else sizes[own]
                joint[k0, m] += 1
                total += 1
    return joint / total


# --------------------------------------------------------------------------
# load-averaged distributions


@dataclass(frozen=True, eq=False)
class AccessProfile:
    """Distributions an interferer and the typical UE see under a scheme.

    ``mtilde`` is the pmf over ``0..m_max`` of an interfering AP's SDMA count
    on a given subchannel. ``joint[k0, m]`` is the joint pmf of the UEs on the
    typical UE's subchannel and its SDMA group size.
    """

    scheme: Scheme
    n: int
    m_max: int
    mtilde: np.ndarray
    joint: np.ndarray

    def m_pmf(self):
        return self.joint.sum(axis=0)[1:]

    def k0_pmf(self):
        return self.joint.sum(axis=1)

    def activity(self):
        return 1.0 - self.mtilde[0]

    def support(self, eps=0.0):
        """``(k0, m, prob)`` triples with probability above ``eps``."""
        k0, m = np.nonzero(self.joint > eps)
        return k0, m, self.joint[k0, m]


def _check_method(method):
    if method not in ("exact", "enumerate", "monte-carlo"):
        raise InvalidParameter(f"unknown method {method!r}")
    return method


def subchannel_activity_probability(scheme, load, n, m_max):
    """Probability that a random AP transmits on a given subchannel."""
    scheme = Scheme.parse(scheme)
    k = load.support
    units = k if scheme is Scheme.SCHEME1 else -(-k // m_max)
    return float(np.sum(load.probs * np.minimum(units, n) / n))


def _mc_counts(load, samples, rng):
    """Split ``samples`` draws over the load support, per K value."""
    return rng.multinomial(samples, load.probs)


def _chunks(total):
    while total > 0:
        step = min(total, _MC_CHUNK)
        yield step
        total -= step


def interferer_mtilde_pmf(scheme, load, n, m_max, method="exact",
                          samples=DEFAULT_MC_SAMPLES, seed=None, sdma_rule="min"):
    """Pmf of an interfering AP's SDMA count on a fixed subchannel."""
    scheme = Scheme.parse(scheme)
    sdma_rule = _check_rule(sdma_rule)
    n, m_max = check_int(n, "n", 1), check_int(m_max, "m_max", 1)
    method = _check_method(method)
    ks = np.nonzero(load.probs > 0)[0]

    if method == "monte-carlo":
        rng = check_random_state(seed)
        channel = 0
        hist = np.zeros(m_max + 1)
        for k, count in zip(load.support, _mc_counts(load, samples, rng)):
            for step in _chunks(int(count)):
                draws = sample_mtilde(scheme, int(k), n, m_max, channel, step, rng,
                                      sdma_rule)
                hist += np.bincount(draws, minlength=m_max + 1)
        return hist / hist.sum()

    if method == "enumerate":
        size = sum(_enumeration_size(scheme, int(k), n, m_max, False) for k in ks)
        if size > ENUMERATION_LIMIT:
            raise EnumerationTooLarge(f"{size} configurations exceed {ENUMERATION_LIMIT}")
        given = enumerate_mtilde_given_load
    else:
        given = mtilde_given_load
    pmf = np.zeros(m_max + 1)
    for k in ks:
        pmf += load.probs[k] * given(scheme, int(k), n, m_max, sdma_rule)
    return pmf


def typical_joint_pmf(scheme, extra_load, n, m_max, method="exact",
                      samples=DEFAULT_MC_SAMPLES, seed=None, sdma_rule="min"):
    """Joint pmf ``[k0, m]`` for the typical UE, whose cell holds
    ``1 + K_extra`` UEs with ``K_extra ~ extra_load``."""
    scheme = Scheme.parse(scheme)
    sdma_rule = _check_rule(sdma_rule)
    n, m_max = check_int(n, "n", 1), check_int(m_max, "m_max", 1)
    method = _check_method(method)
    ks = np.nonzero(extra_load.probs > 0)[0]
    k_top = int(ks.max()) + 1
    joint = np.zeros((k_top + 1, m_max + 1))

    if method == "monte-carlo":
        rng = check_random_state(seed)
        for k, count in zip(extra_load.support, _mc_counts(extra_load, samples, rng)):
            for step in _chunks(int(count)):
                k0, m = sample_typical(scheme, int(k) + 1, n, m_max, step, rng,
                                       sdma_rule)
                np.add.at(joint, (k0, m), 1)
        return joint / joint.sum()

    if method == "enumerate":
        size = sum(_enumeration_size(scheme, int(k) + 1, n, m_max, True) for k in ks)
        if size > ENUMERATION_LIMIT:
            raise EnumerationTooLarge(f"{size} configurations exceed {ENUMERATION_LIMIT}")
        given = enumerate_typical_given_load
    else:
        given = typical_given_load
    for k in ks:
        part = given(scheme, int(k) + 1, n, m_max, sdma_rule)
        joint[: part.shape[0]] += extra_load.probs[k] * part
    return joint


def access_profile(scheme, load, extra_load, n, m_max, method="exact",
                   samples=DEFAULT_MC_SAMPLES, seed=None, sdma_rule="min"):
    """Bundle the interferer and typical-UE distributions for one setup."""
    scheme = Scheme.parse(scheme)
    if method == "monte-carlo":
        seeds = np.random.SeedSequence(seed).spawn(2)
    else:
        seeds = (None, None)
    mtilde = interferer_mtilde_pmf(scheme, load, n, m_max, method, samples, seeds[0],
                                   sdma_rule)
    joint = typical_joint_pmf(scheme, extra_load, n, m_max, method, samples, seeds[1],
                              sdma_rule)
    return AccessProfile(scheme, n, m_max, mtilde, joint)


def degenerate_profile(m, mtilde, m_max=None):
    """Profile with the typical group size fixed at ``m`` (K0 = m) and every
    interferer serving exactly ``mtilde`` UEs; the fully loaded baseline."""
    m_max = max(m, mtilde) if m_max is None else m_max
    pmf = np.zeros(m_max + 1)
    pmf[mtilde] = 1.0
    joint = np.zeros((m + 1, m_max + 1))
    joint[m, m] = 1.0
    return AccessProfile(Scheme.SCHEME1, 1, m_max, pmf, joint)


__all__ = [
    "Scheme", "CellAllocation", "AccessProfile", "LoadPmf",
    "allocate_scheme1", "allocate_scheme2", "allocate",
    "subchannel_activity_probability", "interferer_mtilde_pmf",
    "typical_joint_pmf", "access_profile", "degenerate_profile",
]
