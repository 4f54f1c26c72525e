# src/apps/montecarlo/simulation.py
"""
Event-level simulation of the coincidence runs and of the single-shot game.

All randomness comes from Philox generators keyed by (seed, stream, index):
every oracle row owns its own substream and every game trial its own Philox
counter block, so results do not depend on evaluation order, block size or
the number of workers.
"""

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.optimize import bisect

from apps.detection.povm import (
    DetectorConfig,
    detection_probabilities,
    povm_element,
    probabilities_from_element,
    window_probability,
)
from apps.inference.betting import DecisionRule, decide, success_probability
from apps.optics.patterns import PatternModel
from apps.qubits.exceptions import SimulationError, UnphysicalParameter
from apps.qubits.states import ALL_ORACLES, OracleFunction, deutsch_output

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64
COINCIDENCE_STREAM = 0
GAME_STREAM = 1
DRAWS_PER_TRIAL = 4


class CountsInconsistent(SimulationError):
    default_detail = "Coincidence counts cannot be produced by this geometry."
    default_code = "counts_inconsistent"


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not (0 <= seed < SEED_LIMIT):
        raise UnphysicalParameter(f"Seed must be an unsigned 64-bit integer, got {seed!r}.")
    return int(seed)


def substream(seed, *key):
    """Counter-based generator for one (seed, key) pair."""
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def oracle_index(f):
    return int(f.label, 2)


# --- Coincidence runs ---
@dataclass(frozen=True)
class RunConfig:
    f: OracleFunction
    model: PatternModel
    detector: DetectorConfig
    herald_rate: float
    duration: float
    seed: int

    def __post_init__(self):
        if not (math.isfinite(self.herald_rate) and self.herald_rate > 0):
            raise UnphysicalParameter(f"herald_rate must be positive, got {self.herald_rate!r}.")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise UnphysicalParameter(f"duration must be positive, got {self.duration!r}.")
        check_seed(self.seed)


@dataclass(frozen=True)
class CountResult:
    """Coincidences for one oracle; std_error is the Poisson sqrt(expected)."""
    oracle: str
    coincidences: int
    expected: float
    std_error: float
    seed: int


def simulate_coincidences(cfg):
    """
    N heralds ~ Poisson(rate * duration); each yields a coincidence with the
    window probability of the Deutsch output state (efficiency included).
    """
    p = window_probability(deutsch_output(cfg.f), cfg.model, cfg.detector)
    mean_heralds = cfg.herald_rate * cfg.duration
    rng = substream(cfg.seed, COINCIDENCE_STREAM, oracle_index(cfg.f))
    heralds = int(rng.poisson(mean_heralds))
    coincidences = int(rng.binomial(heralds, min(max(p, 0.0), 1.0)))
    expected = mean_heralds * p
    logger.debug("f=%s: %d heralds, %d coincidences (expected %.1f)", cfg.f.label, heralds, coincidences, expected)
    return CountResult(cfg.f.label, coincidences, expected, math.sqrt(expected), cfg.seed)


def simulate_table(cfg):
    """All four oracle rows of one run, each on the substream keyed by its oracle."""
    rows = [simulate_coincidences(dataclasses.replace(cfg, f=f)) for f in ALL_ORACLES]
    logger.info(
        "Coincidence table (seed %d): %s", cfg.seed, ", ".join(f"{r.oracle}={r.coincidences}" for r in rows)
    )
    return rows


def mean_over_seeds(cfg, seeds):
    """Mean coincidence count over the seeds and its Poisson standard error."""
    results = [simulate_coincidences(dataclasses.replace(cfg, seed=seed)) for seed in seeds]
    if not results:
        raise UnphysicalParameter("mean_over_seeds needs at least one seed.")
    mean = float(np.mean([r.coincidences for r in results]))
    return mean, math.sqrt(results[0].expected / len(results))


def calibrate_to_table(counts_constant, counts_balanced, duration, detector, model):
    """
    Fringe visibility V_t and herald rate that reproduce a constant/balanced
    pair of coincidence counts with the given detector.
    """
    if counts_balanced < 0 or counts_constant <= 0 or counts_balanced > counts_constant:
        raise CountsInconsistent(
            f"Need counts_constant > counts_balanced >= 0, got {counts_constant!r} and {counts_balanced!r}."
        )
    if not duration > 0:
        raise UnphysicalParameter(f"duration must be positive, got {duration!r}.")
    ideal = povm_element(model.with_visibility(1.0), detector)

    def table_at(visibility):
        return probabilities_from_element(ideal.with_coherence_scaled(visibility))

    def ratio(visibility):
        table = table_at(visibility)
        return table.p_b / table.p_c

    target = counts_balanced / counts_constant
    if table_at(1.0).p_c <= 0.0:
        raise CountsInconsistent("The detector never clicks for constant functions.")
    lowest = ratio(1.0)
    if abs(target - 1.0) <= 1e-12:
        visibility = 0.0
    elif abs(target - lowest) <= 1e-12:
        visibility = 1.0
    elif lowest < target < 1.0:
        visibility = bisect(lambda v: ratio(v) - target, 0.0, 1.0, xtol=1e-13, maxiter=200)
    else:
        raise CountsInconsistent(
            f"Count ratio {target:.6f} is outside the attainable range [{lowest:.6f}, 1]."
        )
    herald_rate = counts_constant / (duration * table_at(visibility).p_c)
    logger.info(
        "Calibrated to counts %d/%d: V_t=%.6f, herald rate %.4f /s",
        counts_constant, counts_balanced, visibility, herald_rate,
    )
    return visibility, herald_rate


# --- Single-shot game ---
@dataclass(frozen=True)
class GameResult:
    trials: int
    successes: int
    analytic: float
    seed: int

    @property
    def frequency(self):
        return self.successes / self.trials

    @property
    def std_error(self):
        """Binomial standard error of the frequency at the analytic probability."""
        return math.sqrt(self.analytic * (1.0 - self.analytic) / self.trials)


def trial_stream(seed, stream, first_trial):
    """
    Philox generator positioned at `first_trial`: trial t always reads the
    counter block t + 1, whichever block of trials it is drawn in.
    """
    key = np.random.SeedSequence(check_seed(seed), spawn_key=(int(stream),)).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=int(first_trial)))


def _play_block(seed, start, size, landing, eta, rule):
    rng = trial_stream(seed, GAME_STREAM, start)
    # One Philox block (four doubles) per trial: oracle draw, click draw, two unused.
    draws = rng.random((size, DRAWS_PER_TRIAL))
    oracles = np.minimum((draws[:, 0] * 4).astype(np.int64), 3)
    clicked = draws[:, 1] < eta * landing[oracles]
    constant = (oracles == 0) | (oracles == 3)
    bet_constant = np.where(
        clicked,
        decide(True, rule) == DecisionRule.DETECT_CONSTANT.value,
        decide(False, rule) == DecisionRule.DETECT_CONSTANT.value,
    )
    return int(np.count_nonzero(bet_constant == constant))


def play_single_shot_game(trials, model, detector, eta, seed, rule=DecisionRule.DETECT_CONSTANT,
                          block_size=None, workers=None):
    """
    Draws f uniformly for every trial, samples click / no click and bets by
    `rule`. Oracle indices follow the labels 00, 01, 10, 11.
    """
    if not (isinstance(trials, (int, np.integer)) and trials > 0):
        raise UnphysicalParameter(f"trials must be a positive integer, got {trials!r}.")
    seed = check_seed(seed)
    options = settings.SIMULATION["monte_carlo"]
    block_size = block_size or options["block_size"]
    workers = workers or options["workers"]

    table = detection_probabilities(model, detector.with_efficiency(1.0))
    analytic = success_probability(table, eta, rule)
    landing = np.array([table.p00, table.p01, table.p10, table.p11])
    blocks = [(start, min(block_size, trials - start)) for start in range(0, trials, block_size)]

    def play(item):
        start, size = item
        return _play_block(seed, start, size, landing, eta, rule)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(play, blocks))
    else:
        successes = sum(play(item) for item in blocks)

    result = GameResult(trials, successes, analytic, seed)
    logger.info(
        "Single-shot game: %d/%d successes (%.5f, analytic %.5f)",
        successes, trials, result.frequency, result.analytic,
    )
    return result
