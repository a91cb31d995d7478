"""Counter-based random streams keyed by (seed, trial).

Every random quantity in pipalter is drawn from a numpy Generator over the
Philox counter-based bit generator. A stream is identified by an integer
seed and a tuple of integer keys (usually the trial index), so trial t of
an experiment always sees the same draws no matter how trials are ordered,
batched or split across processes. Coordinate j of a trial is the j-th
draw of that trial's stream.

Examples:
    >>> a = trial_uniforms(7, trial=3, size=4)
    >>> b = trial_uniforms(7, trial=3, size=4)
    >>> bool((a == b).all())
    True
"""

import logging
from typing import Optional

import numpy as np
import numpy.typing as npt

logger = logging.getLogger(__name__)

# distinguishes generator streams from trial streams sharing a seed
GENERATOR_DOMAIN = 0
TRIAL_DOMAIN = 1
SAMPLER_DOMAIN = 2


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Returns a Philox backed Generator keyed by seed and keys.

    Args:
        seed:
            A nonnegative integer experiment seed.
        keys:
            Nonnegative integers identifying the substream (e.g. a domain
            tag followed by a trial index).

    Returns:
        A numpy Generator whose draws depend only on (seed, keys).
    """

    sequence = np.random.SeedSequence(entropy=int(seed),
                                      spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))


def generator_stream(seed: int) -> np.random.Generator:
    """Returns the stream used by instance and graph generators."""

    return stream(seed, GENERATOR_DOMAIN)


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """Returns the stream owned by a single round-and-alter trial."""

    return stream(seed, TRIAL_DOMAIN, trial)


def trial_uniforms(seed: int, trial: int, size: int) -> npt.NDArray:
    """Returns the size uniform draws of a trial in coordinate order."""

    return trial_stream(seed, trial).random(size)


def batch_uniforms(seed: int, start: int, stop: int, size: int
) -> npt.NDArray[np.float64]:
    """Returns a (stop - start) x size array of trial uniforms.

    Row k holds the draws of trial start + k, identical to calling
    trial_uniforms for that trial.
    """

    result = np.empty((stop - start, size))
    for row, trial in enumerate(range(start, stop)):
        result[row] = trial_uniforms(seed, trial, size)
    return result


def fresh_seed(seed: Optional[int] = None) -> int:
    """Returns seed or, if None, a new seed drawn from system entropy."""

    if seed is not None:
        return int(seed)

    drawn = int(np.random.SeedSequence().entropy % (2**63))
    logger.warning('No seed given; drew seed %d from system entropy', drawn)
    return drawn
