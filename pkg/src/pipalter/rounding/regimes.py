"""Scaling factors and regime selection for round-and-alter.

The approximation guarantee of round-and-alter depends on the width W and
the l1 column sparsity delta1 of a normalized instance. Four regimes are
distinguished:

- weak (W >= 2): alpha = 1 / (c1 delta1), sorted alteration.
- strong (W >= 2): alpha = 1 / (c2 (1 + delta1/W)^(1/(W-1))), sorted
  alteration; alpha grows with W.
- largew (W >= (2/eps^2) ln(delta1/eps) + 1): alpha = 1 - eps, sorted
  alteration, a (1 - eps)(1 - e eps) guarantee.
- smallwidth (W = 1 + eps, eps in (0, 1]): alpha = eps^2 / (c3 delta1),
  small/big split alteration.

At W = 1 PIPs are as hard as maximum independent set, so no regime applies;
a guarantee-free 'heuristic' regime is available on explicit request.

The constants are evaluated from their closed forms at import:
c1 = 4 e^(1 + 1/e), c2 = 4 e^(1 + 2/e) and c3 = 8 e^(1 + 2/e).

Examples:
    >>> round(C1, 4), round(C2, 4), round(C3, 4)
    (15.7085, 22.6936, 45.3873)
    >>> round(alpha_weak(1.0), 5)
    0.06366
"""

from dataclasses import dataclass, field
from enum import Enum
import logging
import math
from typing import Dict, Optional

from pipalter.core.errors import (EpsOutOfRangeError, RegimeMismatchError,
                                  WidthOneError)
from pipalter.instances.bases import NormalizedInstance
from pipalter.instances.normalization import NORMALIZATION_TOL

logger = logging.getLogger(__name__)

C1 = 4 * math.exp(1 + 1 / math.e)
C2 = 4 * math.exp(1 + 2 / math.e)
C3 = 8 * math.exp(1 + 2 / math.e)

# accuracy target used when a caller asks for 'auto' with an accuracy goal
DEFAULT_EPS_HINT = 0.25
# slack when matching eps against a width of 1 + eps
EPS_MATCH_TOL = 1e-9


class Regime(str, Enum):
    """The width regimes of round-and-alter."""

    WEAK_W2 = 'weak'
    STRONG_W2 = 'strong'
    LARGE_W = 'largew'
    SMALL_WIDTH = 'smallwidth'
    HEURISTIC = 'heuristic'

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RegimeConfig:
    """The scaling factor and constants of a chosen regime.

    Attributes:
        regime:
            The selected Regime.
        alpha:
            The scaling factor in (0, 1] applied to the LP solution before
            rounding.
        eps:
            The accuracy parameter for largew and smallwidth regimes, None
            otherwise.
        gamma:
            The bound on each item's summed rejection probability that the
            regime's analysis guarantees (1/2, or e * eps for largew). It is
            reported, never tuned. NaN for the heuristic regime.
        W:
            The width of the instance the configuration was built for.
        delta1:
            The l1 column sparsity of that instance.
        constants:
            The evaluated constants c1, c2 and c3.
    """

    regime: Regime
    alpha: float
    eps: Optional[float]
    gamma: float
    W: float
    delta1: float
    constants: Dict[str, float] = field(
            default_factory=lambda: {'c1': C1, 'c2': C2, 'c3': C3})

    @property
    def guarantee(self) -> float:
        """Returns the approximation factor alpha (1 - gamma)."""

        return self.alpha * (1 - self.gamma)

    @property
    def alteration(self) -> str:
        """Returns 'smallwidth' for the split alteration else 'sorting'."""

        if self.regime is Regime.SMALL_WIDTH:
            return 'smallwidth'
        return 'sorting'

    def header(self) -> str:
        """Returns a one line description for report headers."""

        eps = 'none' if self.eps is None else '{:.6g}'.format(self.eps)
        return ('regime={} alpha={:.6g} eps={} gamma={:.6g} guarantee={:.6g} '
                'W={:.6g} delta1={:.6g}').format(self.regime, self.alpha, eps,
                                                 self.gamma, self.guarantee,
                                                 self.W, self.delta1)


def _check_delta1(delta1: float) -> None:
    """Raises ValueError if delta1 is below one."""

    if delta1 < 1 - NORMALIZATION_TOL:
        msg = 'delta1 must be at least 1 after normalization not {}'
        raise ValueError(msg.format(delta1))


def alpha_weak(delta1: float) -> float:
    """Returns the scaling factor 1 / (c1 delta1) for widths W >= 2."""

    _check_delta1(delta1)
    return 1 / (C1 * delta1)


def alpha_strong(delta1: float, W: float) -> float:
    """Returns 1 / (c2 (1 + delta1/W)^(1/(W-1))) for widths W >= 2.

    The factor is nondecreasing in W and tends to 1/c2 as W grows.
    """

    _check_delta1(delta1)
    if W < 2 - NORMALIZATION_TOL:
        msg = 'alpha_strong requires W >= 2 not {}'
        raise ValueError(msg.format(W))

    # log form avoids overflow of the power for W close to 1
    exponent = math.log1p(delta1 / W) / (W - 1)
    return 1 / (C2 * math.exp(exponent))


def alpha_large_width(eps: float) -> float:
    """Returns the scaling factor 1 - eps of the large width regime.

    Raises:
        EpsOutOfRangeError: unless 0 < eps < 1/e.
    """

    if not 0 < eps < 1 / math.e:
        msg = 'The large width regime requires 0 < eps < 1/e not {}'
        raise EpsOutOfRangeError(msg.format(eps))
    return 1 - eps


def alpha_small_width(eps: float, delta1: float) -> float:
    """Returns eps^2 / (c3 delta1) for widths W = 1 + eps.

    Raises:
        EpsOutOfRangeError: unless 0 < eps <= 1.
    """

    if not 0 < eps <= 1:
        msg = 'The small width regime requires 0 < eps <= 1 not {}'
        raise EpsOutOfRangeError(msg.format(eps))
    _check_delta1(delta1)
    return eps ** 2 / (C3 * delta1)


def required_width_large_w(eps: float, delta1: float) -> float:
    """Returns the width (2/eps^2) ln(delta1/eps) + 1 of the large width
    regime.

    Examples:
        >>> round(required_width_large_w(0.25, 2), 2)
        67.54
    """

    if not 0 < eps < 1 / math.e:
        msg = 'The large width regime requires 0 < eps < 1/e not {}'
        raise EpsOutOfRangeError(msg.format(eps))
    _check_delta1(delta1)
    return 2 / eps ** 2 * math.log(delta1 / eps) + 1


def _weak(inst: NormalizedInstance) -> RegimeConfig:
    return RegimeConfig(Regime.WEAK_W2, alpha_weak(inst.delta1), None, 0.5,
                        inst.W, inst.delta1)


def _strong(inst: NormalizedInstance) -> RegimeConfig:
    return RegimeConfig(Regime.STRONG_W2, alpha_strong(inst.delta1, inst.W),
                        None, 0.5, inst.W, inst.delta1)


def _large(inst: NormalizedInstance, eps: float) -> RegimeConfig:
    return RegimeConfig(Regime.LARGE_W, alpha_large_width(eps), eps,
                        math.e * eps, inst.W, inst.delta1)


def _small(inst: NormalizedInstance, eps: float) -> RegimeConfig:
    return RegimeConfig(Regime.SMALL_WIDTH, alpha_small_width(eps, inst.delta1),
                        eps, 0.5, inst.W, inst.delta1)


def _heuristic(inst: NormalizedInstance) -> RegimeConfig:
    return RegimeConfig(Regime.HEURISTIC, alpha_weak(inst.delta1), None,
                        math.nan, inst.W, inst.delta1)


def _width_one_error(inst: NormalizedInstance) -> WidthOneError:
    msg = ('Width is 1 (delta1={:.6g}); at width one packing integer programs '
           'are as hard as maximum independent set even with delta1 <= 2, so '
           'no approximation depending on delta1 alone exists. Opt into the '
           'guarantee-free heuristic to proceed.')
    return WidthOneError(msg.format(inst.delta1))


def select_regime(inst: NormalizedInstance,
                  eps_hint: Optional[float] = None,
                  force_heuristic: bool = False,
) -> RegimeConfig:
    """Selects the regime with a guarantee for a normalized instance.

    If eps_hint is given and W reaches the large width threshold for it,
    largew is chosen. Otherwise W >= 2 selects strong (whose alpha beats
    smallwidth with eps = 1 at W = 2 for every delta1 >= 1) and 1 < W < 2
    selects smallwidth with eps = W - 1.

    Args:
        inst:
            A NormalizedInstance.
        eps_hint:
            An optional accuracy target in (0, 1/e) enabling largew.
        force_heuristic:
            If True, width one instances get the heuristic regime instead
            of an error.

    Returns:
        A RegimeConfig.

    Raises:
        WidthOneError: if W = 1 and force_heuristic is False.
        EpsOutOfRangeError: if eps_hint lies outside (0, 1/e).
    """

    W = inst.W
    if eps_hint is not None:
        required = required_width_large_w(eps_hint, inst.delta1)
        if W >= required:
            config = _large(inst, eps_hint)
            logger.info('Selected %s', config.header())
            return config

    if W >= 2 - NORMALIZATION_TOL:
        config = _strong(inst)
    elif W > 1 + NORMALIZATION_TOL:
        config = _small(inst, min(W - 1, 1.0))
    elif force_heuristic:
        logger.warning('Width one instance; running heuristic without a '
                       'guarantee')
        config = _heuristic(inst)
    else:
        raise _width_one_error(inst)

    logger.info('Selected %s', config.header())
    return config


def config_for(inst: NormalizedInstance,
               regime: Regime,
               eps: Optional[float] = None,
) -> RegimeConfig:
    """Builds the configuration of an explicitly requested regime.

    Args:
        inst:
            A NormalizedInstance.
        regime:
            A Regime or its string value.
        eps:
            For largew the accuracy target (default 0.25). For smallwidth it
            must equal W - 1 if given.

    Raises:
        RegimeMismatchError: if the instance's width violates the regime's
        requirement.
        EpsOutOfRangeError: if eps is outside the regime's range.
    """

    regime = Regime(regime)
    W = inst.W

    if regime in (Regime.WEAK_W2, Regime.STRONG_W2):
        if W < 2 - NORMALIZATION_TOL:
            msg = "Regime '{}' requires W >= 2 but W = {:.6g}"
            raise RegimeMismatchError(msg.format(regime, W))
        return _weak(inst) if regime is Regime.WEAK_W2 else _strong(inst)

    if regime is Regime.LARGE_W:
        eps = DEFAULT_EPS_HINT if eps is None else eps
        required = required_width_large_w(eps, inst.delta1)
        if W < required:
            msg = "Regime 'largew' with eps={} requires W >= {:.6g} but W = {:.6g}"
            raise RegimeMismatchError(msg.format(eps, required, W))
        return _large(inst, eps)

    if regime is Regime.SMALL_WIDTH:
        width_eps = W - 1
        if not NORMALIZATION_TOL < width_eps <= 1 + NORMALIZATION_TOL:
            msg = "Regime 'smallwidth' requires 1 < W <= 2 but W = {:.6g}"
            raise RegimeMismatchError(msg.format(W))
        if eps is not None and abs(eps - width_eps) > EPS_MATCH_TOL:
            msg = 'smallwidth eps={} does not match W - 1 = {:.10g}'
            raise RegimeMismatchError(msg.format(eps, width_eps))
        return _small(inst, min(width_eps, 1.0))

    return _heuristic(inst)
