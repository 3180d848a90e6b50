"""
The Abelian semigroup of partial scalings ``V -> D_x V D_x``.

A scaling multiplies every canonical variable by its own factor. It is not canonical,
so it may take a physical state to an unphysical one; for a separable state and an
admissible scaling (``|x_{2j-1} x_{2j}| >= 1`` for every mode) it never does.
"""
import numpy as np

from ._api import DimensionError
from ._data import ADMISSIBLE_SLACK, DispersionMatrix, ScalingVector
from .uncertainty import as_dispersion, build_uncertainty


__all__ = ["is_admissible", "apply_scaling", "scaled_uncertainty", "compose_scalings"]


def _as_scaling(x):
    return x if isinstance(x, ScalingVector) else ScalingVector(x)


def is_admissible(x, slack=ADMISSIBLE_SLACK):
    """
    :param x: the scaling (raw sequences are converted, so zero entries raise ``ZeroScaleError``)
    :type x: :class:`scalesep.ScalingVector`
    :rtype: bool
    """
    return _as_scaling(x).is_admissible(slack)


def apply_scaling(V, x):
    """
    :param V: the state
    :type V: :class:`scalesep.DispersionMatrix`
    :param x: the scaling; inadmissible scalings are accepted here
    :type x: :class:`scalesep.ScalingVector`
    :returns: ``V'[a][b] = x[a] x[b] V[a][b]`` with mean ``x * mean``
    :rtype: :class:`scalesep.DispersionMatrix`
    :raises DimensionError: if ``x`` and ``V`` have different dimensions
    """
    V = as_dispersion(V)
    x = _as_scaling(x)
    if x.x.size != V.dim:
        raise DimensionError(f"scaling has {x.x.size} factors, state has dimension {V.dim}")
    return DispersionMatrix(np.outer(x.x, x.x) * V.matrix, x.x * V.mean)


def scaled_uncertainty(V, x):
    """``C^x = D_x V D_x + (i/2) Sigma``; the symplectic form itself is not scaled."""
    return build_uncertainty(apply_scaling(V, x))


def compose_scalings(x, y):
    """The scaling ``D_x D_y``, i.e. the entrywise product."""
    x, y = _as_scaling(x), _as_scaling(y)
    if x.x.size != y.x.size:
        raise DimensionError(f"cannot compose scalings of {x.x.size} and {y.x.size} factors")
    return ScalingVector(x.x * y.x)
