"""
Two-mode Gaussian states in position representation and mixtures of two of them.

A pure state ``psi(q) ~ exp(-q^T M^-1 q / 2)`` is fixed by the real symmetric matrix
``M = [[m11, m], [m, m22]]``. Its Wigner function is
``exp(-(q^T M^-1 q + p^T M p)) / pi**2`` and its dispersion matrix has position block
``M / 2`` and momentum block ``M^-1 / 2``.
"""
import numpy as np
import scipy.integrate
import scipy.optimize

from ._api import DomainError, NoWindowError, NumericalError
from ._data import (AlphaPoint, DispersionMatrix, FailureWindow, GaussianMixtureParams,
                    PureGaussianParams, Status)
from .criterion import verdict_tolerance


__all__ = ["pure_covariance", "wigner_value", "wigner_covariance_numeric", "mixture_covariance",
           "det_cmix", "det_cmix_time_reversed", "special_case_det", "failure_window",
           "symmetric_mixture", "alpha_sweep"]


# Agreement required between the analytic window roots and bisection
_ROOT_TOL = 1e-10


def _params(M):
    if isinstance(M, PureGaussianParams):
        return M
    return PureGaussianParams(*M)


def pure_covariance(M):
    """
    :param M: the position-space matrix
    :type M: :class:`scalesep.PureGaussianParams`
    :returns: the zero-mean two-mode state, ordered ``(q1, p1, q2, p2)``
    :rtype: :class:`scalesep.DispersionMatrix`
    :raises DomainError: unless ``M`` is positive definite
    """
    M = _params(M)
    V = np.zeros((4, 4))
    V[0::2, 0::2] = M.matrix / 2
    V[1::2, 1::2] = M.inverse / 2
    return DispersionMatrix(V)


def wigner_value(M, q, p):
    """
    :param M: the position-space matrix
    :type M: :class:`scalesep.PureGaussianParams`
    :param q: positions, shape ``(..., 2)``
    :param p: momenta, shape ``(..., 2)``
    :returns: the Wigner function at every ``(q, p)``
    """
    M = _params(M)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    exponent = np.einsum("...i,ij,...j->...", q, M.inverse, q) + np.einsum("...i,ij,...j->...", p, M.matrix, p)
    return np.exp(-exponent) / np.pi ** 2


def wigner_covariance_numeric(M, span=7.0, points=35):
    """
    Second moments of the Wigner function by the trapezoid rule on a 4-D grid, each
    axis covering ``span`` standard deviations either side of the origin. The moments
    are normalized by the computed mass.
    """
    M = _params(M)
    exact = pure_covariance(M).matrix
    axes = [np.linspace(-span * s, span * s, points) for s in np.sqrt(np.diag(exact))]
    q1, p1, q2, p2 = np.meshgrid(*axes, indexing="ij")
    xi = (q1, p1, q2, p2)
    W = wigner_value(M, np.stack((q1, q2), axis=-1), np.stack((p1, p2), axis=-1))

    def integrate(f):
        for axis in reversed(axes):
            f = scipy.integrate.trapezoid(f, axis, axis=-1)
        return f

    mass = integrate(W)
    V = np.empty((4, 4))
    for a in range(4):
        for b in range(a, 4):
            V[a, b] = V[b, a] = integrate(xi[a] * xi[b] * W) / mass
    return DispersionMatrix(V)


def mixture_covariance(mix):
    """
    :param mix: weight and the two components
    :type mix: :class:`scalesep.GaussianMixtureParams`
    :rtype: :class:`scalesep.DispersionMatrix`

    Both components have zero mean, so the mixture's dispersion matrix is the convex
    combination of theirs.
    """
    V = mix.alpha * pure_covariance(mix.M).matrix + (1 - mix.alpha) * pure_covariance(mix.N).matrix
    return DispersionMatrix(V)


def det_cmix(mix):
    """``det C_mix = alpha**2 (1 - alpha)**2 det(M - N)**2 / (16 |M| |N|)``"""
    a = mix.alpha
    diff = float(np.linalg.det(mix.M.matrix - mix.N.matrix))
    return a ** 2 * (1 - a) ** 2 * diff ** 2 / (16 * mix.M.det * mix.N.det)


def det_cmix_time_reversed(mix):
    """
    ``det C^x_mix`` at ``x = -1``::

        det_cmix - [alpha m + (1 - alpha) n] [alpha m / |M| + (1 - alpha) n / |N|] / 4
    """
    a, M, N = mix.alpha, mix.M, mix.N
    return det_cmix(mix) - (a * M.m + (1 - a) * N.m) * (a * M.m / M.det + (1 - a) * N.m / N.det) / 4


def special_case_det(m11, m22, m, alpha):
    """
    :param m11: shared position variance parameter of mode 1
    :param m22: shared position variance parameter of mode 2
    :param m: correlation of the first component; the second has ``-m``
    :param alpha: weight of the first component
    :returns: ``m**4 alpha**2 (1 - alpha)**2 / |M|**2 - m**2 (2 alpha - 1)**2 / (4 |M|)``
    :raises DomainError: unless ``|M| > 0``

    :func:`det_cmix_time_reversed` for :func:`symmetric_mixture`. Vectorizes over ``alpha``.
    """
    det = _params((m11, m22, m)).det
    alpha = np.asarray(alpha, dtype=float)
    value = m ** 4 * alpha ** 2 * (1 - alpha) ** 2 / det ** 2 - m ** 2 * (2 * alpha - 1) ** 2 / (4 * det)
    return value if value.ndim else float(value)


def failure_window(m11, m22, m):
    """
    :param m11: shared position variance parameter of mode 1
    :param m22: shared position variance parameter of mode 2
    :param m: correlation of the first component
    :rtype: :class:`scalesep.FailureWindow`
    :raises DomainError: unless ``|M| > 0`` and ``m != 0``
    :raises NoWindowError: if the two interior roots coincide
    :raises NumericalError: if the roots disagree with bisection

    Weights ``alpha`` at which the symmetric mixture escapes detection by partial time
    reversal. With ``alpha = 1/2 - beta`` and ``u = beta**2`` the determinant vanishes
    where ``u**2 - (1/2 + |M|/m**2) u + 1/16 = 0``. The roots multiply to 1/16 and one
    of them exceeds 1/4, so exactly one, ``u_small``, gives weights inside ``(0, 1)``:
    ``alpha = 1/2 -+ sqrt(u_small)``, with the determinant positive between them.
    """
    det = _params((m11, m22, m)).det
    if m == 0:
        raise DomainError("with m = 0 the mixture is a product state and the determinant never changes sign")

    r = det / m ** 2
    half_sum = 0.5 + r
    u_large = (half_sum + np.sqrt(half_sum ** 2 - 0.25)) / 2
    # Product of the roots is 1/16; dividing avoids cancellation for large r
    u_small = (1 / 16) / u_large
    beta = float(np.sqrt(u_small))
    if beta == 0:
        raise NoWindowError(f"no interior roots for m11={m11}, m22={m22}, m={m}")
    roots = (0.5 - beta, 0.5 + beta)

    f = lambda alpha: special_case_det(m11, m22, m, alpha)
    for root, (lo, hi) in zip(roots, ((0.0, 0.5), (0.5, 1.0))):
        oracle = scipy.optimize.bisect(f, lo, hi, xtol=1e-14)
        if abs(oracle - root) > _ROOT_TOL:
            raise NumericalError(f"analytic root {root} disagrees with bisection {oracle}")

    return FailureWindow(roots_in_unit_interval=roots, window=roots)


def symmetric_mixture(m11, m22, m, alpha):
    """The mixture of ``M = (m11, m22, m)`` with weight ``alpha`` and ``N = (m11, m22, -m)``."""
    return GaussianMixtureParams(alpha, PureGaussianParams(m11, m22, m), PureGaussianParams(m11, m22, -m))


def alpha_sweep(m11=0.5, m22=0.5, m=0.4, step=0.01, tol=None, rel=None):
    """
    :param step: spacing of ``alpha``, in ``(0, 1/2]``
    :param tol: threshold below which the determinant counts as negative, defaults to
            :func:`scalesep.criterion.verdict_tolerance` of each mixture
    :param rel: relative tolerance passed to :func:`scalesep.criterion.verdict_tolerance`
            when ``tol`` is not given
    :returns: one :class:`scalesep.AlphaPoint` per ``alpha`` in ``0, step, ..., 1``
    :rtype: [:class:`scalesep.AlphaPoint`]
    :raises DomainError: for a step outside ``(0, 1/2]``

    ``det C^x_mix`` at ``x = -1`` across the weights of :func:`symmetric_mixture`.
    A vanishing determinant is reported as ``NOT_DETECTED``.
    """
    if not 0 < step <= 0.5:
        raise DomainError(f"step must lie in (0, 0.5], got {step}")

    count = int(np.floor(1 / step + 1e-9))
    alphas = [round(i * step, 12) for i in range(count + 1)]
    if alphas[-1] < 1:
        alphas.append(1.0)

    rows = []
    for alpha in alphas:
        mix = symmetric_mixture(m11, m22, m, alpha)
        det = det_cmix_time_reversed(mix)
        threshold = verdict_tolerance(mixture_covariance(mix), rel) if tol is None else tol
        status = Status.ENTANGLED if det < -threshold else Status.NOT_DETECTED
        rows.append(AlphaPoint(alpha=alpha, det=det, status=status))
    return rows
