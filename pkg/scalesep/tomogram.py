"""
Symplectic tomograms of (mixtures of) Gaussian states.

The tomogram ``w(X, mu, nu)`` is the joint density of the quadratures
``X_i = mu_i q_i + nu_i p_i``. For a zero-mean Gaussian state it is the normal density
with covariance ``sigma_X = L V L^T``, where row ``i`` of ``L`` carries ``mu_i`` at the
``q_i`` slot and ``nu_i`` at the ``p_i`` slot. Densities are linear in the state, so a
mixture's tomogram is the weighted sum of its components' tomograms.
"""
import attr
import numpy as np
import scipy.integrate
import scipy.stats

from ._api import DegenerateDirectionError, DimensionError, DomainError, GridTooCoarseError, ZeroScaleError
from ._data import DispersionMatrix, GridSpec, NumericGrid, NumericMoments, SampledTomogram
from .uncertainty import as_dispersion


__all__ = ["GaussianTomogram", "RecipeSetting", "tomographic_sigma", "tomogram_density",
           "recipe_settings", "extract_dispersion", "sample", "numeric_moments",
           "scale_tomogram", "homogeneity_residual"]


#: Largest accepted deviation of a sampled tomogram's mass from 1
MASS_TOL = 1e-3

#: Smallest accepted grid half-width, in standard deviations
MIN_HALF_SPAN = 4.0


def _directions(n_modes, mu, nu):
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if mu.shape != (n_modes,) or nu.shape != (n_modes,):
        raise DimensionError(f"need {n_modes} values of mu and of nu, got shapes {mu.shape}, {nu.shape}")
    L = np.zeros((n_modes, 2 * n_modes))
    L[np.arange(n_modes), 2 * np.arange(n_modes)] = mu
    L[np.arange(n_modes), 2 * np.arange(n_modes) + 1] = nu
    return L


def tomographic_sigma(V, mu, nu):
    """
    :param V: the state (its mean is ignored)
    :type V: :class:`scalesep.DispersionMatrix`
    :param mu: one position coefficient per mode
    :param nu: one momentum coefficient per mode
    :returns: the ``N x N`` covariance ``L V L^T`` of the quadratures
    :rtype: numpy.ndarray
    """
    V = as_dispersion(V)
    L = _directions(V.n_modes, mu, nu)
    return L @ V.matrix @ L.T


def _check_nondegenerate(sigma):
    scale = max(float(np.max(np.abs(sigma))), np.finfo(float).tiny)
    smallest = float(np.linalg.eigvalsh(sigma)[0])
    if smallest <= 1e-12 * scale:
        raise DegenerateDirectionError(f"tomographic dispersion matrix is singular (smallest eigenvalue {smallest:.3g})")


def tomogram_density(V, X, mu, nu):
    """
    :param V: the state (its mean is ignored)
    :type V: :class:`scalesep.DispersionMatrix`
    :param X: a point, or an array of points of shape ``(..., N)``
    :param mu: one position coefficient per mode
    :param nu: one momentum coefficient per mode
    :returns: the normal density with covariance :func:`tomographic_sigma` at ``X``
    :raises DegenerateDirectionError: if that covariance is singular
    """
    sigma = tomographic_sigma(V, mu, nu)
    _check_nondegenerate(sigma)
    X = np.asarray(X, dtype=float)
    return scipy.stats.multivariate_normal(mean=np.zeros(len(sigma)), cov=sigma).pdf(X)


def _weights_sum_to_one(instance, attribute, value):
    weights = [w for w, _ in value]
    if not value or any(w < 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
        raise DomainError(f"mixture weights must be non-negative and sum to 1, got {weights}")
    if len({V.n_modes for _, V in value}) != 1:
        raise DimensionError("mixture components must have the same number of modes")


def _centered(components):
    return tuple((float(w), DispersionMatrix(as_dispersion(V).V)) for w, V in components)


def _scale_factors(value):
    if value is None:
        return None
    value = np.array(value, dtype=float)
    if np.any(value == 0):
        raise ZeroScaleError(f"scale factors must be nonzero, got {value}")
    value.flags.writeable = False
    return value


@attr.s(slots=True, frozen=True)
class GaussianTomogram:
    """
    :ivar components: ``(w_k, V_k)`` pairs, weights summing to 1; means are dropped
    :ivar lambda_q: per-mode position scales, see :func:`scale_tomogram`
    :ivar lambda_p: per-mode momentum scales

    Evaluator of ``w(X, mu, nu) = sum_k w_k w_k(X, mu / lambda_q, nu / lambda_p)``.
    """
    components = attr.ib(converter=_centered, validator=_weights_sum_to_one)
    lambda_q = attr.ib(default=None, converter=_scale_factors, eq=False)
    lambda_p = attr.ib(default=None, converter=_scale_factors, eq=False)

    def __attrs_post_init__(self):
        for name in ("lambda_q", "lambda_p"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, _scale_factors(np.ones(self.n_modes)))
            elif getattr(self, name).shape != (self.n_modes,):
                raise DimensionError(f"{name} needs one entry per mode")

    @classmethod
    def of(cls, V):
        """The tomogram of a single state."""
        return cls([(1.0, V)])

    @classmethod
    def mixture(cls, components):
        """The tomogram of ``sum_k w_k rho_k`` for ``(w_k, V_k)`` in ``components``."""
        return cls(components)

    @property
    def n_modes(self):
        return self.components[0][1].n_modes

    def _arguments(self, mu, nu):
        _directions(self.n_modes, mu, nu)
        return (np.atleast_1d(np.asarray(mu, dtype=float)) / self.lambda_q,
                np.atleast_1d(np.asarray(nu, dtype=float)) / self.lambda_p)

    def sigma(self, mu, nu):
        """Covariance of the quadratures ``X`` (weighted over components, all zero-mean)."""
        mu, nu = self._arguments(mu, nu)
        return sum(w * tomographic_sigma(V, mu, nu) for w, V in self.components)

    def density(self, X, mu, nu):
        mu, nu = self._arguments(mu, nu)
        return sum(w * tomogram_density(V, X, mu, nu) for w, V in self.components if w > 0)

    def marginal(self, modes):
        """The tomogram of the reduced state on ``modes`` (1-based, in the given order)."""
        index = [i for mode in modes for i in (2 * mode - 2, 2 * mode - 1)]
        if any(not 1 <= mode <= self.n_modes for mode in modes):
            raise DimensionError(f"modes {modes} out of range 1..{self.n_modes}")
        components = [(w, V.matrix[np.ix_(index, index)]) for w, V in self.components]
        positions = [mode - 1 for mode in modes]
        return GaussianTomogram(components, self.lambda_q[positions], self.lambda_p[positions])


@attr.s(slots=True, frozen=True)
class RecipeSetting:
    """
    :ivar label: name of the evaluation, e.g. ``"q1+p1"`` or ``"p1q2"``
    :ivar modes: the one or two modes the evaluation involves
    :ivar mu: ``mu`` restricted to ``modes``
    :ivar nu: ``nu`` restricted to ``modes``

    One evaluation of the quadrature dispersion used to reconstruct ``V``.
    """
    label = attr.ib()
    modes = attr.ib(converter=tuple)
    mu = attr.ib(converter=tuple)
    nu = attr.ib(converter=tuple)


def recipe_settings(n_modes):
    """
    Every evaluation the reconstruction needs, in order. Per mode ``j``: ``mu_j = 1``
    gives ``s_qjqj``, ``nu_j = 1`` gives ``s_pjpj`` and ``mu_j = nu_j = 1`` gives their
    sum plus ``2 s_qjpj``. Per pair ``j < k`` the four settings with one unit
    coefficient on each mode give the cross moments.
    """
    settings = []
    for j in range(1, n_modes + 1):
        settings.append(RecipeSetting(f"q{j}", (j,), (1.0,), (0.0,)))
        settings.append(RecipeSetting(f"p{j}", (j,), (0.0,), (1.0,)))
        settings.append(RecipeSetting(f"q{j}+p{j}", (j,), (1.0,), (1.0,)))
    for j in range(1, n_modes + 1):
        for k in range(j + 1, n_modes + 1):
            settings.append(RecipeSetting(f"q{j}q{k}", (j, k), (1.0, 1.0), (0.0, 0.0)))
            settings.append(RecipeSetting(f"q{j}p{k}", (j, k), (1.0, 0.0), (0.0, 1.0)))
            settings.append(RecipeSetting(f"p{j}q{k}", (j, k), (0.0, 1.0), (1.0, 0.0)))
            settings.append(RecipeSetting(f"p{j}p{k}", (j, k), (0.0, 0.0), (1.0, 1.0)))
    return settings


def sample(t, mu, nu, span_sigmas=10.0, points=2001):
    """
    :param t: the tomogram
    :type t: :class:`GaussianTomogram`
    :param mu: one position coefficient per mode
    :param nu: one momentum coefficient per mode
    :param span_sigmas: half-width of every axis, in standard deviations of ``X_i``
    :param points: points per axis (an int or one per axis)
    :rtype: :class:`scalesep.SampledTomogram`
    :raises DegenerateDirectionError: if the directions are degenerate
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    sigma = t.sigma(mu, nu)
    _check_nondegenerate(sigma)
    half = span_sigmas * np.sqrt(np.diag(sigma))
    count = np.broadcast_to(np.asarray(points, dtype=int), half.shape)
    grid = GridSpec(-half, half, count)
    return SampledTomogram(mu, nu, grid, t.density(grid.mesh(), mu, nu))


def _integrate(f, axes):
    for axis in reversed(axes):
        f = scipy.integrate.trapezoid(f, axis, axis=-1)
    return float(f)


def numeric_moments(st):
    """
    :param st: the sampled tomogram
    :type st: :class:`scalesep.SampledTomogram`
    :rtype: :class:`scalesep.NumericMoments`
    :raises GridTooCoarseError: if the mass deviates from 1 by more than :data:`MASS_TOL`,
            or an axis covers less than :data:`MIN_HALF_SPAN` standard deviations either side

    Trapezoid-rule means and centered second moments, normalized by the computed mass.
    """
    axes = st.grid.axes()
    X = st.grid.mesh()
    mass = _integrate(st.values, axes)
    if not abs(mass - 1) <= MASS_TOL:
        raise GridTooCoarseError(f"sampled tomogram has mass {mass:.6g}; refine or widen the grid")

    n = st.grid.ndim
    mean = np.array([_integrate(X[..., i] * st.values, axes) for i in range(n)]) / mass
    centered = X - mean
    sigma = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            sigma[i, j] = sigma[j, i] = _integrate(centered[..., i] * centered[..., j] * st.values, axes) / mass

    for i, axis in enumerate(axes):
        sd = np.sqrt(sigma[i, i])
        if min(mean[i] - axis[0], axis[-1] - mean[i]) < MIN_HALF_SPAN * sd:
            raise GridTooCoarseError(f"axis {i + 1} covers less than {MIN_HALF_SPAN:g} standard deviations either side")
    return NumericMoments(mean, sigma)


def _recipe_value(t, setting, numeric):
    sub = t.marginal(setting.modes)
    if numeric is None:
        sigma = sub.sigma(setting.mu, setting.nu)
    else:
        points = numeric.points if len(setting.modes) == 1 else numeric.cross_points
        sigma = numeric_moments(sample(sub, setting.mu, setting.nu, numeric.span_sigmas, points)).sigma
    return sigma[0, -1]


def extract_dispersion(t, numeric=None):
    """
    :param t: the tomogram
    :type t: :class:`GaussianTomogram`
    :param numeric: sample the tomogram and integrate instead of using its closed form
    :type numeric: :class:`scalesep.NumericGrid`
    :rtype: :class:`scalesep.DispersionMatrix`

    Reconstruct ``V`` from the quadrature dispersions of :func:`recipe_settings`. The
    numeric path samples 1-D marginals for single-mode entries and 2-D marginals for
    cross-mode entries.
    """
    values = {s.label: _recipe_value(t, s, numeric) for s in recipe_settings(t.n_modes)}
    V = np.empty((2 * t.n_modes, 2 * t.n_modes))
    for j in range(1, t.n_modes + 1):
        q, p = 2 * j - 2, 2 * j - 1
        V[q, q] = values[f"q{j}"]
        V[p, p] = values[f"p{j}"]
        V[q, p] = V[p, q] = (values[f"q{j}+p{j}"] - V[q, q] - V[p, p]) / 2
        for k in range(j + 1, t.n_modes + 1):
            qk, pk = 2 * k - 2, 2 * k - 1
            for (a, b), label in (((q, qk), f"q{j}q{k}"), ((q, pk), f"q{j}p{k}"),
                                  ((p, qk), f"p{j}q{k}"), ((p, pk), f"p{j}p{k}")):
                V[a, b] = V[b, a] = values[label]
    return DispersionMatrix(V)


def scale_tomogram(t, lambda_q, lambda_p):
    """
    :param t: the tomogram
    :type t: :class:`GaussianTomogram`
    :param lambda_q: per-mode position scales, nonzero
    :param lambda_p: per-mode momentum scales, nonzero
    :rtype: :class:`GaussianTomogram`
    :raises ZeroScaleError: for a zero scale

    ``w_S(X, mu, nu) = w(X, mu / lambda_q, nu / lambda_p)``, the tomogram of the state
    scaled by ``x = (1/lambda_q1, 1/lambda_p1, ...)``.
    """
    lambda_q = _scale_factors(np.atleast_1d(lambda_q))
    lambda_p = _scale_factors(np.atleast_1d(lambda_p))
    if lambda_q.shape != (t.n_modes,) or lambda_p.shape != (t.n_modes,):
        raise DimensionError(f"need {t.n_modes} scales of each kind")
    return GaussianTomogram(t.components, t.lambda_q * lambda_q, t.lambda_p * lambda_p)


def homogeneity_residual(t, X, mu, nu):
    """``|w(X, mu, nu) - w(1, mu / X, nu / X) / |X||`` for a single-mode tomogram and ``X != 0``."""
    if t.n_modes != 1:
        raise DimensionError(f"homogeneity is checked for one mode, got {t.n_modes}")
    X = float(X)
    if X == 0:
        raise DomainError("the homogeneity relation needs X != 0")
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    return abs(float(t.density([X], mu, nu)) - float(t.density([1.0], mu / X, nu / X)) / abs(X))
