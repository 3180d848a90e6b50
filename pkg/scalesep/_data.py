import enum
import numbers

import attr
import numpy as np

from ._api import (DimensionError, DomainError, GridTooCoarseError, InadmissibleScalingError,
                   ModeIndexError, SymplecticError, ZeroScaleError)


__all__ = ["Tolerance", "RealSymMatrix", "HermitianMatrix", "DispersionMatrix", "SymplecticForm",
           "SymplecticTransform", "ScalingVector", "TwoModeCoeffs", "BlockDecomposition", "Status",
           "Diagnostics", "Verdict", "SweepConfig", "TwoParamSurface", "UncertaintyReport",
           "DeterminantBound", "SingleModeReport", "DiscriminantReport", "SimonReport",
           "PureGaussianParams", "GaussianMixtureParams", "FailureWindow", "AlphaPoint",
           "GridSpec", "SampledTomogram", "NumericGrid", "NumericMoments"]


OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA.flags.writeable = False


def _readonly(values, dtype=float):
    """Copy ``values`` into a fresh read-only array, so frozen instances stay immutable."""
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"{attribute.name} must be positive, got {value}")


@attr.s(slots=True, frozen=True)
class Tolerance:
    """
    :ivar rel: relative tolerance, applied to a scale of the data at hand
    :ivar abs: absolute floor

    Tolerance policy for the matrix kernels. Bounds are anchored to the size of the
    entries, so every test is unchanged under overall multiplication of a matrix.
    """
    rel = attr.ib(default=1e-10, converter=float, validator=_positive)
    abs = attr.ib(default=1e-14, converter=float, validator=_positive)

    def bound(self, scale):
        """Allowed deviation for a quantity of magnitude ``scale``."""
        return self.rel * abs(scale) + self.abs


@attr.s(slots=True, frozen=True)
class RealSymMatrix:
    """
    :ivar entries: read-only ``dim x dim`` array of reals

    A real symmetric matrix of even dimension. Construction symmetrizes the entries
    exactly; use :func:`scalesep.matrices.symmetrize_validate` to reject inputs that
    are not symmetric to begin with.
    """
    entries = attr.ib(eq=False)

    def __attrs_post_init__(self):
        entries = np.array(self.entries, dtype=float)
        _check_even_square(entries)
        object.__setattr__(self, "entries", _readonly((entries + entries.T) / 2))

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def n_modes(self):
        return self.dim // 2


@attr.s(slots=True, frozen=True)
class HermitianMatrix:
    """
    :ivar entries: read-only ``dim x dim`` array of complex numbers

    A complex Hermitian matrix of even dimension, made exactly Hermitian on construction.
    """
    entries = attr.ib(eq=False)

    def __attrs_post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        _check_even_square(entries)
        object.__setattr__(self, "entries", _readonly((entries + entries.conj().T) / 2, dtype=complex))

    @property
    def dim(self):
        return self.entries.shape[0]


def _check_even_square(entries):
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {entries.shape}")
    if entries.shape[0] == 0 or entries.shape[0] % 2:
        raise DimensionError(f"expected an even, positive dimension, got {entries.shape[0]}")
    if not np.isfinite(entries).all():
        raise DomainError("matrix entries must be finite")


def _as_real_sym(value):
    return value if isinstance(value, RealSymMatrix) else RealSymMatrix(value)


@attr.s(slots=True, frozen=True)
class DispersionMatrix:
    """
    :ivar V: the centered second moments, a :class:`RealSymMatrix` of dimension ``2N``
    :ivar mean: read-only vector of the ``2N`` first moments
    :ivar n_modes: the number of modes ``N``

    The dispersion (covariance) matrix of an ``N``-mode state, with entries
    ``V[a][b] = <{xi_a, xi_b}>/2`` for the centered variables ordered
    ``(q1, p1, q2, p2, ...)``. Every criterion uses ``V`` only; the means are carried
    along for the transforms that move them.
    """
    V = attr.ib(converter=_as_real_sym, eq=False)
    mean = attr.ib(default=None, eq=False)
    n_modes = attr.ib(init=False, eq=False)

    def __attrs_post_init__(self):
        dim = self.V.dim
        mean = np.zeros(dim) if self.mean is None else np.array(self.mean, dtype=float)
        if mean.shape != (dim,):
            raise DimensionError(f"mean must have length {dim}, got shape {mean.shape}")
        if not np.isfinite(mean).all():
            raise DomainError(f"mean must be finite, got {mean}")

        variances = np.diag(self.V.entries)
        if np.any(variances < -1e-12 * max(1.0, np.max(np.abs(self.V.entries)))):
            raise DomainError(f"variances must be non-negative, got {variances}")

        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "n_modes", dim // 2)

    @property
    def matrix(self):
        """The ``2N x 2N`` array of second moments."""
        return self.V.entries

    @property
    def dim(self):
        return self.V.dim

    def block(self, j, k=None):
        """The 2x2 block coupling mode ``j`` to mode ``k`` (both 1-based, ``k`` defaults to ``j``)."""
        k = j if k is None else k
        return self.matrix[2 * (j - 1):2 * j, 2 * (k - 1):2 * k]

    @classmethod
    def from_arrays(cls, cov, mean=None, tol=None):
        """Build from raw arrays, rejecting covariances that are not symmetric within ``tol``."""
        from .matrices import symmetrize_validate
        return cls(symmetrize_validate(cov, tol or Tolerance()), mean)


@attr.s(slots=True, frozen=True)
class SymplecticForm:
    """
    :ivar n_modes: the number of modes
    :ivar matrix: ``diag(Omega, ..., Omega)`` with ``Omega = [[0, 1], [-1, 0]]``

    The canonical symplectic form in the interleaved ordering.
    """
    n_modes = attr.ib(validator=attr.validators.instance_of(numbers.Integral))
    matrix = attr.ib(init=False, eq=False, repr=False)

    def __attrs_post_init__(self):
        if self.n_modes < 1:
            raise DimensionError(f"need at least one mode, got {self.n_modes}")
        object.__setattr__(self, "matrix", _readonly(np.kron(np.eye(self.n_modes), OMEGA)))


@attr.s(slots=True, frozen=True)
class SymplecticTransform:
    """
    :ivar S: read-only ``2N x 2N`` real matrix with ``S^T Sigma S == Sigma``
    :ivar shift: read-only vector of ``2N`` displacements

    The canonical transformation ``xi -> S xi + shift``.
    """
    S = attr.ib(eq=False)
    shift = attr.ib(default=None, eq=False)

    def __attrs_post_init__(self):
        S = np.array(self.S, dtype=float)
        _check_even_square(S)
        shift = np.zeros(S.shape[0]) if self.shift is None else np.array(self.shift, dtype=float)
        if shift.shape != (S.shape[0],):
            raise DimensionError(f"shift must have length {S.shape[0]}, got shape {shift.shape}")

        sigma = SymplecticForm(S.shape[0] // 2).matrix
        deviation = np.max(np.abs(S.T @ sigma @ S - sigma))
        if deviation > 1e-9 * max(1.0, np.max(np.abs(S))) ** 2:
            raise SymplecticError(f"S^T Sigma S deviates from Sigma by {deviation:.3g}")

        object.__setattr__(self, "S", _readonly(S))
        object.__setattr__(self, "shift", _readonly(shift))

    @property
    def n_modes(self):
        return self.S.shape[0] // 2


#: Admissibility slack, so that the exact boundary |x_{2j-1} x_{2j}| = 1 is admitted
ADMISSIBLE_SLACK = 1e-12


@attr.s(slots=True, frozen=True, eq=False)
class ScalingVector:
    """
    :ivar x: read-only vector of ``2N`` nonzero scale factors, one per canonical variable

    An element ``D_x = diag(x)`` of the Abelian scaling semigroup. It is admissible
    when ``|x_{2j-1} x_{2j}| >= 1`` for every mode ``j``; partial time reversal of mode
    ``j`` is ``x_{2j} = -1`` with every other entry 1.
    """
    x = attr.ib(eq=False)

    def __attrs_post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 1 or x.size == 0 or x.size % 2:
            raise DimensionError(f"a scaling needs an even, positive number of factors, got shape {x.shape}")
        if np.any(x == 0):
            raise ZeroScaleError(f"scale factors must be nonzero, got {x}")
        object.__setattr__(self, "x", _readonly(x))

    def __eq__(self, other):
        return isinstance(other, ScalingVector) and np.array_equal(self.x, other.x)

    def __hash__(self):
        return hash(tuple(self.x))

    @property
    def n_modes(self):
        return self.x.size // 2

    @property
    def pair_products(self):
        """``x_{2j-1} x_{2j}`` for every mode ``j``."""
        return self.x[0::2] * self.x[1::2]

    def is_admissible(self, slack=ADMISSIBLE_SLACK):
        return bool(np.all(np.abs(self.pair_products) >= 1 - slack))

    @classmethod
    def identity(cls, n_modes):
        return cls(np.ones(2 * n_modes))

    @classmethod
    def momentum(cls, n_modes, factors):
        """Scale the momenta of the modes in ``factors`` (a mapping from 1-based mode to factor)."""
        x = np.ones(2 * n_modes)
        for mode, factor in factors.items():
            if not 1 <= mode <= n_modes:
                raise ModeIndexError(f"mode {mode} out of range 1..{n_modes}")
            x[2 * mode - 1] = factor
        return cls(x)

    @classmethod
    def time_reversal(cls, n_modes, mode):
        """Partial time reversal ``p_mode -> -p_mode``."""
        return cls.momentum(n_modes, {mode: -1.0})


@attr.s(slots=True, frozen=True)
class TwoModeCoeffs:
    """
    :ivar A: coefficient of ``x**2``
    :ivar B: half the coefficient of ``x``
    :ivar C: constant term

    ``det C^x = A x**2 + 2 B x + C`` for the scaling ``(1, 1, 1, x)`` of a two-mode state.
    """
    A = attr.ib(converter=float)
    B = attr.ib(converter=float)
    C = attr.ib(converter=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * x ** 2 + 2 * self.B * x + self.C


@attr.s(slots=True, frozen=True)
class BlockDecomposition:
    """
    :ivar V1: the 2x2 block of mode 1
    :ivar V2: the 2x2 block of mode 2
    :ivar V12: the 2x2 block correlating mode 1 (rows) with mode 2 (columns)
    """
    V1 = attr.ib(converter=_readonly, eq=False)
    V2 = attr.ib(converter=_readonly, eq=False)
    V12 = attr.ib(converter=_readonly, eq=False)

    def reassemble(self):
        return np.block([[self.V1, self.V12], [self.V12.T, self.V2]])


class Status(enum.Enum):
    ENTANGLED = "ENTANGLED"
    NOT_DETECTED = "NOT_DETECTED"
    UNPHYSICAL = "UNPHYSICAL"


@attr.s(slots=True, frozen=True)
class Diagnostics:
    """Two-mode side results recorded alongside a verdict (all optional)."""
    coeffs = attr.ib(default=None)
    discriminant = attr.ib(default=None)
    simon_lhs = attr.ib(default=None)
    simon_rhs = attr.ib(default=None)


@attr.s(slots=True, frozen=True)
class Verdict:
    """
    :ivar status: a :class:`Status`
    :ivar witness: the admissible :class:`ScalingVector` at which ``C^x`` fails to be
            positive, if any
    :ivar min_det: ``det C^x`` at the witness; without a witness, the smallest
            determinant found over the admissible region
    :ivar min_eig: the smallest eigenvalue of ``C^x`` at the witness; without a witness,
            the smallest eigenvalue over every evaluated scaling
    :ivar diagnostics: :class:`Diagnostics`

    The outcome of a separability test.
    """
    status = attr.ib(validator=attr.validators.instance_of(Status))
    witness = attr.ib(default=None)
    min_det = attr.ib(default=float("nan"), converter=float)
    min_eig = attr.ib(default=float("nan"), converter=float)
    diagnostics = attr.ib(factory=Diagnostics)

    def __attrs_post_init__(self):
        if self.witness is not None and not self.witness.is_admissible():
            raise InadmissibleScalingError(f"witness {self.witness.x} is not an admissible scaling")
        if self.status is Status.ENTANGLED and self.witness is None:
            raise ValueError("an ENTANGLED verdict needs a witness")

    @property
    def entangled(self):
        return self.status is Status.ENTANGLED


@attr.s(slots=True, frozen=True)
class SweepConfig:
    """
    :ivar x_min: smallest scale magnitude (at least 1, for admissibility)
    :ivar x_max: largest scale magnitude
    :ivar points_per_sign: grid points on each of the positive and negative branch
    :ivar spacing: ``"log"`` or ``"linear"``
    :ivar include_time_reversal: force ``x = -1`` (and ``x = 1``) into the grid
    """
    x_min = attr.ib(default=1.0, converter=float)
    x_max = attr.ib(default=10.0, converter=float)
    points_per_sign = attr.ib(default=101, converter=int)
    spacing = attr.ib(default="log", validator=attr.validators.in_(("log", "linear")))
    include_time_reversal = attr.ib(default=True, converter=bool)

    def __attrs_post_init__(self):
        if self.x_min < 1 - ADMISSIBLE_SLACK:
            raise InadmissibleScalingError(f"x_min must be at least 1, got {self.x_min}")
        if self.x_max < self.x_min:
            raise DomainError(f"x_max ({self.x_max}) must not be below x_min ({self.x_min})")
        if self.points_per_sign < 1:
            raise DomainError(f"points_per_sign must be positive, got {self.points_per_sign}")

    def points(self):
        """Sorted, distinct grid points, negative branch first."""
        if self.spacing == "log":
            positive = np.geomspace(self.x_min, self.x_max, self.points_per_sign)
        else:
            positive = np.linspace(self.x_min, self.x_max, self.points_per_sign)
        grid = np.concatenate((-positive, positive))
        if self.include_time_reversal:
            grid = np.concatenate((grid, [-1.0, 1.0]))
        return np.unique(grid)


@attr.s(slots=True, frozen=True)
class TwoParamSurface:
    """
    :ivar modes: the pair ``(j, k)`` of modes whose momenta are scaled by ``x`` and ``y``
    :ivar points: mapping ``(x, y) -> min_eig``, ordered x-major

    The smallest eigenvalue of ``C^x`` over a grid of two momentum scalings.
    """
    modes = attr.ib(converter=tuple)
    points = attr.ib(eq=False)
    n_modes = attr.ib()

    @property
    def min_eig(self):
        return min(self.points.values())

    def status(self, tol):
        """:class:`Status` obtained by thresholding the surface at ``-tol``."""
        return Status.ENTANGLED if self.min_eig < -tol else Status.NOT_DETECTED

    def witness(self, tol):
        """The scaling at the surface minimum, or ``None`` when the minimum is above ``-tol``."""
        if self.status(tol) is not Status.ENTANGLED:
            return None
        x, y = min(self.points, key=self.points.get)
        j, k = self.modes
        return ScalingVector.momentum(self.n_modes, {j: x, k: y})


@attr.s(slots=True, frozen=True)
class UncertaintyReport:
    """Result of a Robertson-Schrödinger check; ``block_minors`` are per-mode diagnostics only."""
    physical = attr.ib(converter=bool)
    min_eig = attr.ib(converter=float)
    det_c = attr.ib(converter=float)
    block_minors = attr.ib(default=(), converter=tuple)


@attr.s(slots=True, frozen=True)
class DeterminantBound:
    det_v = attr.ib(converter=float)
    bound = attr.ib(converter=float)
    holds = attr.ib(converter=bool)


@attr.s(slots=True, frozen=True)
class SingleModeReport:
    heisenberg = attr.ib(converter=bool)
    rs = attr.ib(converter=bool)


@attr.s(slots=True, frozen=True)
class DiscriminantReport:
    """``value`` is ``B**2 - 4AC``; ``block_form`` is the same number from block determinants."""
    value = attr.ib(converter=float)
    block_form = attr.ib(converter=float)
    passes = attr.ib(converter=bool)


@attr.s(slots=True, frozen=True)
class SimonReport:
    lhs = attr.ib(converter=float)
    rhs = attr.ib(converter=float)
    passes = attr.ib(converter=bool)

    @property
    def gap(self):
        return self.lhs - self.rhs


@attr.s(slots=True, frozen=True)
class PureGaussianParams:
    """
    :ivar m11: position variance parameter of mode 1
    :ivar m22: position variance parameter of mode 2
    :ivar m: position correlation parameter

    The real symmetric matrix ``M = [[m11, m], [m, m22]]`` of a two-mode pure Gaussian
    ``psi(q) ~ exp(-q^T M^-1 q / 2)``. ``det M`` must be strictly positive.
    """
    m11 = attr.ib(converter=float)
    m22 = attr.ib(converter=float)
    m = attr.ib(converter=float)

    def __attrs_post_init__(self):
        if not (self.m11 > 0 and self.m22 > 0):
            raise DomainError(f"m11 and m22 must be positive, got {self.m11}, {self.m22}")
        if not self.det > 0:
            raise DomainError(f"det M = m11 m22 - m^2 must be positive, got {self.det}")

    @property
    def det(self):
        return self.m11 * self.m22 - self.m ** 2

    @property
    def matrix(self):
        return np.array([[self.m11, self.m], [self.m, self.m22]])

    @property
    def inverse(self):
        return np.array([[self.m22, -self.m], [-self.m, self.m11]]) / self.det


def _unit_interval(instance, attribute, value):
    if not 0 <= value <= 1:
        raise DomainError(f"{attribute.name} must lie in [0, 1], got {value}")


@attr.s(slots=True, frozen=True)
class GaussianMixtureParams:
    """``rho = alpha rho(M) + (1 - alpha) rho(N)`` for two zero-mean pure Gaussians."""
    alpha = attr.ib(converter=float, validator=_unit_interval)
    M = attr.ib(validator=attr.validators.instance_of(PureGaussianParams))
    N = attr.ib(validator=attr.validators.instance_of(PureGaussianParams))


@attr.s(slots=True, frozen=True)
class FailureWindow:
    """Roots of ``det C^{x=-1}_mix`` in ``(0, 1)`` and the open interval between them where it is positive."""
    roots_in_unit_interval = attr.ib(converter=tuple)
    window = attr.ib(default=None)


@attr.s(slots=True, frozen=True)
class AlphaPoint:
    alpha = attr.ib(converter=float)
    det = attr.ib(converter=float)
    status = attr.ib(validator=attr.validators.instance_of(Status))


@attr.s(slots=True, frozen=True)
class GridSpec:
    """
    :ivar lo: per-axis lower bounds
    :ivar hi: per-axis upper bounds
    :ivar count: per-axis number of points (at least 3)

    A uniform grid over ``X``, one axis per mode.
    """
    lo = attr.ib(converter=lambda v: tuple(float(x) for x in np.atleast_1d(v)))
    hi = attr.ib(converter=lambda v: tuple(float(x) for x in np.atleast_1d(v)))
    count = attr.ib(converter=lambda v: tuple(int(x) for x in np.atleast_1d(v)))

    def __attrs_post_init__(self):
        if not len(self.lo) == len(self.hi) == len(self.count):
            raise DimensionError("lo, hi and count must have one entry per axis")
        if any(c < 3 for c in self.count):
            raise GridTooCoarseError(f"need at least 3 points per axis, got {self.count}")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise DomainError(f"empty grid range: {self.lo} .. {self.hi}")

    @property
    def ndim(self):
        return len(self.count)

    def axes(self):
        return [np.linspace(l, h, c) for l, h, c in zip(self.lo, self.hi, self.count)]

    def mesh(self):
        """Array of shape ``count + (ndim,)`` holding every grid point."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)


@attr.s(slots=True, frozen=True)
class SampledTomogram:
    """
    :ivar mu: read-only vector of the ``mu`` arguments, one per sampled axis
    :ivar nu: read-only vector of the ``nu`` arguments
    :ivar grid: the :class:`GridSpec` the density was sampled on
    :ivar values: read-only array of densities, shaped like ``grid.count``
    """
    mu = attr.ib(converter=_readonly, eq=False)
    nu = attr.ib(converter=_readonly, eq=False)
    grid = attr.ib(validator=attr.validators.instance_of(GridSpec))
    values = attr.ib(converter=_readonly, eq=False)

    def __attrs_post_init__(self):
        if self.mu.shape != (self.grid.ndim,) or self.nu.shape != (self.grid.ndim,):
            raise DimensionError("mu and nu need one entry per grid axis")
        if self.values.shape != self.grid.count:
            raise DimensionError(f"values have shape {self.values.shape}, grid is {self.grid.count}")
        if np.any(self.values < 0):
            raise DomainError("a tomogram is a probability density, got negative values")


@attr.s(slots=True, frozen=True)
class NumericGrid:
    """
    :ivar points: points per axis of the 1-D marginals
    :ivar span_sigmas: half-width of every axis, in standard deviations
    :ivar cross_points: points per axis of the 2-D marginals behind cross-mode entries

    Quadrature settings for the sampled path.
    """
    points = attr.ib(default=2001, converter=int)
    span_sigmas = attr.ib(default=10.0, converter=float)
    cross_points = attr.ib(default=301, converter=int)


@attr.s(slots=True, frozen=True)
class NumericMoments:
    mean = attr.ib(converter=_readonly, eq=False)
    sigma = attr.ib(converter=_readonly, eq=False)
