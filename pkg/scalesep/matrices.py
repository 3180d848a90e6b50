"""
Dense real-symmetric and complex-Hermitian kernels.

Every tolerance is anchored to the largest entry of the matrix at hand, so results do
not change when a matrix is multiplied by a constant. Matrices are capped at
:data:`MAX_DIM`; all algorithms are dense and cubic in the dimension.
"""
import numpy as np

from ._api import AsymmetryError, ConvergenceError, DimensionError, DomainError, NumericalError
from ._data import HermitianMatrix, RealSymMatrix, Tolerance


__all__ = ["symmetrize_validate", "hermitian_validate", "hermitian_eigenvalues", "determinant",
           "leading_principal_minors", "min_eigenvalue", "MAX_DIM"]


#: Largest dimension accepted (16 modes)
MAX_DIM = 32


def _square_even(raw, dtype):
    raw = np.asarray(raw, dtype=dtype)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {raw.shape}")
    if raw.shape[0] == 0 or raw.shape[0] % 2:
        raise DimensionError(f"expected an even, positive dimension, got {raw.shape[0]}")
    if raw.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {raw.shape[0]} exceeds the configured cap of {MAX_DIM}")
    if not np.isfinite(raw).all():
        raise DomainError("matrix entries must be finite")
    return raw


def _max_abs(entries):
    return float(np.max(np.abs(entries))) if entries.size else 0.0


def symmetrize_validate(raw, tol=Tolerance()):
    """
    :param raw: square array of reals with even dimension
    :type raw: array_like
    :param tol: tolerance on the asymmetry, relative to the largest entry
    :type tol: :class:`scalesep.Tolerance`
    :returns: ``(raw + raw^T) / 2``
    :rtype: :class:`scalesep.RealSymMatrix`
    :raises DimensionError: if ``raw`` is not square, has odd dimension, or exceeds :data:`MAX_DIM`
    :raises AsymmetryError: if ``max|raw - raw^T|`` exceeds ``tol.rel * max|raw|``
    :raises DomainError: if an entry is NaN or infinite
    """
    raw = _square_even(raw, float)
    asymmetry = _max_abs(raw - raw.T)
    if asymmetry > max(tol.rel * _max_abs(raw), tol.abs):
        raise AsymmetryError(f"matrix is not symmetric: asymmetry {asymmetry:.3g}")
    return RealSymMatrix(raw)


def hermitian_validate(raw, tol=Tolerance()):
    """As :func:`symmetrize_validate`, for complex input and the conjugate transpose."""
    raw = _square_even(raw, complex)
    asymmetry = _max_abs(raw - raw.conj().T)
    if asymmetry > max(tol.rel * _max_abs(raw), tol.abs):
        raise AsymmetryError(f"matrix is not Hermitian: asymmetry {asymmetry:.3g}")
    return HermitianMatrix(raw)


def hermitian_eigenvalues(C):
    """
    :param C: the matrix
    :type C: :class:`scalesep.HermitianMatrix`
    :returns: the ``dim`` real eigenvalues in ascending order
    :rtype: numpy.ndarray
    :raises ConvergenceError: if LAPACK fails to converge
    """
    try:
        return np.linalg.eigvalsh(C.entries)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"eigenvalue solver failed: {e}") from e


def min_eigenvalue(C):
    """Smallest eigenvalue of ``C``."""
    return float(hermitian_eigenvalues(C)[0])


def _real_determinant(entries, tol):
    det = complex(np.linalg.det(entries))
    # A Hadamard-type scale: rounding in LU grows with max|entry|**dim, not with |det|
    scale = abs(det) + _max_abs(entries) ** entries.shape[0]
    if abs(det.imag) > tol.bound(scale):
        raise NumericalError(f"determinant of a Hermitian matrix has imaginary part {det.imag:.3g}")
    return det.real


def determinant(C, tol=Tolerance()):
    """
    :param C: the matrix
    :type C: :class:`scalesep.HermitianMatrix`
    :param tol: bound on the imaginary residue
    :type tol: :class:`scalesep.Tolerance`
    :returns: ``det C`` (real for Hermitian ``C``)
    :rtype: float
    :raises NumericalError: if the imaginary residue exceeds the bound
    """
    return _real_determinant(C.entries, tol)


def leading_principal_minors(C, tol=Tolerance()):
    """
    :param C: the matrix
    :type C: :class:`scalesep.HermitianMatrix`
    :returns: determinants of the top-left ``k x k`` submatrices, ``k = 1 .. dim``
    :rtype: [float]
    :raises NumericalError: as :func:`determinant`

    A cross-check for positivity only: a semidefinite matrix can have vanishing
    leading minors, so verdicts use eigenvalues.
    """
    return [_real_determinant(C.entries[:k, :k], tol) for k in range(1, C.dim + 1)]
