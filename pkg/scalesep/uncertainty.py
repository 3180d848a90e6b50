"""
Dispersion and uncertainty matrices, the Robertson-Schrödinger relation for ``N`` modes,
and the canonical (symplectic) transformations that leave it invariant.
"""
import numpy as np

from ._api import DimensionError, PreconditionError
from ._data import (DeterminantBound, DispersionMatrix, HermitianMatrix, SingleModeReport,
                    SymplecticForm, SymplecticTransform, Tolerance, UncertaintyReport)
from . import matrices


__all__ = ["as_dispersion", "symplectic_form", "vacuum", "thermal", "direct_sum", "build_uncertainty",
           "rs_check", "det_v_bound", "single_mode_checks", "apply_symplectic", "rotation",
           "squeezer", "beam_splitter", "embed", "compose", "random_symplectic",
           "random_physical_state"]


def as_dispersion(V):
    """Accept a :class:`scalesep.DispersionMatrix` or a raw (validated) covariance array."""
    if isinstance(V, DispersionMatrix):
        return V
    return DispersionMatrix.from_arrays(V)


def symplectic_form(n_modes):
    """``Sigma = diag(Omega, ..., Omega)`` for ``n_modes`` modes."""
    return SymplecticForm(n_modes)


def vacuum(n_modes):
    """The ``N``-mode vacuum, ``V = I/2``."""
    return DispersionMatrix(np.eye(2 * n_modes) / 2)


def thermal(nu):
    """Product of thermal states, ``V = diag(nu_1, nu_1, nu_2, nu_2, ...)``; physical iff every ``nu >= 1/2``."""
    return DispersionMatrix(np.diag(np.repeat(np.asarray(nu, dtype=float), 2)))


def direct_sum(*states):
    """The product state of ``states``, in order: block-diagonal ``V`` and concatenated means."""
    states = [as_dispersion(s) for s in states]
    dim = sum(s.dim for s in states)
    V = np.zeros((dim, dim))
    start = 0
    for s in states:
        V[start:start + s.dim, start:start + s.dim] = s.matrix
        start += s.dim
    return DispersionMatrix(V, np.concatenate([s.mean for s in states]))


def build_uncertainty(V):
    """
    :param V: the state
    :type V: :class:`scalesep.DispersionMatrix`
    :returns: ``C = V + (i/2) Sigma``
    :rtype: :class:`scalesep.HermitianMatrix`
    """
    V = as_dispersion(V)
    return HermitianMatrix(V.matrix + 0.5j * symplectic_form(V.n_modes).matrix)


def rs_check(V, tol=Tolerance()):
    """
    :param V: the state
    :type V: :class:`scalesep.DispersionMatrix`
    :param tol: positivity tolerance, relative to the largest entry of ``C``
    :type tol: :class:`scalesep.Tolerance`
    :rtype: :class:`scalesep.UncertaintyReport`

    The Robertson-Schrödinger relation ``V + (i/2) Sigma >= 0``. The per-mode 2x2
    determinants of ``V`` are reported as diagnostics; physicality is decided by the
    smallest eigenvalue of the whole matrix.
    """
    V = as_dispersion(V)
    C = build_uncertainty(V)
    min_eig = matrices.min_eigenvalue(C)
    scale = np.max(np.abs(C.entries))
    block_minors = [float(np.linalg.det(V.block(j))) for j in range(1, V.n_modes + 1)]
    return UncertaintyReport(physical=min_eig >= -tol.bound(scale),
                             min_eig=min_eig,
                             det_c=matrices.determinant(C, tol),
                             block_minors=block_minors)


def det_v_bound(V, tol=Tolerance()):
    """
    :param V: a physical state
    :type V: :class:`scalesep.DispersionMatrix`
    :rtype: :class:`scalesep.DeterminantBound`
    :raises PreconditionError: if ``V`` fails :func:`rs_check`

    ``det V >= 4**-N``, which every physical state satisfies. ``det V`` is taken as the
    product of the moduli of the eigenvalues of ``Sigma V`` (the squared symplectic
    eigenvalues), which stays accurate for strongly squeezed states. The slack is
    relative to the bound, scaled by the largest entry of ``V``.
    """
    V = as_dispersion(V)
    if not rs_check(V, tol).physical:
        raise PreconditionError("det V >= 4^-N is only claimed for states satisfying the uncertainty relation")
    sigma = symplectic_form(V.n_modes).matrix
    det_v = float(np.prod(np.abs(np.linalg.eigvals(sigma @ V.matrix))))
    bound = 4.0 ** -V.n_modes
    slack = tol.bound(bound * max(1.0, np.max(np.abs(V.matrix))))
    return DeterminantBound(det_v=det_v, bound=bound, holds=det_v >= bound - slack)


def single_mode_checks(sigma_qq, sigma_pp, sigma_qp, c1=0.0, c2=0.0, tol=Tolerance()):
    """
    :param sigma_qq: position variance
    :param sigma_pp: momentum variance
    :param sigma_qp: symmetrized covariance
    :param c1: position mean (accepted, unused: the relations need centered moments)
    :param c2: momentum mean (likewise)
    :rtype: :class:`scalesep.SingleModeReport`
    :raises PreconditionError: for a negative variance

    Heisenberg ``sigma_qq sigma_pp >= 1/4`` and Robertson-Schrödinger
    ``sigma_qq sigma_pp - sigma_qp**2 >= 1/4``. Only the latter survives canonical
    transformations.
    """
    if sigma_qq < 0 or sigma_pp < 0:
        raise PreconditionError(f"variances must be non-negative, got {sigma_qq}, {sigma_pp}")
    product = sigma_qq * sigma_pp
    return SingleModeReport(heisenberg=product >= 0.25 - tol.bound(0.25),
                            rs=product - sigma_qp ** 2 >= 0.25 - tol.bound(0.25))


def apply_symplectic(V, T):
    """
    :param V: the state
    :type V: :class:`scalesep.DispersionMatrix`
    :param T: the canonical transformation (validated on construction)
    :type T: :class:`scalesep.SymplecticTransform`
    :returns: ``S V S^T`` with mean ``S mean + shift``
    :rtype: :class:`scalesep.DispersionMatrix`
    """
    V = as_dispersion(V)
    if T.n_modes != V.n_modes:
        raise DimensionError(f"transform acts on {T.n_modes} modes, state has {V.n_modes}")
    return DispersionMatrix(T.S @ V.matrix @ T.S.T, T.S @ V.mean + T.shift)


def rotation(theta):
    """Single-mode phase rotation by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticTransform([[c, s], [-s, c]])


def squeezer(r):
    """Single-mode squeezer ``diag(e^-r, e^r)``."""
    return SymplecticTransform(np.diag([np.exp(-r), np.exp(r)]))


def beam_splitter(n_modes, j, k, theta):
    """Rotate modes ``j`` and ``k`` (1-based) into each other, ``q`` and ``p`` alike."""
    c, s = np.cos(theta), np.sin(theta)
    S = np.eye(2 * n_modes)
    for offset in (0, 1):
        a, b = 2 * (j - 1) + offset, 2 * (k - 1) + offset
        S[a, a], S[a, b] = c, s
        S[b, a], S[b, b] = -s, c
    return SymplecticTransform(S)


def embed(local, mode, n_modes):
    """Extend a single-mode transform to act on ``mode`` (1-based) of ``n_modes`` modes."""
    S = np.eye(2 * n_modes)
    shift = np.zeros(2 * n_modes)
    window = slice(2 * (mode - 1), 2 * mode)
    S[window, window] = local.S
    shift[window] = local.shift
    return SymplecticTransform(S, shift)


def compose(first, second):
    """The transform applying ``first``, then ``second``."""
    return SymplecticTransform(second.S @ first.S, second.S @ first.shift + second.shift)


def random_symplectic(n_modes, seed, max_squeezing=1.0):
    """
    :param n_modes: number of modes (at least 1)
    :param seed: seed of the generator; equal seeds give equal transforms
    :param max_squeezing: squeezing parameters are drawn from ``[-max_squeezing, max_squeezing]``
    :rtype: :class:`scalesep.SymplecticTransform`

    A layer of local rotation-squeeze-rotation on every mode, a beam splitter on every
    pair of modes, then a second local layer, and a random displacement.
    """
    if n_modes < 1:
        raise DimensionError(f"need at least one mode, got {n_modes}")
    rng = np.random.default_rng(seed)

    def local_layer(T):
        for mode in range(1, n_modes + 1):
            for local in (rotation(rng.uniform(0, 2 * np.pi)),
                          squeezer(rng.uniform(-max_squeezing, max_squeezing)),
                          rotation(rng.uniform(0, 2 * np.pi))):
                T = compose(T, embed(local, mode, n_modes))
        return T

    T = local_layer(SymplecticTransform(np.eye(2 * n_modes)))
    for j in range(1, n_modes + 1):
        for k in range(j + 1, n_modes + 1):
            T = compose(T, beam_splitter(n_modes, j, k, rng.uniform(0, 2 * np.pi)))
    T = local_layer(T)
    return SymplecticTransform(T.S, rng.normal(size=2 * n_modes))


def random_physical_state(n_modes, seed, max_squeezing=1.0, max_thermal=2.0):
    """
    A random state satisfying the uncertainty relation by construction: thermal
    diagonals ``nu >= 1/2`` conjugated by :func:`random_symplectic`.
    """
    rng = np.random.default_rng(seed)
    nu = rng.uniform(0.5, max_thermal, size=n_modes)
    T = random_symplectic(n_modes, rng.integers(2 ** 32), max_squeezing)
    return apply_symplectic(thermal(nu), T)
