"""
Separability tests built on partial scaling.

A separable state stays physical under every admissible scaling, so an admissible
``x`` with ``C^x`` not positive semidefinite witnesses entanglement. For two modes the
determinant of ``C^x`` is a quadratic in the scale of one momentum and most of the
work can be done in closed form; for more modes the scalings are swept on a grid.
"""
import attr
import numpy as np

from . import _api
from ._api import ConvergenceError, DimensionError, ModeIndexError, NumericalError
from ._data import (OMEGA, BlockDecomposition, Diagnostics, DiscriminantReport, ScalingVector,
                    SimonReport, Status, SweepConfig, TwoModeCoeffs, TwoParamSurface, Verdict)
from .uncertainty import as_dispersion, rs_check, symplectic_form


__all__ = ["block_decomposition", "two_mode_coeffs", "det_cx_two_mode", "discriminant_test",
           "simon_test", "block_det_identity_residual", "verdict_tolerance", "sweep_two_mode",
           "sweep_mode_vs_rest", "sweep_two_param", "VERDICT_REL", "CHUNK_SIZE"]


#: Verdict tolerance on eigenvalues, relative to ``max|V|**2``
VERDICT_REL = 1e-9

#: Number of scalings evaluated per executor task
CHUNK_SIZE = 64

# Farthest the unbounded-below branch of the two-mode polynomial is chased, in doublings
_MAX_DOUBLINGS = 64


def _require_two_modes(V):
    V = as_dispersion(V)
    if V.n_modes != 2:
        raise DimensionError(f"this test is defined for two modes, got {V.n_modes}")
    return V


def block_decomposition(V):
    """
    :param V: a two-mode state
    :type V: :class:`scalesep.DispersionMatrix`
    :rtype: :class:`scalesep.BlockDecomposition`
    :raises DimensionError: unless ``V`` has two modes
    """
    V = _require_two_modes(V)
    return BlockDecomposition(V.block(1), V.block(2), V.block(1, 2))


def _block_dets(blocks):
    return (float(np.linalg.det(blocks.V1)), float(np.linalg.det(blocks.V2)),
            float(np.linalg.det(blocks.V12)))


def _trace_term(blocks):
    """``tr[V1 Omega V12 Omega V2 Omega V12^T Omega]``"""
    product = blocks.V1 @ OMEGA @ blocks.V12 @ OMEGA @ blocks.V2 @ OMEGA @ blocks.V12.T @ OMEGA
    return float(np.trace(product))


def verdict_tolerance(V, rel=None):
    """
    :param V: the state
    :param rel: relative tolerance, defaults to :data:`VERDICT_REL`
    :returns: the eigenvalue threshold below which ``C^x`` counts as not positive

    Determinants of ``C^x`` are quartic in the entries of ``V``, so the threshold
    scales with ``max|V|**2``. The scale is floored at 1/2, the size of the
    symplectic part of ``C``.
    """
    V = as_dispersion(V)
    rel = VERDICT_REL if rel is None else rel
    return rel * max(float(np.max(np.abs(V.matrix))), 0.5) ** 2


def two_mode_coeffs(V):
    """
    :param V: a two-mode state
    :type V: :class:`scalesep.DispersionMatrix`
    :rtype: :class:`scalesep.TwoModeCoeffs`
    :raises DimensionError: unless ``V`` has two modes
    :raises NumericalError: if the two expressions for ``B`` disagree

    Coefficients of ``det C^x = A x**2 + 2 B x + C`` for the scaling
    ``(1, 1, 1, x)``::

        A = det V - det V2 / 4
        B = (s_q1p2 s_p1q2 - s_q1q2 s_p1p2) / 4 = -det V12 / 4
        C = 1/16 - det V1 / 4
    """
    V = _require_two_modes(V)
    blocks = block_decomposition(V)
    det_1, det_2, det_12 = _block_dets(blocks)
    s = V.matrix

    B = (s[0, 3] * s[1, 2] - s[0, 2] * s[1, 3]) / 4
    if abs(B + det_12 / 4) > 1e-12 * max(1.0, np.max(np.abs(s))) ** 2:
        raise NumericalError(f"B = {B} disagrees with -det V12 / 4 = {-det_12 / 4}")

    return TwoModeCoeffs(A=float(np.linalg.det(s)) - det_2 / 4, B=B, C=1 / 16 - det_1 / 4)


def det_cx_two_mode(V, x):
    """``det C^x`` for the scaling ``(1, 1, 1, x)``, from the closed-form polynomial."""
    return float(two_mode_coeffs(V)(x))


def discriminant_test(V, tol=None):
    """
    :param V: a two-mode state
    :type V: :class:`scalesep.DispersionMatrix`
    :param tol: threshold on the discriminant, defaults to :func:`verdict_tolerance`
    :rtype: :class:`scalesep.DiscriminantReport`
    :raises NumericalError: if the coefficient and block forms disagree

    ``B**2 - 4AC <= 0``. Diagnostic only: it demands positivity for every real ``x``
    while separability only guarantees it for ``|x| >= 1``, and a product of thermal
    states (``V = I``) already fails it.
    """
    V = _require_two_modes(V)
    coeffs = two_mode_coeffs(V)
    det_1, det_2, det_12 = _block_dets(block_decomposition(V))
    det_v = float(np.linalg.det(V.matrix))

    value = coeffs.B ** 2 - 4 * coeffs.A * coeffs.C
    block_form = (det_12 ** 2 - (4 * det_v - det_2) * (1 - 4 * det_1)) / 16
    scale = max(1.0, float(np.max(np.abs(V.matrix)))) ** 8
    if abs(value - block_form) > 1e-10 * scale:
        raise NumericalError(f"discriminant {value} disagrees with its block form {block_form}")

    tol = verdict_tolerance(V) if tol is None else tol
    return DiscriminantReport(value=value, block_form=block_form, passes=value <= tol)


def simon_test(V, tol=None):
    """
    :param V: a two-mode state
    :type V: :class:`scalesep.DispersionMatrix`
    :param tol: defaults to :func:`verdict_tolerance`
    :rtype: :class:`scalesep.SimonReport`

    ``det V1 det V2 + (1/4 - |det V12|)**2 - tr[V1 O V12 O V2 O V12^T O] >= (det V1 + det V2) / 4``.
    A violation means partial time reversal of mode 2 already witnesses entanglement.
    """
    V = _require_two_modes(V)
    blocks = block_decomposition(V)
    det_1, det_2, det_12 = _block_dets(blocks)
    lhs = det_1 * det_2 + (0.25 - abs(det_12)) ** 2 - _trace_term(blocks)
    rhs = (det_1 + det_2) / 4
    tol = verdict_tolerance(V) if tol is None else tol
    return SimonReport(lhs=lhs, rhs=rhs, passes=lhs >= rhs - tol)


def block_det_identity_residual(V):
    """``det V - (det V1 det V2 + det V12**2 - tr[V1 O V12 O V2 O V12^T O])``, zero for every ``V``."""
    V = _require_two_modes(V)
    blocks = block_decomposition(V)
    det_1, det_2, det_12 = _block_dets(blocks)
    return float(np.linalg.det(V.matrix)) - (det_1 * det_2 + det_12 ** 2 - _trace_term(blocks))


@attr.s(slots=True, frozen=True, eq=False)
class _scaled_spectrum:
    """ "Function" returning the smallest eigenvalue and the determinant of ``C^x`` for a
    slab of scalings. In the form of a class so that pickle can serialize it. """
    V = attr.ib()
    sigma = attr.ib()

    def __call__(self, slab):
        slab = np.asarray(slab, dtype=float)
        C = slab[:, :, None] * self.V * slab[:, None, :] + 0.5j * self.sigma
        try:
            eigenvalues = np.linalg.eigvalsh(C)
        except np.linalg.LinAlgError as e:
            raise ConvergenceError(f"eigenvalue solver failed: {e}") from e
        return eigenvalues[:, 0], np.prod(eigenvalues, axis=1)


def _spectra(V, scalings):
    """Smallest eigenvalues and determinants of ``C^x`` for every row of ``scalings``, in order."""
    fn = _scaled_spectrum(V.matrix, symplectic_form(V.n_modes).matrix)
    results = _api.map_chunks(fn, np.asarray(scalings, dtype=float), CHUNK_SIZE)
    return (np.concatenate([eigs for eigs, _ in results]),
            np.concatenate([dets for _, dets in results]))


def _momentum_rows(n_modes, mode, xs):
    rows = np.ones((len(xs), 2 * n_modes))
    rows[:, 2 * mode - 1] = xs
    return rows


def _unphysical(V, report, diagnostics):
    return Verdict(status=Status.UNPHYSICAL, min_det=report.det_c, min_eig=report.min_eig,
                   diagnostics=diagnostics)


def _pick_witness(xs, eigs, tol):
    """Index of the witness among ``xs``: ``x = -1`` when it fails, else the lowest eigenvalue."""
    failing = eigs < -tol
    if not failing.any():
        return None
    time_reversal = np.flatnonzero(xs == -1.0)
    if time_reversal.size and failing[time_reversal[0]]:
        return int(time_reversal[0])
    return int(np.argmin(eigs))


def sweep_two_mode(V, grid=SweepConfig(), tol=None):
    """
    :param V: a two-mode state
    :type V: :class:`scalesep.DispersionMatrix`
    :param grid: the grid of momentum scales
    :type grid: :class:`scalesep.SweepConfig`
    :param tol: eigenvalue threshold, defaults to :func:`verdict_tolerance`
    :rtype: :class:`scalesep.Verdict`

    Scale the momentum of mode 2 by every ``x`` on the grid, together with the vertex
    of the determinant polynomial when that lies in ``|x| >= 1``, and report
    ``ENTANGLED`` if ``C^x`` has an eigenvalue below ``-tol`` anywhere. A negative
    leading coefficient makes the determinant negative for large ``|x|``; the witness
    is then chased past the polynomial's roots.
    """
    V = _require_two_modes(V)
    coeffs = two_mode_coeffs(V)
    simon = simon_test(V, tol)
    diagnostics = Diagnostics(coeffs=coeffs,
                              discriminant=discriminant_test(V, tol).value,
                              simon_lhs=simon.lhs,
                              simon_rhs=simon.rhs)

    report = rs_check(V)
    if not report.physical:
        return _unphysical(V, report, diagnostics)

    tol = verdict_tolerance(V) if tol is None else tol
    xs = grid.points()
    if coeffs.A > tol:
        vertex = -coeffs.B / coeffs.A
        if abs(vertex) >= 1:
            xs = np.unique(np.append(xs, vertex))

    eigs, _ = _spectra(V, _momentum_rows(2, 2, xs))
    index = _pick_witness(xs, eigs, tol)

    if index is not None:
        x = xs[index]
        return Verdict(status=Status.ENTANGLED, witness=ScalingVector([1, 1, 1, x]),
                       min_det=coeffs(x), min_eig=eigs[index], diagnostics=diagnostics)

    if coeffs.A < -tol:
        roots = np.roots([coeffs.A, 2 * coeffs.B, coeffs.C])
        reach = 2 * max([abs(r.real) for r in roots if abs(r.imag) <= 1e-12 * abs(r)] + [grid.x_max, 1.0])
        for _ in range(_MAX_DOUBLINGS):
            candidates = np.array([-reach, reach])
            far_eigs, _ = _spectra(V, _momentum_rows(2, 2, candidates))
            best = int(np.argmin(far_eigs))
            if far_eigs[best] < -tol:
                x = candidates[best]
                return Verdict(status=Status.ENTANGLED, witness=ScalingVector([1, 1, 1, x]),
                               min_det=coeffs(x), min_eig=far_eigs[best], diagnostics=diagnostics)
            reach *= 2

    return Verdict(status=Status.NOT_DETECTED, min_det=float(np.min(coeffs(xs))),
                   min_eig=float(np.min(eigs)), diagnostics=diagnostics)


def sweep_mode_vs_rest(V, k, grid=SweepConfig(), tol=None):
    """
    :param V: the state
    :type V: :class:`scalesep.DispersionMatrix`
    :param k: the mode (1-based) whose momentum is scaled
    :param grid: the grid of momentum scales
    :type grid: :class:`scalesep.SweepConfig`
    :param tol: eigenvalue threshold, defaults to :func:`verdict_tolerance`
    :rtype: :class:`scalesep.Verdict`
    :raises ModeIndexError: if ``k`` is not a mode of ``V``

    Test mode ``k`` against all the others by scaling ``p_k`` alone.
    """
    V = as_dispersion(V)
    if not 1 <= k <= V.n_modes:
        raise ModeIndexError(f"mode {k} out of range 1..{V.n_modes}")

    diagnostics = Diagnostics()
    if V.n_modes == 2:
        simon = simon_test(V, tol)
        diagnostics = Diagnostics(coeffs=two_mode_coeffs(V), discriminant=discriminant_test(V, tol).value,
                                  simon_lhs=simon.lhs, simon_rhs=simon.rhs)

    report = rs_check(V)
    if not report.physical:
        return _unphysical(V, report, diagnostics)

    tol = verdict_tolerance(V) if tol is None else tol
    xs = grid.points()
    eigs, dets = _spectra(V, _momentum_rows(V.n_modes, k, xs))
    index = _pick_witness(xs, eigs, tol)

    if index is None:
        return Verdict(status=Status.NOT_DETECTED, min_det=float(np.min(dets)),
                       min_eig=float(np.min(eigs)), diagnostics=diagnostics)
    return Verdict(status=Status.ENTANGLED,
                   witness=ScalingVector.momentum(V.n_modes, {k: xs[index]}),
                   min_det=dets[index], min_eig=eigs[index], diagnostics=diagnostics)


def sweep_two_param(V, j, k, grid=SweepConfig(), y_grid=None):
    """
    :param V: a state of at least three modes
    :type V: :class:`scalesep.DispersionMatrix`
    :param j: first mode (1-based), its momentum is scaled by ``x``
    :param k: second mode, its momentum is scaled by ``y``
    :param grid: the ``x`` grid
    :type grid: :class:`scalesep.SweepConfig`
    :param y_grid: the ``y`` grid, defaults to ``grid``
    :type y_grid: :class:`scalesep.SweepConfig`
    :rtype: :class:`scalesep.TwoParamSurface`
    :raises DimensionError: for fewer than three modes
    :raises ModeIndexError: if ``j`` or ``k`` is out of range, or ``j == k``
    """
    V = as_dispersion(V)
    if V.n_modes < 3:
        raise DimensionError(f"a two-parameter sweep needs at least three modes, got {V.n_modes}")
    for mode in (j, k):
        if not 1 <= mode <= V.n_modes:
            raise ModeIndexError(f"mode {mode} out of range 1..{V.n_modes}")
    if j == k:
        raise ModeIndexError(f"the two scaled modes must differ, got {j} twice")

    xs = grid.points()
    ys = (grid if y_grid is None else y_grid).points()
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    rows = np.ones((xx.size, V.dim))
    rows[:, 2 * j - 1] = xx.ravel()
    rows[:, 2 * k - 1] = yy.ravel()

    eigs, _ = _spectra(V, rows)
    points = {(float(x), float(y)): float(e) for x, y, e in zip(xx.ravel(), yy.ravel(), eigs)}
    return TwoParamSurface(modes=(j, k), points=points, n_modes=V.n_modes)
