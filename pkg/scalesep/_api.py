import concurrent.futures
import sys

import tqdm


__all__ = ["Error", "DimensionError", "AsymmetryError", "ConvergenceError", "NumericalError",
           "PreconditionError", "SymplecticError", "ZeroScaleError", "InadmissibleScalingError",
           "DomainError", "NoWindowError", "DegenerateDirectionError", "GridTooCoarseError",
           "ModeIndexError", "StateFileError", "progress_bar", "get_progress_bar"]


class Error(Exception):
    """Base class for scalesep errors."""
    pass


class DimensionError(Error):
    """A matrix or vector has the wrong (or an odd) dimension."""
    pass


class AsymmetryError(Error):
    """A matrix that should be symmetric (or Hermitian) is not, beyond tolerance."""
    pass


class ConvergenceError(Error):
    """The eigenvalue solver failed to converge."""
    pass


class NumericalError(Error):
    """A quantity that is real (or an identity that holds) in exact arithmetic failed numerically."""
    pass


class PreconditionError(Error):
    """An operation was called on a state it makes no claim about."""
    pass


class SymplecticError(Error):
    """A transform does not preserve the symplectic form."""
    pass


class ZeroScaleError(Error):
    """A scaling factor is zero."""
    pass


class InadmissibleScalingError(Error):
    """A scaling violates |x_{2j-1} x_{2j}| >= 1 where a verdict depends on it."""
    pass


class DomainError(Error):
    """Parameters lie outside the domain of a closed form."""
    pass


class NoWindowError(Error):
    """No interior roots, hence no detection window."""
    pass


class DegenerateDirectionError(Error):
    """The tomographic dispersion matrix is singular for the requested directions."""
    pass


class GridTooCoarseError(Error):
    """A sampled tomogram is too coarse (or too narrow) for its moments to be trusted."""
    pass


class ModeIndexError(Error, IndexError):
    """A mode index is out of range, or two indices that must differ coincide."""
    pass


class StateFileError(Error):
    """A state, report or sample file could not be read or parsed."""
    pass


def chunked(items, size):
    """Split ``items`` (anything sliceable) into consecutive slabs of at most ``size``."""
    return [items[i:i + size] for i in range(0, len(items), size)]


def map_chunks(fn, items, size):
    """
    :param fn: picklable callable applied to each slab
    :param items: sequence to be split into slabs
    :param size: slab size
    :returns: the results of ``fn`` for every slab, in slab order

    Map ``fn`` over slabs of ``items`` with :data:`Executor`, updating the
    current progress bar once per slab. ``Executor.map`` preserves order, so the
    merged output is deterministic whatever the executor.
    """
    slabs = chunked(items, size)
    bar = get_progress_bar()
    results = []
    with Executor() as executor:
        for result in executor.map(fn, slabs):
            results.append(result)
            bar.update()
    return results


class _ProgressBar:
    def __init__(self, msg="", total=100, disable=False, **kwargs):
        self.msg = msg
        self.disable = disable
        if not disable:
            self._bar = tqdm.tqdm(total=total, file=sys.stderr, dynamic_ncols=True, bar_format="{l_bar}{bar}|[{elapsed} {remaining}s]", **kwargs)
            self._bar.write(msg, file=sys.stderr)
        else:
            self._n = 0
            self._total = total

    @property
    def n(self):
        try:
            return self._bar.n
        except AttributeError:
            return self._n

    @property
    def total(self):
        try:
            return self._bar.total
        except AttributeError:
            return self._total

    def update(self, amount=1):
        try:
            self._bar.update(amount)
        except AttributeError:
            self._n += amount

    def __enter__(self):
        try:
            self._bar.__enter__()
        except AttributeError:
            pass
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        # Sweeps may overshoot their estimated total, never leave the bar short of it
        self.update(max(self.total - self.n, 0))
        try:
            self._bar.__exit__(exc_type, exc_val, exc_tb)
        except AttributeError:
            pass


_progress_bar = _ProgressBar(disable=True)


def progress_bar(*args, **kwargs):
    """Create (and make current) a progress bar, for use as a context manager."""
    global _progress_bar
    _progress_bar = _ProgressBar(*args, **kwargs)
    return _progress_bar


def get_progress_bar():
    """The current progress bar (a disabled one when none was created)."""
    return _progress_bar


class FauxExecutor:
    """
    Executor (a la concurrent.futures.ThreadPoolExecutor) that runs tasks synchronously.
    Lets ``--debug`` take every sweep out of the pool.
    """
    def __init__(self, *_args, **_kwargs):
        pass

    def map(self, fn, *iterables, **_kwargs):
        for args in zip(*iterables):
            yield fn(*args)

    def __enter__(self):
        return self

    def __exit__(self, type, value, traceback):
        return


#: Executor used for concurrency. LAPACK releases the GIL, so threads suffice for grid slabs.
Executor = concurrent.futures.ThreadPoolExecutor
