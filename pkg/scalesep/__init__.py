def _set_version():
    """Set scalesep __version__"""
    global __version__
    from importlib.metadata import distribution, PackageNotFoundError
    import os
    try:
        dist = distribution("scalesep")
        # Normalize path for cross-OS compatibility.
        dist_loc = os.path.normcase(str(dist.locate_file("")))
        here = os.path.normcase(__file__)
        if not here.startswith(os.path.join(dist_loc, "scalesep")):
            # This version is not installed, but another version is.
            raise PackageNotFoundError
    except PackageNotFoundError:
        __version__ = "locally installed, no version information available"
    else:
        __version__ = dist.version


# Encapsulated inside a function so their local variables/imports aren't seen by autocompleters
_set_version()

from ._api import *
from ._data import *
from . import matrices, uncertainty, scaling, criterion, gaussian, tomogram
