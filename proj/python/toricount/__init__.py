"""Bounded-height point counts and Peyre-constant factors for hypersurfaces of
split smooth complete toric varieties.

The heavy lifting lives in the C++ extension ``_toricount``; this package
re-exports its public surface.
"""

try:
    from ._toricount import *  # noqa: F401,F403
    from ._toricount import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _toricount import *  # noqa: F401,F403
    from _toricount import __version__  # noqa: F401
