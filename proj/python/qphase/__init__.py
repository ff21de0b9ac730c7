"""Phase-space distributions of a displaced squeezed thermal mode."""

try:
    from ._qphase import *  # noqa: F401,F403  (installed layout: extension inside the package)
    from ._qphase import __version__  # noqa: F401
except ImportError:  # in-tree layout: extension sits on sys.path next to the build
    from _qphase import *  # noqa: F401,F403
    from _qphase import __version__  # noqa: F401
