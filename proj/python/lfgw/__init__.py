"""Fused Gromov-Wasserstein graph embeddings (linearFGW).

Thin Python surface over the C++ core: measure graphs, FGW solvers,
barycentric projections, barycenter references, Euclidean embeddings and
kernel-based learning utilities.
"""

try:
    from ._lfgw import *  # noqa: F401,F403
    from ._lfgw import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _lfgw import *  # type: ignore # noqa: F401,F403
    from _lfgw import __version__  # type: ignore # noqa: F401
