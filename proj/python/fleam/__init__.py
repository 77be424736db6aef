"""Federated DDoS mitigation toolkit.

The compiled extension carries the core operations: GRU training steps,
federated parameter averaging, fog-node centrality and checkpoint placement,
attack economics, and the mitigation-delay simulation.
"""

try:
    from ._fleam import *  # noqa: F401,F403
    from ._fleam import __doc__, __version__  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package
    from _fleam import *  # noqa: F401,F403
    from _fleam import __doc__, __version__  # noqa: F401
