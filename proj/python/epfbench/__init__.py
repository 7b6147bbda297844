"""Day-ahead electricity price forecasting benchmark core."""

try:
    from ._epfbench import *  # noqa: F401,F403
    from ._epfbench import __version__, EpfError
except ImportError:  # in-tree build: extension sits next to the package
    from _epfbench import *  # noqa: F401,F403
    from _epfbench import __version__, EpfError
