try:
    from ._sympos import *  # noqa: F401,F403
    from ._sympos import __doc__  # noqa: F401
except ImportError:
    from _sympos import *  # noqa: F401,F403
    from _sympos import __doc__  # noqa: F401
