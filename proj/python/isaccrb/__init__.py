from ._isaccrb import *  # noqa: F401,F403
from ._isaccrb import __doc__  # noqa: F401
