from ._sbmd import *  # noqa: F401,F403
from ._sbmd import __doc__  # noqa: F401
