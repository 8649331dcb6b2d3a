from ._oscat import *  # noqa: F401,F403
