"""Linear-Gaussian diffusion denoisers, classifier-free guidance and contrastive PCA."""

from ._lcfg import *  # noqa: F401,F403
from ._lcfg import __doc__  # noqa: F401

__version__ = "0.1.0"
