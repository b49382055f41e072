"""Paragraph-level relative policy optimization: rewards, advantages,
clipped surrogate, toy policy training, and the dataset pipeline helpers."""

from prpo._core import *  # noqa: F401,F403
from prpo._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
