"""Baseband toolkit for full-duplex self-interference cancellation."""

try:
    from ._fdcancel import *  # noqa: F401,F403
    from ._fdcancel import __version__
except ImportError:
    # Development layout: the extension sits on PYTHONPATH next to the
    # build tree instead of inside the installed package.
    from _fdcancel import *  # noqa: F401,F403
    from _fdcancel import __version__
