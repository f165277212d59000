"""Tag-propagated video representations for event detection."""

from ._tagbook import *  # noqa: F401,F403
