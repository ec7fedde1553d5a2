from .app import create_app
from .sessions import (
    Session,
    SessionNotFound,
    SessionStore,
    SessionTerminal,
    replay_event_log,
)

__all__ = [
    "create_app",
    "Session",
    "SessionNotFound",
    "SessionStore",
    "SessionTerminal",
    "replay_event_log",
]
