"""Init file for schanuel"""

from .algebraic import REGISTRY
from .config import Settings
from .engine import (
    check_q_linear_independence,
    schanuel_apply,
    select_transcendence_basis,
    trdeg_bound,
)
from .knowledge import KnowledgeBase
from .local_store import LocalTraceStore
from .scripts import prove_corollary, replay_theorem
from .support import exp_support, log_support
from .syntax import parse
from .terms import e_level, l_level, normalize
from .trace import VERSION as __version__, ProofTrace, check_trace

__all__ = [
    "REGISTRY",
    "Settings",
    "KnowledgeBase",
    "LocalTraceStore",
    "ProofTrace",
    "parse",
    "normalize",
    "e_level",
    "l_level",
    "exp_support",
    "log_support",
    "check_q_linear_independence",
    "schanuel_apply",
    "select_transcendence_basis",
    "trdeg_bound",
    "prove_corollary",
    "replay_theorem",
    "check_trace",
    "__version__",
]
