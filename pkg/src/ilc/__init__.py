"""IL: a first-order functional intermediate language with an imperative reading.

The package provides parsing and printing, both small-step semantics,
bounded equivalence oracles, liveness and coherence checkers, renaming
utilities, SSA-style register assignment, and the checked pipeline that
joins them.
"""

from .coherence import agree_check, approx, coh_check, coh_ctx_check
from .equivalence import (
    Equivalent, Inequivalent, PartialTrace, Unknown, bisim, invariance_check, trace_equiv, traces,
)
from .frontend import ParseError, format_term, parse, parse_term
from .gen import GenConfig, gen_program
from .liveness import IllFormed, live_check, live_ctx_check, live_infer, max_live
from .pipeline import PipelineReport, StageError, compile_program
from .rassign import PreconditionError, inj_check, names_used, rassign
from .renaming import (
    OrderedFresh, alpha_check, apart_check, fresh, freshlist, prune_unreachable, reachable_check,
    rename_apart, reserved_fresh,
)
from .semantics import Block, Closure, FConfig, IConfig, classify, fconfig, iconfig, res, run, strip, successors
from .syntax import (
    Ann, App, BinOp, Ctx, EMPTY_CTX, Env, Extern, Fun, IDENTITY, If, Let, Lit, Ref, Renaming, Ret,
    action, free_vars, label, rename, var,
)

__all__ = [
    "Ann", "App", "BinOp", "Block", "Closure", "Ctx", "EMPTY_CTX", "Env", "Equivalent",
    "Extern", "FConfig", "Fun", "GenConfig", "IConfig", "IDENTITY", "If", "IllFormed",
    "Inequivalent", "Let", "Lit", "OrderedFresh", "ParseError", "PartialTrace",
    "PipelineReport", "PreconditionError", "Ref", "Renaming", "Ret", "StageError", "Unknown",
    "action", "agree_check", "alpha_check", "apart_check", "approx", "bisim", "classify",
    "coh_check", "coh_ctx_check", "compile_program", "fconfig", "format_term", "free_vars",
    "fresh", "freshlist", "gen_program", "iconfig", "inj_check", "invariance_check", "label",
    "live_check", "live_ctx_check", "live_infer", "max_live", "names_used", "parse",
    "parse_term", "prune_unreachable", "rassign", "reachable_check", "rename", "rename_apart",
    "res", "reserved_fresh", "run", "strip", "successors", "trace_equiv", "traces", "var",
]
