"""The four-step translation from functional IL to an imperative-ready program."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .coherence import coh_violation
from .frontend import format_term
from .liveness import IllFormed, live_check, live_infer, max_live
from .rassign import PreconditionError, inj_check, names_used, rassign
from .renaming import OrderedFresh, alpha_check, apart_check, prune_unreachable, reachable_check, rename_apart
from .syntax import (
    Ann, EMPTY_CTX, IDENTITY, Renaming, Term, free_vars, rename, rename_ann,
)


class StageError(Exception):
    def __init__(self, stage: str, witness: str):
        super().__init__(f"{stage}: {witness}")
        self.stage = stage
        self.witness = witness


@dataclass
class Stage:
    name: str
    verdict: bool
    witness: Optional[str] = None

    def as_dict(self) -> dict[str, Any]:
        return {"stage": self.name, "verdict": "ok" if self.verdict else "fail",
                "witness": self.witness}


@dataclass
class PipelineReport:
    source: Term
    apart: Optional[Term] = None
    annotated: Optional[Term] = None
    ann: Optional[Ann] = None
    renaming: Optional[Renaming] = None
    output: Optional[Term] = None
    output_ann: Optional[Ann] = None
    k: Optional[int] = None
    names: Optional[int] = None
    stages: list[Stage] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.stages) and all(st.verdict for st in self.stages) and self.output is not None

    def as_dict(self) -> dict[str, Any]:
        failed = next((st for st in self.stages if not st.verdict), None)
        last = failed or (self.stages[-1] if self.stages else None)
        return {
            "stage": last.name if last else None,
            "verdict": "ok" if self.ok else "fail",
            "witness": failed.witness if failed else None,
            "k": self.k,
            "names": self.names,
            "steps": [st.as_dict() for st in self.stages],
            "output": format_term(self.output) if self.output is not None else None,
        }


def compile_program(s1: Term, *, prune: bool = False, raise_on_failure: bool = True) -> PipelineReport:
    """Rename apart, infer liveness, assign registers and rename; check every stage.

    Free variables of ``s1`` keep their names: register names are chosen
    smallest-first in an order that starts with them.
    """
    report = PipelineReport(s1)

    def stage(name: str, ok: bool, witness: str = "") -> None:
        report.stages.append(Stage(name, ok, None if ok else witness))
        if not ok and raise_on_failure:
            raise StageError(name, witness)

    def failed() -> bool:
        return not report.stages[-1].verdict

    if prune:
        s1 = prune_unreachable(s1)
    stage("reachable", reachable_check(s1), "a function is never applied in its continuation")
    if failed():
        return report

    fv = free_vars(s1)
    step1 = rename_apart(IDENTITY, fv, s1)
    s2 = step1.term
    report.apart = s2
    stage("rename-apart", apart_check(fv, s2) == step1.binders, format_term(s2))
    if failed():
        return report
    maps = alpha_check(s1, s2)
    stage("alpha(source, apart)",
          maps is not None and all(maps.rho.get(x, x) == x for x in fv), format_term(s2))
    if failed():
        return report

    try:
        lr = live_infer(s2)
    except IllFormed as e:
        stage("liveness", False, str(e))
        return report
    s2, a = lr.term, lr.ann
    report.annotated, report.ann = s2, a
    report.k = max_live(a)
    stage("liveness", live_check(EMPTY_CTX, a.live, s2, a), format_term(s2, a))
    if failed():
        return report

    order = OrderedFresh(sorted(fv))
    try:
        rho = rassign(IDENTITY, s2, a, order)
    except PreconditionError as e:
        stage("local-injectivity", False, f"precondition {e.condition} failed")
        return report
    report.renaming = rho
    report.names = len(names_used(rho, s2))
    stage("local-injectivity", inj_check(rho, s2, a), repr(rho))
    if failed():
        return report

    s3, a3 = rename(rho, s2), rename_ann(rho, a)
    report.output, report.output_ann = s3, a3
    bad = coh_violation(EMPTY_CTX, s3, a3)
    stage("coherence", bad is None, format_term(bad) if bad is not None else "")
    maps = alpha_check(s3, s2)
    stage("alpha(output, apart)", maps is not None, format_term(s3))
    return report
