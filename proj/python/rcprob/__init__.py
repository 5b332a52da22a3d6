"""Probabilistic checking of RoboChart models against RoboCertProb properties."""

import json
from dataclasses import dataclass, field
from os import PathLike, fspath

from ._rcprob import RcprobError, apmc_samples, format_model, format_spec
from ._rcprob import run_check as _run_check
from ._rcprob import validate_texts as _validate_texts

__all__ = ["RcprobError", "Outcome", "apmc_samples", "check", "format_model", "format_spec", "validate"]


@dataclass
class Outcome:
    exit_code: int
    diagnostics: list = field(default_factory=list)
    records: list = field(default_factory=list)
    files: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.exit_code == 0


def validate(model_text: str, spec_text: str) -> list[dict]:
    """Diagnostics for a model and spec given as text; syntax errors come back as a single entry."""
    return [json.loads(d) for d in _validate_texts(model_text, spec_text)]


def check(
    model: str | PathLike,
    spec: str | PathLike,
    *,
    engine: str = "internal",
    kind: str | None = None,
    prop: str = "*",
    out_dir: str | PathLike = ".",
    seed: int = 0,
    max_states: int = 10_000_000,
    tol: float | None = None,
    threads: int = 0,
    timings: bool = True,
) -> Outcome:
    """Same pipeline as `rcprob check`; reports are written to out_dir."""
    code, diags, records, files = _run_check(
        fspath(model), fspath(spec), engine, kind or "", prop, fspath(out_dir), seed, max_states, tol, threads, timings
    )
    return Outcome(code, [json.loads(d) for d in diags], [json.loads(r) for r in records], list(files))
