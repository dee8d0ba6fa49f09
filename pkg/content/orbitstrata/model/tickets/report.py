"""File housing the JSON report every command emits
"""
# ======== standard imports ========
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any
import hashlib
import logging
import time
# ==================================

# ======= third party imports ======
# ==================================

# ========= program imports ========
from orbitstrata.model.base import StrataObject
# ==================================

logger = logging.getLogger(__name__)


def inputs_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class Report(StrataObject):
    ''' Output of one CLI command '''
    command: str
    inputs_digest: str
    results: dict[str, Any] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    attribute_doc_strings = {
        "command": "Subcommand that produced the report",
        "inputs_digest": "sha256 of the problem file bytes",
        "results": "Command specific results; polynomials carry text and terms",
        "diagnostics": "Warnings, downgrades and unchecked claims",
        "timings": "Wall-clock seconds per stage"
    }

    example = {
        "command": "pmatrix",
        "inputs_digest": "0" * 64,
        "results": {},
        "diagnostics": [],
        "timings": {"pmatrix": 0.5}
    }

    def validate_command(self):
        self.check_choice_validity('command', self.command,
                                   ('pmatrix', 'relations', 'stratum', 'verify', 'classify', 'probe'))

    @classmethod
    def for_file(cls, command: str, path: str | Path) -> Report:
        return cls(command, inputs_digest(path))

    @contextmanager
    def timed(self, stage: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[stage] = round(time.perf_counter() - start, 6)
            logger.debug('%s took %.3f s', stage, self.timings[stage])

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(indent=2, sort_keys=True) + '\n')
