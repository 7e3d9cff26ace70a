"""Run reports: one JSON document per command invocation."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

from .instance_io import digest
from .problem import GopInstance

REPORT_SCHEMA = 1


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_report(command: str, result: dict, exit_code: int, inst: Optional[GopInstance] = None,
                 instance_digest: Optional[str] = None, path=None, timing_ms: Optional[float] = None,
                 extra: Optional[dict] = None) -> dict:
    """Assemble a report.

    ``instance_digest`` is the digest of the document as loaded;
    ``effective`` holds the configuration after command-line overrides,
    which is enough to rebuild the instance that was analyzed.
    """
    report: dict = {"schema": REPORT_SCHEMA, "command": command}
    if inst is not None:
        report["instance"] = {
            "name": inst.name,
            "path": None if path is None else str(path),
            "file_sha256": None if path is None else file_sha256(path),
            "instance_digest": instance_digest or digest(inst),
            "effective_digest": digest(inst),
            "effective": inst.config,
        }
        report["settings"] = {
            "resolution": inst.resolution.as_dict(),
            "tolerances": inst.tolerances.as_dict(),
            "search": inst.search.as_dict(),
        }
    if extra:
        report.update(extra)
    report["result"] = result
    report["exit_code"] = exit_code
    report["timing_ms"] = timing_ms
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def without_timing(report: dict) -> dict:
    """The report minus its wall-clock field, for determinism comparisons."""
    return {k: v for k, v in report.items() if k != "timing_ms"}
