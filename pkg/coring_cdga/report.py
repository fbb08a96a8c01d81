import json
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from coring_cdga.errors import CoringCdgaError


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: Optional[Any] = None
    window: Optional[list] = None

    def to_dict(self) -> dict:
        result = {"check": self.name, "status": "PASS" if self.passed else "FAIL"}
        if self.witness is not None:
            result["witness"] = self.witness
        if self.window is not None:
            result["window"] = list(self.window)
        return result

    def to_text(self) -> str:
        line = f"CHECK {self.name}: {'PASS' if self.passed else 'FAIL'}"
        if not self.passed and self.witness is not None:
            line += f" {json.dumps(self.witness)}"
        return line


@dataclass
class VerificationReport:
    subject: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    window: Optional[list] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, passed: bool, witness: Optional[Any] = None,
            window: Optional[list] = None) -> CheckResult:
        check = CheckResult(name=name, passed=bool(passed), witness=None if passed else witness, window=window)
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport", prefix: Optional[str] = None):
        for check in other.checks:
            name = f"{prefix}.{check.name}" if prefix else check.name
            self.checks.append(CheckResult(name=name, passed=check.passed, witness=check.witness,
                                           window=check.window))
        for note in other.notes:
            if note not in self.notes:
                self.notes.append(note)

    def note(self, text: str):
        if text not in self.notes:
            self.notes.append(text)

    def check(self, name: str) -> CheckResult:
        found = [c for c in self.checks if c.name == name]
        if not found:
            raise KeyError(f"VerificationReport.check -- no check named {name!r} in {self.subject}")
        return found[0]

    def first_failure_error(self, error_type: type, message: str) -> CoringCdgaError:
        failure = self.failures[0]
        return error_type(f"{message} -- {failure.name} failed", witness=failure.witness)

    def __repr__(self):
        return f"VerificationReport {self.subject} - {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)"

    def to_dict(self) -> dict:
        result = {
            "subject": self.subject,
            "status": "PASS" if self.passed else "FAIL",
            "checks": [check.to_dict() for check in self.checks],
        }
        if self.window is not None:
            result["window"] = list(self.window)
        if self.notes:
            result["notes"] = list(self.notes)
        return result

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"# {self.subject}"]
        if self.window is not None:
            lines.append(f"# window {list(self.window)}")
        lines.extend(f"# note: {note}" for note in self.notes)
        lines.extend(check.to_text() for check in self.checks)
        return "\n".join(lines)


@dataclass
class ReportBundle:
    """named reports gathered by one CLI run or script, with optional timings"""
    reports: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    deterministic: bool = True

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports.values())

    def run(self, name: str, func, *args, **kwargs) -> VerificationReport:
        start = time.perf_counter()
        report = func(*args, **kwargs)
        self.timings[name] = round(time.perf_counter() - start, 4)
        self.reports[name] = report
        return report

    def add(self, name: str, report: VerificationReport):
        self.reports[name] = report

    def to_dict(self) -> dict:
        result = {
            "status": "PASS" if self.passed else "FAIL",
            "reports": {name: report.to_dict() for name, report in self.reports.items()},
        }
        if not self.deterministic:
            result["timings"] = dict(self.timings)
        return result

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        return "\n".join(report.to_text() for report in self.reports.values())
