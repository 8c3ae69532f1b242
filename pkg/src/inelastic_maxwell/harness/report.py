import csv
import json
from dataclasses import asdict, dataclass, field
from typing import List, Optional

from ..utils.io import atomic_open
from ..utils.logger import get_logger

logger = get_logger(__name__)

REPORT_COLUMNS = ["suite", "check", "kind", "bound", "measured", "slack", "passed"]


@dataclass
class Check:
    """One verified statement.

    Inequality checks pass when measured <= bound + slack; equality checks
    store the expected value in ``bound`` and the tolerance in ``slack`` and
    pass when |measured - bound| <= slack.
    """

    suite: str
    name: str
    kind: str
    bound: float
    measured: float
    slack: float
    passed: bool

    @classmethod
    def inequality(cls, suite: str, name: str, measured: float, bound: float,
                   slack: float = 0.0) -> "Check":
        passed = bool(measured <= bound + slack)
        return cls(suite, name, "inequality", float(bound), float(measured), float(slack), passed)

    @classmethod
    def equality(cls, suite: str, name: str, measured: float, expected: float,
                 tol: float) -> "Check":
        passed = bool(abs(measured - expected) <= tol)
        return cls(suite, name, "equality", float(expected), float(measured), float(tol), passed)


@dataclass
class VerificationReport:
    suite: str
    checks: List[Check] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def extend(self, checks: List[Check]):
        self.checks.extend(checks)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: suite '{self.suite}', {len(self.checks) - len(self.failures)}"
            f"/{len(self.checks)} checks passed"
        )

    def to_csv(self, path: str) -> str:
        """One row per check, floats written with repr."""
        try:
            with atomic_open(path, "w") as f:
                writer = csv.writer(f)
                writer.writerow(REPORT_COLUMNS)
                for c in self.checks:
                    writer.writerow(
                        [c.suite, c.name, c.kind, repr(c.bound), repr(c.measured), repr(c.slack),
                         "true" if c.passed else "false"]
                    )
            logger.info(f"Verification report written to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing report to {path}: {e}")
            raise

    def to_json(self, path: Optional[str] = None) -> str:
        """JSON summary; written to ``path`` when given, always returned."""
        payload = {
            "suite": self.suite,
            "passed": self.passed,
            "seeds": self.seeds,
            "checks": [asdict(c) for c in self.checks],
        }
        text = json.dumps(payload, indent=2)
        if path is not None:
            try:
                with atomic_open(path, "w") as f:
                    f.write(text)
                logger.info(f"Verification summary written to {path}")
            except OSError as e:
                logger.error(f"Error writing report summary to {path}: {e}")
                raise
        return text
