from dataclasses import dataclass


class TomographyError(ValueError):
    """Error tagged with a stable machine-readable ``code``."""

    def __init__(self, code, message=None):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


@dataclass(frozen=True)
class Violation:
    """One broken rule, naming the node/edge/subgraph it concerns."""

    rule: str
    subject: object = None
    detail: str = ""

    def __str__(self):
        tail = f" ({self.detail})" if self.detail else ""
        return f"{self.rule}[{self.subject}]{tail}"


class NetworkError(TomographyError):
    """Raised with the full list of violations found during validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0].rule if self.violations else "invalid-network"
        super().__init__(first, "; ".join(str(v) for v in self.violations))
