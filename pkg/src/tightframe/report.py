"""Residual tables shared by the checkers."""
from dataclasses import dataclass, field


@dataclass
class Entry:
    cond: str
    index: tuple
    value: complex
    target: complex
    residual: float


@dataclass
class ConditionReport:
    tol: float
    entries: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, cond, index, value, target):
        res = abs(complex(value) - complex(target))
        self.entries.append(Entry(cond, tuple(index), complex(value), complex(target), res))
        return res

    def extend(self, other):
        self.entries.extend(other.entries)
        for k, v in other.meta.items():
            self.meta.setdefault(k, v)
        return self

    @property
    def max_residual(self):
        return max((e.residual for e in self.entries), default=0.0)

    @property
    def passed(self):
        return all(e.residual <= self.tol for e in self.entries)

    def failures(self):
        return [e for e in self.entries if e.residual > self.tol]

    def worst(self):
        return max(self.entries, key=lambda e: e.residual, default=None)

    def by_condition(self):
        out = {}
        for e in self.entries:
            out[e.cond] = max(out.get(e.cond, 0.0), e.residual)
        return out

    def summary(self):
        lines = ["%-10s max residual %.3e" % (c, r) for c, r in sorted(self.by_condition().items())]
        w = self.worst()
        verdict = "PASS" if self.passed else "FAIL"
        if w is not None:
            lines.append("worst: %s %s residual %.3e" % (w.cond, w.index, w.residual))
        lines.append("verdict: %s (tol %.1e)" % (verdict, self.tol))
        return "\n".join(lines)

    def to_dict(self):
        return {
            "tol": self.tol,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "by_condition": self.by_condition(),
            "meta": self.meta,
            "failures": [
                {"cond": e.cond, "index": list(e.index), "residual": e.residual}
                for e in self.failures()[:50]
            ],
        }
