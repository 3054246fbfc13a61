"""Code-reduction bookkeeping.

Counting convention: template input counts non-blank code lines only
(directive lines and ignored header comments are excluded); generated output
counts non-blank lines of non-verbose renders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ZeroGenerated
from .template import Template


def count_template_lines(templates: Iterable[Template]) -> int:
    return sum(
        1
        for tpl in templates
        for section in tpl.sections
        for line in section.code_lines
        if line.text.strip()
    )


def count_generated_lines(outputs: Iterable[str]) -> int:
    return sum(1 for text in outputs for line in text.splitlines() if line.strip())


def reduction(input_lines: int, generated_lines: int) -> float:
    """Percentage saved, ``100 * (1 - input/generated)``, to one decimal."""
    if generated_lines <= 0:
        raise ZeroGenerated("generated line count must be positive")
    return round(100.0 * (1.0 - input_lines / generated_lines), 1)


@dataclass(frozen=True)
class ReductionReport:
    label: str
    input_lines: int
    generated_lines: int

    @property
    def reduction(self) -> float:
        return reduction(self.input_lines, self.generated_lines)


def format_table(reports: Iterable[ReductionReport]) -> str:
    rows = [("Tools/Variants", "input", "generated", "Reduction")]
    for r in reports:
        rows.append((r.label, str(r.input_lines), str(r.generated_lines), f"{r.reduction:.1f} %"))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = []
    for n, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [row[i].rjust(widths[i]) for i in range(1, 4)]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
