import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


@dataclass
class ReportEntry:
    identity_id: str
    anchor: str
    passed: bool
    residual: Optional[str] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        data = {'identity_id': self.identity_id, 'anchor': self.anchor, 'pass': self.passed,
                'residual': self.residual}
        if self.detail:
            data['detail'] = self.detail
        return data


@dataclass
class Report:
    """Outcome of one verification suite; mismatches are recorded, never raised."""
    name: str
    anchor: str = ''
    entries: List[ReportEntry] = field(default_factory=list)
    summary: str = ''

    def add(self, identity_id: str, passed: bool, residual: Optional[str] = None,
            anchor: Optional[str] = None, **detail: Any) -> ReportEntry:
        entry = ReportEntry(identity_id, anchor if anchor is not None else self.anchor, bool(passed),
                            residual, detail)
        self.entries.append(entry)
        if not passed:
            logger.warning(f"{self.name}: {identity_id} failed ({entry.anchor}): {residual}")
        return entry

    def record_error(self, identity_id: str, error: Exception, anchor: Optional[str] = None) -> ReportEntry:
        logger.error(f"{self.name}: {identity_id} raised {type(error).__name__}: {error}")
        return self.add(identity_id, False, f"{type(error).__name__}: {error}", anchor)

    def extend(self, other: 'Report', prefix: Optional[str] = None):
        for entry in other.entries:
            name = f"{prefix}:{entry.identity_id}" if prefix else entry.identity_id
            self.entries.append(ReportEntry(name, entry.anchor, entry.passed, entry.residual, entry.detail))

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> List[ReportEntry]:
        return [e for e in self.entries if not e.passed]

    def first_failure(self) -> Optional[ReportEntry]:
        failures = self.failures()
        return failures[0] if failures else None

    def to_json(self) -> Dict[str, Any]:
        return {
            'suite': self.name,
            'anchor': self.anchor,
            'pass': self.passed,
            'summary': self.summary,
            'entries': [e.to_json() for e in self.entries],
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [{'identity_id': e.identity_id, 'anchor': e.anchor, 'pass': e.passed,
                 'residual': e.residual or ''} for e in self.entries]
        return pd.DataFrame(rows, columns=['identity_id', 'anchor', 'pass', 'residual'])

    def to_text(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"
                 + (f" ({self.summary})" if self.summary else '')]
        for e in self.entries:
            mark = 'ok  ' if e.passed else 'FAIL'
            line = f"  [{mark}] {e.identity_id}"
            if not e.passed and e.residual:
                line += f"  residual: {e.residual}"
            lines.append(line)
        return "\n".join(lines)

    def render(self, fmt: str = 'text') -> str:
        if fmt == 'json':
            return json.dumps(self.to_json(), indent=2, sort_keys=True)
        if fmt == 'csv':
            return self.to_frame().to_csv(index=False)
        return self.to_text()
