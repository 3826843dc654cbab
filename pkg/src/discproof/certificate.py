"""Machine-readable records of completed proof stages."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from .ival import Interval

PASS = "pass"
FAIL = "fail"
NOT_RUN = "not-run"


def iv_json(iv: Optional[Interval]) -> Optional[Dict[str, float]]:
    if iv is None:
        return None
    return {"lo": iv.lo, "hi": iv.hi}


@dataclass
class Certificate:
    stage: str
    status: str = NOT_RUN
    boxes_processed: int = 0
    discards_by_reason: Dict[str, int] = field(default_factory=dict)
    max_depth_reached: int = 0
    min_positive_margin: Optional[Dict[str, float]] = None
    runtime: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> Certificate:
        return cls(**d)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)
