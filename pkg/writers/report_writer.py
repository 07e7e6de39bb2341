import json
import math
from logging import Logger
from pathlib import Path
from typing import Any, Dict, Optional

from helpers.constants import REPORT_KEYS, RNG_NAME
from models.moments import TheoryReport


class ReportWriter:
    """Serialize a TheoryReport as a JSON key/value document."""

    @staticmethod
    def to_mapping(report: TheoryReport, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Ordered mapping of the report; non-finite floats become null."""
        dumped = report.model_dump(mode="python")
        out: Dict[str, Any] = {}
        for key in REPORT_KEYS:
            value = dumped.get(key)
            if hasattr(value, "value"):
                value = value.value
            if isinstance(value, float) and not math.isfinite(value):
                value = None
            out[key] = value
        out["rng"] = RNG_NAME
        if extra:
            out.update(extra)
        return out

    @staticmethod
    def write(
        logger: Optional[Logger],
        path: Path,
        report: TheoryReport,
        extra: Optional[Dict[str, Any]] = None,
    ) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(ReportWriter.to_mapping(report, extra), indent=2)
        path.write_text(text + "\n", encoding="utf-8")
        if logger:
            logger.info("💾 Wrote %s", path)
        return path
