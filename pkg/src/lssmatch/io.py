"""Readers and writers for feature CSVs, matching JSON and curve CSVs.

CSV conventions: comma separator, ``.`` decimal point, UTF-8, ``#``-prefixed
comment lines ignored, blank lines skipped.  An optional header row is
auto-detected (a first row with any non-numeric cell is dropped).
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Iterable

from .core import FeatureSet, PartialMatching
from .errors import EmptyInputError, NonNumericCellError, RaggedRowError
from .flow import LssCurve
from .selection import SelectionOutcome

CURVE_HEADER = "k,phi"


def load_feature_csv(path) -> FeatureSet:
    """Parse one d-dimensional vector per non-comment row.

    Raises a parse error carrying the offending line number for ragged rows
    or non-numeric cells, and EmptyInputError when no data rows remain.
    """
    vectors: list[list[float]] = []
    width = None
    header_candidate = True
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = [cell.strip() for cell in line.split(",")]
            try:
                values = [float(cell) for cell in cells]
            except ValueError:
                if header_candidate:
                    header_candidate = False
                    continue
                raise NonNumericCellError(f"non-numeric value in {cells!r}", line=lineno)
            header_candidate = False
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise RaggedRowError(
                    f"row has {len(values)} values, expected {width}", line=lineno
                )
            vectors.append(values)
    if not vectors:
        raise EmptyInputError(f"no data rows in {path}")
    return FeatureSet(vectors)


def save_feature_csv(features: FeatureSet, path) -> None:
    """Write one vector per row with round-trip-exact float formatting."""
    with open(path, "w", encoding="utf-8") as handle:
        for row in features.vectors:
            handle.write(",".join(repr(float(v)) for v in row))
            handle.write("\n")


def matching_payload(result: SelectionOutcome | tuple[PartialMatching, float]) -> dict:
    """The JSON object for a matching or a selection outcome (stable field order)."""
    if isinstance(result, SelectionOutcome):
        payload = {
            "pairs": [[i, j] for i, j in result.matching.sorted_pairs()],
            "k": result.matching.size,
            "phi": float(result.phi),
            "k_hat": result.k_hat,
        }
        if result.sigma_bar_sq is not None:
            payload["sigma_bar_sq"] = float(result.sigma_bar_sq)
        payload["gamma_clamped"] = result.gamma_clamped
        payload["diagnostics"] = [step.to_dict() for step in result.diagnostics]
        return payload
    matching, phi = result
    return {
        "pairs": [[i, j] for i, j in matching.sorted_pairs()],
        "k": matching.size,
        "phi": float(phi),
    }


def save_matching_json(result: SelectionOutcome | tuple[PartialMatching, float], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(matching_payload(result), handle)
        handle.write("\n")


def load_matching_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def save_curve_csv(curve: LssCurve, path) -> None:
    """Dump phi(k) for k = 1..k_max as ``k,phi`` rows."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(CURVE_HEADER + "\n")
        for k, phi in enumerate(curve.phi, start=1):
            handle.write(f"{k},{phi!r}\n")


def load_curve_csv(path) -> list[float]:
    """Read phi(1..k_max) back from a ``k,phi`` file (values round-trip exactly)."""
    phi: list[float] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line == CURVE_HEADER:
                continue
            cells = line.split(",")
            if len(cells) != 2:
                raise RaggedRowError(f"expected 'k,phi', got {line!r}", line=lineno)
            try:
                k, value = int(cells[0]), float(cells[1])
            except ValueError:
                raise NonNumericCellError(f"bad curve row {line!r}", line=lineno)
            if k != len(phi) + 1:
                raise RaggedRowError(f"curve rows must be consecutive from k=1", line=lineno)
            phi.append(value)
    if not phi:
        raise EmptyInputError(f"no curve rows in {path}")
    return phi


def save_histogram_csv(k_hats: Iterable[int], path) -> Counter:
    """Write a ``k_hat,count`` histogram of selected sizes; returns the counts."""
    counts = Counter(int(k) for k in k_hats)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("k_hat,count\n")
        for value in sorted(counts):
            handle.write(f"{value},{counts[value]}\n")
    return counts
