"""Certificate files: serialization, digest and independent re-checking.

Indices in files are 1-based.  Rationals are ``"p/q"`` strings (``"p"`` when
the denominator is 1).  The ``digest`` field is the SHA-256 of the canonical
JSON encoding of everything else, so any edit is detected before the
semantic re-check runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, _accel
from .automorphism import make_automorphism, validate
from .cone import StrictConeProblem, check_certificate
from .exact import RatMat, rat_str
from .rcl import FAILED, VACUOUS, VERIFIED, Summary, TwistedSetup, WitnessCertificate
from .root_datum import build, from_cartan_matrix
from .weyl import word_matrix

SCHEMA = "rootcone-certificate/1"
TOOL = f"rootcone {__version__}"
GAMMA_FILE = {"zero": "zero", "gamma-w": "gamma_w"}
GAMMA_CLI = {v: k for k, v in GAMMA_FILE.items()}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAIL = 2


class CertificateFormatError(ValueError):
    pass


class HeaderMismatch(Exception):
    """Well-formed header whose fields contradict each other."""


def _ints(seq) -> list[int]:
    return [int(i) + 1 for i in seq]


def element_record(c: WitnessCertificate) -> dict:
    return {
        "word": _ints(c.word),
        "support": _ints(c.support),
        "witness": None if c.witness is None else c.witness.to_strings(),
        "margins": c.margins.to_strings(),
        "strategy": c.strategy,
        "vacuous": c.vacuous,
        "status": c.status,
        "checked_by": list(c.checked_by),
        "scale": c.scale,
        "certificate": None if c.counterexample is None else [int(v) for v in c.counterexample],
        "note": c.note,
    }


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("ascii")


def compute_digest(doc: dict) -> str:
    body = {k: v for k, v in doc.items() if k != "digest"}
    return "sha256:" + hashlib.sha256(_canonical(body)).hexdigest()


def build_document(
    setup: TwistedSetup,
    certs: list[WitnessCertificate],
    summary: Summary,
    strategy: str,
    gamma_mode: str,
    grid_max: int,
    timing: bool = True,
) -> dict:
    d = setup.datum
    header = {
        "schema": SCHEMA,
        "tool_version": TOOL,
        "cartan_type": "custom" if d.name == "custom" else str(d.cartan_type),
        "cartan": [[int(v) for v in row] for row in d.cartan_matrix.tolist()],
        "automorphism": setup.theta.to_json(),
        "weyl_order": len(certs),
        "gamma_mode": GAMMA_FILE[gamma_mode],
        "strategy": strategy,
        "grid_max": grid_max,
    }
    doc = {
        "header": header,
        "elements": [element_record(c) for c in certs],
        "summary": {
            "verified": summary.verified,
            "vacuous": summary.vacuous,
            "failed": summary.failed,
            "wall_time_ms": summary.wall_time_ms if timing else None,
        },
    }
    doc["digest"] = compute_digest(doc)
    return doc


def dumps(doc: dict) -> str:
    """Stable text form: one element record per line."""
    head = json.dumps(doc["header"], sort_keys=True)
    lines = ["{", f'"header": {head},', '"elements": [']
    recs = [json.dumps(e, sort_keys=True) for e in doc["elements"]]
    lines.extend(r + ("," if k < len(recs) - 1 else "") for k, r in enumerate(recs))
    lines.append("],")
    lines.append(f'"summary": {json.dumps(doc["summary"], sort_keys=True)},')
    lines.append(f'"digest": {json.dumps(doc["digest"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write(doc: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def load(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CertificateFormatError(f"cannot read certificate: {e}") from e
    if not isinstance(doc, dict):
        raise CertificateFormatError("certificate must be a JSON object")
    return doc


# --- checking -------------------------------------------------------------------


@dataclass
class CheckReport:
    exit_code: int
    checked: int = 0
    verified: int = 0
    vacuous: int = 0
    failed: int = 0
    problems: list[str] = field(default_factory=list)

    def add(self, msg: str, code: int = EXIT_FAIL):
        self.problems.append(msg)
        self.exit_code = max(self.exit_code, code)


def _rat(s) -> Fraction:
    if not isinstance(s, str):
        raise CertificateFormatError(f"rational must be a 'p/q' string, got {s!r}")
    try:
        v = Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise CertificateFormatError(f"bad rational {s!r}") from e
    if rat_str(v) != s:
        raise CertificateFormatError(f"rational {s!r} is not in lowest terms")
    return v


def _require(obj: dict, keys, where: str):
    for k in keys:
        if k not in obj:
            raise CertificateFormatError(f"missing key {where}.{k}")


def _setup_from_header(h: dict):
    cartan = h["cartan"]
    if h["cartan_type"] == "custom":
        datum = from_cartan_matrix(cartan)
    else:
        datum = build(h["cartan_type"])
        if [[int(v) for v in r] for r in datum.cartan_matrix.tolist()] != cartan:
            raise HeaderMismatch("cartan matrix does not match cartan_type")
    auto = h["automorphism"]
    perm = [int(p) - 1 for p in auto["perm"]]
    theta = make_automorphism(datum, perm, auto.get("name", "custom"))
    if not validate(theta):
        raise HeaderMismatch("automorphism does not preserve the Cartan matrix")
    if theta.order != auto.get("order"):
        raise HeaderMismatch("automorphism order mismatch")
    # no enumeration: elements are rebuilt from their words
    return datum, theta


def check_document(doc: dict) -> CheckReport:
    """Re-verify every record from scratch; exit code 0, 1 (format) or 2 (mismatch)."""
    rep = CheckReport(EXIT_OK)
    digest = doc.get("digest")
    if not isinstance(digest, str) or digest != compute_digest(doc):
        rep.add("digest mismatch: file was modified after it was written")
        return rep
    try:
        _require(doc, ("header", "elements", "summary"), "$")
        h = doc["header"]
        _require(h, ("schema", "tool_version", "cartan_type", "cartan", "automorphism", "weyl_order",
                     "gamma_mode", "strategy", "grid_max"), "header")
        if h["schema"] != SCHEMA:
            rep.add(f"unsupported schema {h['schema']!r} (expected {SCHEMA!r})", EXIT_USAGE)
            return rep
        if h["gamma_mode"] not in GAMMA_CLI:
            raise CertificateFormatError(f"unknown gamma_mode {h['gamma_mode']!r}")
        datum, theta = _setup_from_header(h)
        _check_elements(datum, theta, doc, rep)
    except HeaderMismatch as e:
        rep.add(f"header mismatch: {e}")
    except (CertificateFormatError, KeyError, TypeError, ValueError, IndexError) as e:
        rep.add(f"malformed certificate: {e}", EXIT_USAGE)
    return rep


def _check_elements(d, theta, doc: dict, rep: CheckReport) -> None:
    h = doc["header"]
    els = doc["elements"]
    r = d.rank
    if not isinstance(els, list):
        raise CertificateFormatError("elements must be a list")
    for k, e in enumerate(els):
        _require(e, ("word", "support", "witness", "margins", "status", "vacuous"), f"elements[{k}]")
    words = [tuple(int(i) - 1 for i in e["word"]) for e in els]
    for w in words:
        if any(not 0 <= i < r for i in w):
            raise CertificateFormatError(f"word {w} has an out-of-range letter")
    if not words:
        raise CertificateFormatError("no elements")
    mats = np.stack([word_matrix(d, w) for w in words])
    refl = d.reflection_matrices
    invs = np.stack([_inverse_from_word(refl, w, r) for w in words])
    eye = np.eye(r, dtype=np.int64)
    masks = np.any(mats != eye[None], axis=1)
    inv_int, den = d.inverse_cartan_scaled
    rows = np.einsum("ab,kbc->kac", inv_int, eye[None] - np.einsum("ab,kbc->kac", theta.inverse_weight_matrix, invs))
    gamma_mode = GAMMA_CLI[h["gamma_mode"]]
    shifts = None
    if gamma_mode == "gamma-w":
        height = inv_int.sum(axis=0)
        _, neg = _accel.negative_root_masks(mats, height, d.positive_root_weights)
        base = 1 - neg.astype(np.int64) @ d.positive_root_weights.T
        gam = base @ (eye - theta.inverse_weight_matrix).T
        shifts = gam @ inv_int.T  # over den

    seen = set()
    counts = {VERIFIED: 0, VACUOUS: 0, FAILED: 0}
    for k, e in enumerate(els):
        key = mats[k].tobytes()
        if key in seen:
            rep.add(f"element {k}: duplicate group element")
        seen.add(key)
        supp = tuple(int(i) for i in np.nonzero(masks[k])[0])
        if tuple(int(i) - 1 for i in e["support"]) != supp:
            rep.add(f"element {k}: support {e['support']} != recomputed {[i + 1 for i in supp]}")
            continue
        status = e["status"]
        if status not in counts:
            raise CertificateFormatError(f"element {k}: unknown status {status!r}")
        counts[status] += 1
        if bool(e["vacuous"]) != (not supp) or (status == VACUOUS) != (not supp):
            rep.add(f"element {k}: vacuous flag inconsistent with support")
            continue
        if status == VACUOUS:
            if e["margins"]:
                rep.add(f"element {k}: vacuous record carries margins")
            continue
        if status == FAILED:
            cert = e.get("certificate")
            if cert is not None:
                sub = RatMat([[Fraction(int(v), den) for v in rows[k][b]] for b in supp], ncols=r)
                if not check_certificate(StrictConeProblem(sub, chamber=True), cert):
                    rep.add(f"element {k}: Gordan certificate does not combine to zero")
            rep.add(f"element {k}: recorded as failed")
            continue
        x = [_rat(s) for s in e["witness"]]
        if len(x) != r or not all(v > 0 for v in x):
            rep.add(f"element {k}: witness outside the open chamber")
            continue
        margins = [_rat(s) for s in e["margins"]]
        if len(margins) != len(supp):
            rep.add(f"element {k}: {len(margins)} margins for {len(supp)} rows")
            continue
        for b, m in zip(supp, margins):
            val = sum((Fraction(int(rows[k][b][j])) * x[j] for j in range(r)), Fraction(0)) / den
            if shifts is not None:
                val -= Fraction(int(shifts[k][b]), den)
            if val != m:
                rep.add(f"element {k}: margin for row {b + 1} is {rat_str(val)}, file says {rat_str(m)}")
                break
            if m <= 0:
                rep.add(f"element {k}: non-positive margin for row {b + 1}")
                break
    rep.checked = len(els)
    rep.verified, rep.vacuous, rep.failed = counts[VERIFIED], counts[VACUOUS], counts[FAILED]
    s = doc["summary"]
    _require(s, ("verified", "vacuous", "failed"), "summary")
    if (s["verified"], s["vacuous"], s["failed"]) != (rep.verified, rep.vacuous, rep.failed):
        rep.add("summary counts disagree with the element records")
    expected = None if h["cartan_type"] == "custom" else d.cartan_type.weyl_order()
    if h["weyl_order"] != len(els) or (expected is not None and expected != len(els)):
        rep.add(f"weyl_order {h['weyl_order']} vs {len(els)} records (expected {expected})")


def _inverse_from_word(refl: np.ndarray, word, r: int) -> np.ndarray:
    m = np.eye(r, dtype=np.int64)
    for i in word:
        m = refl[i] @ m
    return m


def check_file(path: str | Path) -> CheckReport:
    try:
        doc = load(path)
    except CertificateFormatError as e:
        rep = CheckReport(EXIT_USAGE)
        rep.problems.append(str(e))
        return rep
    return check_document(doc)


def summary_of(doc: dict) -> Optional[dict]:
    return doc.get("summary")
