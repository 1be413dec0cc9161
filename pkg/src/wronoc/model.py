"""Domain model for microring resonance instances.

Every wavelength in this package is an integer number of picometres
(1 nm = 1000 pm).  Conflict detection and spacing checks are equality and
interval tests, so the whole pipeline runs on exact integer arithmetic;
there is no floating-point wavelength anywhere in the public API.

An instance is a table of ring radii, each with its ascending list of
resonance wavelengths.  Each resonance carries an uncertainty interval
[lmin, lmax] around its nominal value; how that interval is obtained is a
load-time policy (taken verbatim from the file, or recomputed as
nominal +/- half_width).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

PM_PER_NM = 1000

EXPLICIT_INTERVALS = "explicit-intervals"
SYMMETRIC_HALF_WIDTH = "symmetric-half-width"


class ModelError(Exception):
    """Invalid instance data."""


class ParseError(ModelError):
    """Malformed instance file; message carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class DeltaPolicy:
    """How per-resonance uncertainty intervals are obtained at load time.

    In ``symmetric-half-width`` mode any intervals present in the file are
    ignored and recomputed as nominal -/+ ``half_width``.  Note that under
    this policy two resonances conflict when their nominals are at most
    ``2 * half_width`` apart (both intervals widen).
    """

    mode: str = EXPLICIT_INTERVALS
    half_width: int = 0

    def __post_init__(self):
        if self.mode not in (EXPLICIT_INTERVALS, SYMMETRIC_HALF_WIDTH):
            raise ModelError(f"unknown delta policy mode {self.mode!r}")
        if self.half_width < 0:
            raise ModelError("half_width must be >= 0")

    @classmethod
    def explicit(cls) -> "DeltaPolicy":
        return cls(EXPLICIT_INTERVALS, 0)

    @classmethod
    def symmetric(cls, half_width_pm: int) -> "DeltaPolicy":
        return cls(SYMMETRIC_HALF_WIDTH, half_width_pm)


@dataclass(frozen=True)
class Resonance:
    """One resonance wavelength with its uncertainty interval, in pm."""

    nominal: int
    lmin: int
    lmax: int

    @classmethod
    def exact(cls, nominal: int) -> "Resonance":
        return cls(nominal, nominal, nominal)

    @classmethod
    def widened(cls, nominal: int, half_width: int) -> "Resonance":
        return cls(nominal, nominal - half_width, nominal + half_width)


@dataclass(frozen=True)
class RadiusEntry:
    """A ring radius and its resonances, sorted ascending by nominal."""

    id: int
    radius_pm: int
    resonances: tuple[Resonance, ...]

    def __post_init__(self):
        object.__setattr__(self, "resonances", tuple(self.resonances))

    def nominals(self) -> tuple[int, ...]:
        return tuple(r.nominal for r in self.resonances)


@dataclass(frozen=True)
class Instance:
    """A full radius/resonance table plus a free-text label."""

    radii: tuple[RadiusEntry, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(self.radii))

    def ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.radii)

    def entry(self, radius_id: int) -> RadiusEntry:
        for e in self.radii:
            if e.id == radius_id:
                return e
        raise KeyError(f"no radius with id {radius_id}")

    def all_nominals(self) -> list[int]:
        return [r.nominal for e in self.radii for r in e.resonances]


def validate(instance: Instance) -> list[str]:
    """Check every structural invariant; return one message per violation.

    Violations are data, not exceptions: an empty list means the instance
    is well formed.  ``parse_instance`` calls this and refuses to return
    an invalid instance.
    """
    violations: list[str] = []
    if not instance.radii:
        violations.append("no radii")
        return violations
    seen_ids: set[int] = set()
    for entry in instance.radii:
        if entry.id < 1:
            violations.append(f"radius {entry.id}: id must be positive")
        if entry.id in seen_ids:
            violations.append(f"duplicate radius id {entry.id}")
        seen_ids.add(entry.id)
        if entry.radius_pm < 0:
            violations.append(f"radius {entry.id}: negative radius_pm")
        if not entry.resonances:
            violations.append(f"radius {entry.id}: no resonances")
            continue
        prev = None
        for k, res in enumerate(entry.resonances):
            if res.lmin <= 0:
                violations.append(
                    f"radius {entry.id}, resonance {k}: non-positive wavelength"
                )
            if not (res.lmin <= res.nominal <= res.lmax):
                violations.append(
                    f"radius {entry.id}, resonance {k}: "
                    "interval violates lmin <= nominal <= lmax"
                )
            if prev is not None and res.nominal <= prev:
                violations.append(
                    f"radius {entry.id}: resonances not strictly "
                    f"ascending at index {k}"
                )
            prev = res.nominal
    return violations


def apply_delta(instance: Instance, half_width_pm: int) -> Instance:
    """Return a copy with all intervals recomputed as nominal -/+ half width."""
    if half_width_pm < 0:
        raise ModelError("half_width must be >= 0")
    radii = tuple(
        RadiusEntry(
            e.id,
            e.radius_pm,
            tuple(Resonance.widened(r.nominal, half_width_pm) for r in e.resonances),
        )
        for e in instance.radii
    )
    return Instance(radii, instance.label)


# ---------------------------------------------------------------------------
# File formats.
#
# Canonical format (UTF-8, line oriented):
#   # comment                      ('# label: <text>' restores the label)
#   radius <id> <radius_pm>
#   resonance <radius_id> <nominal_pm> [<lmin_pm> <lmax_pm>]
#
# ASP fact format:
#   lambda(R,Lmin,Lnom,Lmax).
#   % comment                      ('% label: <text>' / '% radius <id> <pm>'
#                                   restore metadata our exporter embeds)
#
# Both line families are accepted by the same parser.  Foreign fact files
# without metadata comments parse with radius_pm = 0.
# ---------------------------------------------------------------------------

_LAMBDA_RE = re.compile(
    r"^lambda\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*\.$"
)


def parse_instance(text: str | bytes, policy: DeltaPolicy | None = None) -> Instance:
    """Parse canonical or ASP-fact instance text into a validated Instance.

    Resonances are normalised ascending by nominal and radii ascending by
    id.  Under a symmetric policy, intervals in the file are discarded and
    recomputed from the policy half width.
    """
    if policy is None:
        policy = DeltaPolicy.explicit()
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    label = ""
    radius_pm: dict[int, int] = {}
    declared: set[int] = set()
    raw: dict[int, list[tuple[int, int, int]]] = {}
    nominals_seen: dict[int, set[int]] = {}

    def declare(rid: int, pm: int, line_no: int, explicit: bool) -> None:
        if explicit and rid in declared:
            raise ParseError(f"duplicate radius id {rid}", line_no)
        if explicit:
            declared.add(rid)
        radius_pm.setdefault(rid, 0)
        if pm:
            radius_pm[rid] = pm
        raw.setdefault(rid, [])
        nominals_seen.setdefault(rid, set())

    def add_resonance(rid: int, nom: int, lo: int, hi: int, line_no: int) -> None:
        if nom in nominals_seen[rid]:
            raise ParseError(
                f"duplicate nominal wavelength {nom} for radius {rid}", line_no
            )
        nominals_seen[rid].add(nom)
        if policy.mode == SYMMETRIC_HALF_WIDTH:
            lo, hi = nom - policy.half_width, nom + policy.half_width
        elif not (lo <= nom <= hi):
            raise ParseError(
                f"radius {rid}: interval violates lmin <= nominal <= lmax", line_no
            )
        raw[rid].append((nom, lo, hi))

    for line_no, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped[0] in "#%":
            body = stripped[1:].strip()
            if body.startswith("label:"):
                label = body[len("label:"):].strip()
            elif stripped[0] == "%":
                # Metadata our ASP exporter embeds; '#' comments stay inert.
                fields = body.split()
                if len(fields) == 3 and fields[0] == "radius":
                    try:
                        declare(int(fields[1]), int(fields[2]), line_no, explicit=True)
                    except ValueError:
                        pass  # free-form comment that merely starts with "radius"
            continue
        m = _LAMBDA_RE.match(stripped)
        if m:
            rid, lo, nom, hi = (int(g) for g in m.groups())
            declare(rid, 0, line_no, explicit=False)
            add_resonance(rid, nom, lo, hi, line_no)
            continue
        fields = stripped.split()
        if fields[0] == "radius":
            if len(fields) != 3:
                raise ParseError("radius line needs: radius <id> <radius_pm>", line_no)
            try:
                declare(int(fields[1]), int(fields[2]), line_no, explicit=True)
            except ValueError:
                raise ParseError("radius arguments must be integers", line_no) from None
        elif fields[0] == "resonance":
            if len(fields) not in (3, 5):
                raise ParseError(
                    "resonance line needs: resonance <radius_id> <nominal_pm> "
                    "[<lmin_pm> <lmax_pm>]",
                    line_no,
                )
            try:
                nums = [int(f) for f in fields[1:]]
            except ValueError:
                raise ParseError("resonance arguments must be integers", line_no) from None
            rid, nom = nums[0], nums[1]
            lo, hi = (nums[2], nums[3]) if len(nums) == 4 else (nom, nom)
            if rid not in raw:
                raise ParseError(f"resonance references unknown radius id {rid}", line_no)
            add_resonance(rid, nom, lo, hi, line_no)
        else:
            raise ParseError(f"unrecognized line: {stripped!r}", line_no)

    radii = tuple(
        RadiusEntry(
            rid,
            radius_pm[rid],
            tuple(Resonance(nom, lo, hi) for nom, lo, hi in sorted(raw[rid])),
        )
        for rid in sorted(raw)
    )
    instance = Instance(radii, label)
    violations = validate(instance)
    if violations:
        raise ModelError("; ".join(violations))
    return instance


def export_asp_facts(instance: Instance) -> str:
    """Render an instance as ASP facts, one ``lambda/4`` fact per resonance.

    Radii are emitted in ascending id order, resonances ascending by
    nominal.  Label and physical radii travel in ``%`` comments so that
    re-parsing the export reproduces the instance exactly.
    """
    lines: list[str] = []
    if instance.label:
        lines.append(f"% label: {instance.label}")
    entries = sorted(instance.radii, key=lambda e: e.id)
    for e in entries:
        if e.radius_pm:
            lines.append(f"% radius {e.id} {e.radius_pm}")
    for e in entries:
        for r in e.resonances:
            lines.append(f"lambda({e.id},{r.lmin},{r.nominal},{r.lmax}).")
    return "\n".join(lines) + "\n"


def format_instance(instance: Instance) -> str:
    """Render an instance in the canonical line-oriented format."""
    lines: list[str] = []
    if instance.label:
        lines.append(f"# label: {instance.label}")
    for e in sorted(instance.radii, key=lambda x: x.id):
        lines.append(f"radius {e.id} {e.radius_pm}")
        for r in e.resonances:
            if r.lmin == r.nominal == r.lmax:
                lines.append(f"resonance {e.id} {r.nominal}")
            else:
                lines.append(f"resonance {e.id} {r.nominal} {r.lmin} {r.lmax}")
    return "\n".join(lines) + "\n"


def instance_digest(instance: Instance) -> str:
    """Content hash of the canonical serialization (sha256 hex)."""
    return hashlib.sha256(format_instance(instance).encode("utf-8")).hexdigest()


def pm_to_nm_text(pm: int) -> str:
    """Human-readable nm rendering of a pm value, exact (no floats)."""
    whole, frac = divmod(pm, PM_PER_NM)
    return f"{whole}.{frac:03d}".rstrip("0").rstrip(".") if frac else str(whole)
