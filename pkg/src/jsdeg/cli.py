"""Command line interface.

One verb per activity:

  check      validate a catalogue (grading and structure identities)
  act        apply a basis change file to a catalogue entry
  witness    verify degeneration witness files against a catalogue
  certify    run one certificate file against a catalogue
  batch      run a certificate directory (default: the shipped set)
  stability  B-stability of certificate closed sets, no catalogue needed

Exit codes: 0 when everything passed (for certify/batch: every pair
resolved and NonDegeneration), 1 when any check did not pass, 2 for usage
or I/O errors.

Configuration comes from flags, or from a JSON config file given with
--config whose keys are the long flag names (dashes or underscores); flags
win over the file.  Reports are printed as text and, with --jsonl PATH,
also written one JSON record per pair plus a trailing summary record.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import sys
import time
from collections import Counter
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

from .action import act_laurent
from .certificate import (
    MIXED_ORIENTATIONS,
    ORIENTATIONS,
    MembershipResult,
    Outcome,
    RepresentabilityResult,
    StabilityStatus,
    assemble_verdict,
    b_stability,
    membership_with_orbit_fallback,
    representability,
)
from .degeneration import Witness, verify_witness
from .formats import (
    CatalogueEntry,
    CertificateFile,
    FileFormatError,
    load_catalogue,
    parse_algebra_file,
    parse_certificate_file,
    parse_witness_file,
    serialize_algebra,
    shipped_certificate_paths,
)
from .groebner import GroebnerLimits
from .superalgebra import SuperStructure

USAGE_ERROR = 2


class CliError(Exception):
    """Usage or I/O problem; maps to exit code 2."""


@dataclass
class RunConfig:
    max_seconds: float = 600.0
    max_basis: int = 20000
    max_degree: int = 120
    orientation: str = "both"
    jobs: int = 1
    modular_precheck: bool = False
    witness_search: bool = True
    catalogue: str | None = None
    certificates: str | None = None
    jsonl: str | None = None

    def limits(self) -> GroebnerLimits:
        return GroebnerLimits(self.max_basis, self.max_degree, self.max_seconds)

    def orientations(self) -> tuple[str, ...] | None:
        # None lets the stability check pick every orientation that is
        # distinct for the type at hand
        if self.orientation == "both":
            return None
        return (self.orientation,)

    def echo(self) -> dict:
        return {
            "max_seconds": self.max_seconds,
            "max_basis": self.max_basis,
            "max_degree": self.max_degree,
            "orientation": self.orientation,
            "jobs": self.jobs,
            "modular_precheck": self.modular_precheck,
            "witness_search": self.witness_search,
        }


@dataclass
class PairRecord:
    certificate: str
    source_id: str
    target_id: str
    outcome: str
    orientation: str | None = None
    stability_mode: str | None = None
    membership_mode: str | None = None
    timings: dict = field(default_factory=dict)
    digest: str = ""
    reasons: tuple[str, ...] = ()
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {
            "certificate": self.certificate,
            "source": self.source_id,
            "target": self.target_id,
            "outcome": self.outcome,
            "orientation": self.orientation,
            "stability_mode": self.stability_mode,
            "membership_mode": self.membership_mode,
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
            "digest": self.digest,
            "reasons": list(self.reasons),
        }
        if self.witness is not None:
            out["witness"] = {k: str(v) for k, v in self.witness.items()}
        return out


@dataclass
class RunReport:
    records: list[PairRecord]
    config: dict

    @property
    def summary(self) -> dict[str, int]:
        return dict(Counter(r.outcome for r in self.records))

    def all_pass(self) -> bool:
        return bool(self.records) and all(
            r.outcome == Outcome.NON_DEGENERATION.value for r in self.records
        )


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _load_config_file(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise CliError(f"config file {path} must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, value in raw.items():
        norm = key.replace("-", "_")
        if norm not in known:
            raise CliError(f"config file {path}: unknown key {key!r}")
        out[norm] = value
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, value in _load_config_file(args.config).items():
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, value)
    if cfg.orientation not in ("both",) + ORIENTATIONS + MIXED_ORIENTATIONS:
        raise CliError(f"unknown orientation {cfg.orientation!r}")
    if cfg.jobs < 1:
        raise CliError("--jobs must be at least 1")
    return cfg


# ---------------------------------------------------------------------------
# Catalogue plumbing
# ---------------------------------------------------------------------------


def _read_catalogue(cfg: RunConfig, required: bool = True) -> dict[str, CatalogueEntry]:
    path = cfg.catalogue
    if path is None:
        if required:
            raise CliError("a catalogue is required; pass --catalogue DIR")
        return {}
    try:
        return load_catalogue(path)
    except (OSError, FileFormatError) as exc:
        raise CliError(f"cannot load catalogue: {exc}") from exc


def resolve_entry(catalogue: dict[str, CatalogueEntry], mtype: tuple[int, int], token: str):
    """A certificate names structures by bare token; the catalogue keys them
    as (M,N)_token.  Both spellings are accepted."""
    m, n = mtype
    for key in (f"({m},{n})_{token}", token):
        entry = catalogue.get(key)
        if entry is not None:
            if (entry.structure.m, entry.structure.n) != mtype:
                raise CliError(f"catalogue entry {key} has type "
                               f"({entry.structure.m},{entry.structure.n}), expected ({m},{n})")
            return entry
    return None


def _certificate_paths(cfg: RunConfig) -> list[Path]:
    if cfg.certificates is None:
        return shipped_certificate_paths()
    p = Path(cfg.certificates)
    if p.is_dir():
        found = sorted(p.rglob("*.cert"))
        if not found:
            raise CliError(f"no .cert files under {p}")
        return found
    if p.is_file():
        return [p]
    raise CliError(f"certificate path not found: {p}")


def _parse_certificates(paths: Iterable[Path]) -> list[tuple[CertificateFile, str]]:
    out = []
    for path in paths:
        try:
            text = path.read_text()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc}") from exc
        out.append((parse_certificate_file(text, str(path)), _digest(text)))
    return out


# ---------------------------------------------------------------------------
# Certificate runs
# ---------------------------------------------------------------------------


def run_certificate(cf: CertificateFile, digest: str,
                    catalogue: dict[str, CatalogueEntry], cfg: RunConfig) -> list[PairRecord]:
    """All pair records for one certificate: the stability check runs once,
    membership once per source, representability once per target."""
    limits = cfg.limits()
    name = cf.closed_set.name

    t0 = time.monotonic()
    stab = b_stability(cf.closed_set, limits, cfg.orientations())
    stab_time = time.monotonic() - t0

    sources: dict[str, tuple[MembershipResult | None, float]] = {}
    for sid in cf.sources:
        entry = resolve_entry(catalogue, cf.mtype, sid)
        if entry is None:
            sources[sid] = (None, 0.0)
            continue
        t0 = time.monotonic()
        mem = membership_with_orbit_fallback(cf.closed_set, entry.structure, limits,
                                             cfg.modular_precheck)
        sources[sid] = (mem, time.monotonic() - t0)

    targets: dict[str, tuple[RepresentabilityResult | None, float]] = {}
    for tid in cf.targets:
        entry = resolve_entry(catalogue, cf.mtype, tid)
        if entry is None:
            targets[tid] = (None, 0.0)
            continue
        t0 = time.monotonic()
        rep = representability(cf.closed_set, entry.structure, limits,
                               cfg.modular_precheck, cfg.witness_search)
        targets[tid] = (rep, time.monotonic() - t0)

    records = []
    for sid in cf.sources:
        mem, mem_time = sources[sid]
        for tid in cf.targets:
            rep, rep_time = targets[tid]
            missing = [x for x, got in ((sid, mem), (tid, rep)) if got is None]
            if missing:
                records.append(PairRecord(
                    name, sid, tid, "skipped",
                    timings={"stability": stab_time},
                    digest=digest,
                    reasons=tuple(f"catalogue has no entry for {x!r}" for x in missing),
                ))
                continue
            verdict = assemble_verdict(sid, tid, name, mem, stab, rep)
            records.append(PairRecord(
                name, sid, tid, verdict.outcome.value,
                orientation=stab.orientation,
                stability_mode=stab.mode,
                membership_mode=mem.mode,
                timings={"stability": stab_time, "membership": mem_time,
                         "representability": rep_time},
                digest=digest,
                reasons=verdict.reasons,
                witness=rep.witness,
            ))
    return records


def run_batch(catalogue_path: str | None, certificates_path: str | None,
              cfg: RunConfig) -> RunReport:
    """Every certificate under the given path (default: shipped data)
    against the catalogue.  Certificates fan out to a bounded worker pool;
    record assembly stays single-threaded and input-ordered."""
    cfg.catalogue = catalogue_path if catalogue_path is not None else cfg.catalogue
    cfg.certificates = certificates_path if certificates_path is not None else cfg.certificates
    catalogue = _read_catalogue(cfg, required=False)
    parsed = _parse_certificates(_certificate_paths(cfg))
    records: list[PairRecord] = []
    if cfg.jobs == 1:
        for cf, digest in parsed:
            records.extend(run_certificate(cf, digest, catalogue, cfg))
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(run_certificate, cf, digest, catalogue, cfg)
                       for cf, digest in parsed]
            for fut in futures:
                records.extend(fut.result())
    return RunReport(records, cfg.echo())


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def render_report(report: RunReport) -> str:
    lines = []
    for r in report.records:
        head = f"{r.certificate}: {r.source_id} !-> {r.target_id}: {r.outcome}"
        extras = []
        if r.orientation:
            extras.append(f"orientation={r.orientation}")
        if r.stability_mode:
            extras.append(f"mode={r.stability_mode}")
        if r.membership_mode and r.membership_mode != "direct":
            extras.append(f"membership={r.membership_mode}")
        if r.timings:
            total = sum(r.timings.values())
            extras.append(f"{total:.2f}s")
        if extras:
            head += "  [" + ", ".join(extras) + "]"
        lines.append(head)
        for reason in r.reasons:
            lines.append(f"    - {reason}")
    counts = ", ".join(f"{k}: {v}" for k, v in sorted(report.summary.items()))
    lines.append(f"pairs: {len(report.records)} ({counts})")
    return "\n".join(lines)


def write_jsonl(report: RunReport, path: str) -> None:
    with open(path, "w") as fh:
        for r in report.records:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": report.summary, "config": report.config},
                            sort_keys=True) + "\n")


def _finish(report: RunReport, cfg: RunConfig) -> int:
    print(render_report(report))
    if cfg.jsonl:
        write_jsonl(report, cfg.jsonl)
    return 0 if report.all_pass() else 1


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    cfg = build_config(args)
    if cfg.catalogue is None:
        raise CliError("check needs --catalogue DIR")
    path = Path(cfg.catalogue)
    if not path.is_dir():
        raise CliError(f"catalogue directory not found: {path}")
    failures = 0
    entries = 0
    for f in sorted(path.glob("*.alg")):
        entries += 1
        try:
            entry = parse_algebra_file(f.read_text(), str(f), validate=True)
        except FileFormatError as exc:
            failures += 1
            print(f"{f.name}: FAIL {exc}")
            continue
        print(f"{f.name}: ok  {entry.id} (type ({entry.structure.m},{entry.structure.n}))")
    if entries == 0:
        raise CliError(f"no .alg files under {path}")
    print(f"{entries - failures}/{entries} entries valid")
    return 0 if failures == 0 else 1


def cmd_act(args) -> int:
    cfg = build_config(args)
    catalogue = _read_catalogue(cfg)
    try:
        wf = parse_witness_file(Path(args.change).read_text(), args.change, require_refs=False)
    except OSError as exc:
        raise CliError(f"cannot read change file: {exc}") from exc
    token = args.id or wf.source_ref
    if token is None:
        raise CliError("no entry id: pass --id or put a source line in the change file")
    entry = resolve_entry(catalogue, wf.mtype, token.removeprefix("id:"))
    if entry is None:
        raise CliError(f"catalogue has no entry for {token!r}")
    try:
        table = act_laurent(wf.to_change(), entry.structure)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"cannot apply change: {exc}") from exc
    entries = {}
    for triple, lp in table.items():
        if any(k != 0 for k in lp.terms):
            raise CliError("the change involves t; curves belong to the witness verb")
        entries[triple] = lp.coeff(0)
    moved = SuperStructure(entry.structure.m, entry.structure.n, entries,
                           parameters=entry.structure.parameters, complete=True)
    print(serialize_algebra(CatalogueEntry(f"{entry.id}_moved", moved, entry.source_note)))
    return 0


def cmd_witness(args) -> int:
    cfg = build_config(args)
    catalogue = _read_catalogue(cfg)
    failures = 0
    for path in args.files:
        try:
            wf = parse_witness_file(Path(path).read_text(), path)
        except OSError as exc:
            raise CliError(f"cannot read witness file: {exc}") from exc
        pair = []
        for ref in (wf.source_ref, wf.target_ref):
            if ref.startswith("id:"):
                entry = resolve_entry(catalogue, wf.mtype, ref[3:])
                if entry is None:
                    raise CliError(f"{path}: catalogue has no entry for {ref!r}")
                pair.append(entry.structure)
            else:
                ref_path = Path(path).parent / ref
                try:
                    pair.append(parse_algebra_file(ref_path.read_text(), str(ref_path)).structure)
                except OSError as exc:
                    raise CliError(f"{path}: cannot read {ref}: {exc}") from exc
        report = verify_witness(Witness(pair[0], pair[1], wf.to_change()))
        print(f"{path}: {report.status.value}")
        for failure in report.failures:
            print(f"    c{failure.triple[0]}{failure.triple[1]}^{failure.triple[2]}: "
                  f"{failure.detail}")
        if not report.confirmed:
            failures += 1
    return 0 if failures == 0 else 1


def cmd_certify(args) -> int:
    cfg = build_config(args)
    cfg.certificates = args.certificate
    catalogue = _read_catalogue(cfg, required=False)
    parsed = _parse_certificates(_certificate_paths(cfg))
    records: list[PairRecord] = []
    for cf, digest in parsed:
        records.extend(run_certificate(cf, digest, catalogue, cfg))
    return _finish(RunReport(records, cfg.echo()), cfg)


def cmd_batch(args) -> int:
    cfg = build_config(args)
    report = run_batch(cfg.catalogue, cfg.certificates, cfg)
    return _finish(report, cfg)


def cmd_stability(args) -> int:
    cfg = build_config(args)
    parsed = _parse_certificates(_certificate_paths(cfg))
    limits = cfg.limits()
    failures = 0
    for cf, _ in parsed:
        t0 = time.monotonic()
        res = b_stability(cf.closed_set, limits, cfg.orientations())
        took = time.monotonic() - t0
        extra = f" ({res.orientation}, {res.mode})" if res.status is StabilityStatus.STABLE else ""
        print(f"{cf.closed_set.name}: {res.status.value}{extra}  [{took:.2f}s]")
        if res.status is not StabilityStatus.STABLE:
            failures += 1
            for note in res.notes:
                print(f"    - {note}")
    print(f"{len(parsed) - failures}/{len(parsed)} certificate sets stable")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, catalogue: bool = True) -> None:
    p.add_argument("--config", help="JSON config file; flags win over it")
    p.add_argument("--max-seconds", type=float, dest="max_seconds",
                   help="wall budget per stability call / representability query")
    p.add_argument("--max-basis", type=int, dest="max_basis", help="basis size cap")
    p.add_argument("--max-degree", type=int, dest="max_degree", help="total degree cap")
    p.add_argument("--orientation", choices=("both",) + ORIENTATIONS + MIXED_ORIENTATIONS,
                   help="triangular orientation(s) tried for stability")
    p.add_argument("--jsonl", help="also write one JSON record per pair to this path")
    if catalogue:
        p.add_argument("--catalogue", help="directory of .alg files")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jsdeg",
        description="Exact degeneration and non-degeneration checks for "
                    "Jordan superalgebra structure constants.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check", help="validate a catalogue")
    _add_common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("act", help="apply a basis change to a catalogue entry")
    _add_common(p)
    p.add_argument("change", help="change file (witness grammar, refs optional)")
    p.add_argument("--id", help="catalogue entry to transform")
    p.set_defaults(fn=cmd_act)

    p = sub.add_parser("witness", help="verify degeneration witness files")
    _add_common(p)
    p.add_argument("files", nargs="+", help="witness files")
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("certify", help="run one certificate file")
    _add_common(p)
    p.add_argument("certificate", help="certificate file")
    p.add_argument("--modular-precheck", action="store_true", default=None,
                   dest="modular_precheck",
                   help="probabilistic modular shortcut for representability")
    p.add_argument("--no-witness-search", action="store_false", default=None,
                   dest="witness_search", help="skip the rational witness search")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("batch", help="run certificates in bulk (default: shipped set)")
    _add_common(p)
    p.add_argument("--certificates", help="directory or file (default: shipped)")
    p.add_argument("--jobs", type=int, help="worker pool size")
    p.add_argument("--modular-precheck", action="store_true", default=None,
                   dest="modular_precheck",
                   help="probabilistic modular shortcut for representability")
    p.add_argument("--no-witness-search", action="store_false", default=None,
                   dest="witness_search", help="skip the rational witness search")
    p.set_defaults(fn=cmd_batch)

    p = sub.add_parser("stability", help="B-stability of certificate sets only")
    _add_common(p, catalogue=False)
    p.add_argument("--certificates", help="directory or file (default: shipped)")
    p.set_defaults(fn=cmd_stability)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
